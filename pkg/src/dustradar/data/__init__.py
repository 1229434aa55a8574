"""Packaged default configuration files (YAML)."""
