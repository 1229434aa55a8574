"""Shared pytest plumbing: the acceptance verdict summary block."""

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    """Queue one criterion verdict for the end-of-run summary."""
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)
