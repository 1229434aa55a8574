"""Configuration schema and strict YAML loading.

Every tunable threshold in the processing chain and the scene generator
lives in a config file; the packaged defaults under ``dustradar/data``
are the single auditable source of the shipped numbers (code never
hard-codes them). Parsing is strict: a missing required key or an
unrecognized key raises :class:`~dustradar.errors.ConfigError` rather
than being silently defaulted or ignored.

Angles appear in degrees in the files (keys carry a ``_deg`` suffix) and
are converted to radians on load.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .classification import ClassRule, RuleSet
from .errors import ConfigError
from .filtering import FilterConfig
from .simulate import (
    DustSpec,
    GhostSpec,
    PedestrianSpec,
    RoomSpec,
    SceneSpec,
    SensorSpec,
    StructureSpec,
)


@dataclass(frozen=True)
class ClusterConfig:
    """Euclidean clustering parameters."""

    radius: float  # m, neighbor distance d (inclusive)
    min_cluster_size: int  # points

    def __post_init__(self):
        if not (isinstance(self.radius, (int, float)) and math.isfinite(self.radius) and self.radius > 0):
            raise ConfigError(f"cluster.radius must be finite and > 0, got {self.radius!r}")
        if not (isinstance(self.min_cluster_size, int) and self.min_cluster_size >= 1):
            raise ConfigError(
                f"cluster.min_cluster_size must be an integer >= 1, got {self.min_cluster_size!r}"
            )


@dataclass(frozen=True)
class ClassifyConfig:
    """Descriptor binning and the ordered rule table."""

    bin_width: float  # dBsm
    rules: RuleSet

    def __post_init__(self):
        if not (
            isinstance(self.bin_width, (int, float))
            and math.isfinite(self.bin_width)
            and self.bin_width > 0
        ):
            raise ConfigError(f"classify.bin_width must be finite and > 0, got {self.bin_width!r}")


@dataclass(frozen=True)
class IoConfig:
    """Ingest-side options."""

    ingest_angle_tolerance: float  # rad
    validate_on_read: bool

    def __post_init__(self):
        v = self.ingest_angle_tolerance
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(f"io.ingest_angle_tolerance must be > 0, got {v!r}")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the filter -> cluster -> classify chain needs."""

    filter: FilterConfig
    cluster: ClusterConfig
    classify: ClassifyConfig
    io: IoConfig


def _mapping(obj, ctx: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{ctx} must be a mapping, got {type(obj).__name__}")
    return dict(obj)


def _take(m: dict, key: str, ctx: str):
    if key not in m:
        raise ConfigError(f"{ctx}: missing required key {key!r}")
    return m.pop(key)


def _finish(m: dict, ctx: str) -> None:
    if m:
        raise ConfigError(f"{ctx}: unknown keys {sorted(m)}")


def _num(value, ctx: str, allow_inf: bool = False) -> float:
    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if ok and (math.isfinite(value) or (allow_inf and not math.isnan(value))):
        return float(value)
    raise ConfigError(f"{ctx} must be a number, got {value!r}")


def _int(value, ctx: str) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise ConfigError(f"{ctx} must be an integer, got {value!r}")


def _bool(value, ctx: str) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigError(f"{ctx} must be a boolean, got {value!r}")


def _str(value, ctx: str) -> str:
    if isinstance(value, str):
        return value
    raise ConfigError(f"{ctx} must be a string, got {value!r}")


def _deg(value, ctx: str) -> float:
    return math.radians(_num(value, ctx))


def parse_filter_config(obj) -> FilterConfig:
    ctx = "filter"
    m = _mapping(obj, ctx)
    cfg = FilterConfig(
        rcs_min=_num(_take(m, "rcs_min", ctx), f"{ctx}.rcs_min"),
        rcs_max=_num(_take(m, "rcs_max", ctx), f"{ctx}.rcs_max"),
        az_min=_deg(_take(m, "az_min_deg", ctx), f"{ctx}.az_min_deg"),
        az_max=_deg(_take(m, "az_max_deg", ctx), f"{ctx}.az_max_deg"),
        el_min=_deg(_take(m, "el_min_deg", ctx), f"{ctx}.el_min_deg"),
        el_max=_deg(_take(m, "el_max_deg", ctx), f"{ctx}.el_max_deg"),
        v_abs_max=_num(_take(m, "v_abs_max", ctx), f"{ctx}.v_abs_max"),
        static_band=_num(_take(m, "static_band", ctx), f"{ctx}.static_band"),
        static_range_min=_num(_take(m, "static_range_min", ctx), f"{ctx}.static_range_min"),
        static_range_max=_num(_take(m, "static_range_max", ctx), f"{ctx}.static_range_max"),
        enable_static_gate=_bool(_take(m, "enable_static_gate", ctx), f"{ctx}.enable_static_gate"),
    )
    _finish(m, ctx)
    return cfg


def parse_cluster_config(obj) -> ClusterConfig:
    ctx = "cluster"
    m = _mapping(obj, ctx)
    cfg = ClusterConfig(
        radius=_num(_take(m, "radius", ctx), f"{ctx}.radius"),
        min_cluster_size=_int(_take(m, "min_cluster_size", ctx), f"{ctx}.min_cluster_size"),
    )
    _finish(m, ctx)
    return cfg


def _parse_rule(obj, ctx: str) -> ClassRule:
    m = _mapping(obj, ctx)
    name = _str(_take(m, "name", ctx), f"{ctx}.name")
    label = _str(_take(m, "label", ctx), f"{ctx}.label")
    bounds_raw = _mapping(_take(m, "bounds", ctx), f"{ctx}.bounds")
    _finish(m, ctx)
    bounds = {}
    for key, interval in bounds_raw.items():
        ictx = f"{ctx}.bounds.{key}"
        if not isinstance(interval, (list, tuple)) or len(interval) != 2:
            raise ConfigError(f"{ictx} must be a [lo, hi] pair, got {interval!r}")
        bounds[str(key)] = (
            _num(interval[0], f"{ictx}[0]", allow_inf=True),
            _num(interval[1], f"{ictx}[1]", allow_inf=True),
        )
    return ClassRule(name=name, label=label, bounds=bounds)


def parse_classify_config(obj) -> ClassifyConfig:
    ctx = "classify"
    m = _mapping(obj, ctx)
    bin_width = _num(_take(m, "bin_width", ctx), f"{ctx}.bin_width")
    rules_raw = _take(m, "rules", ctx)
    _finish(m, ctx)
    if not isinstance(rules_raw, list):
        raise ConfigError(f"{ctx}.rules must be a list")
    rules = tuple(
        _parse_rule(r, f"{ctx}.rules[{i}]") for i, r in enumerate(rules_raw)
    )
    return ClassifyConfig(bin_width=bin_width, rules=RuleSet(rules))


def parse_io_config(obj) -> IoConfig:
    ctx = "io"
    m = _mapping(obj, ctx)
    cfg = IoConfig(
        ingest_angle_tolerance=_num(
            _take(m, "ingest_angle_tolerance", ctx), f"{ctx}.ingest_angle_tolerance"
        ),
        validate_on_read=_bool(_take(m, "validate_on_read", ctx), f"{ctx}.validate_on_read"),
    )
    _finish(m, ctx)
    return cfg


def parse_pipeline_config(data) -> PipelineConfig:
    ctx = "pipeline config"
    m = _mapping(data, ctx)
    cfg = PipelineConfig(
        filter=parse_filter_config(_take(m, "filter", ctx)),
        cluster=parse_cluster_config(_take(m, "cluster", ctx)),
        classify=parse_classify_config(_take(m, "classify", ctx)),
        io=parse_io_config(_take(m, "io", ctx)),
    )
    _finish(m, ctx)
    return cfg


def _parse_pedestrian(obj, ctx: str) -> PedestrianSpec:
    m = _mapping(obj, ctx)
    wps_raw = _take(m, "waypoints", ctx)
    if not isinstance(wps_raw, list) or not wps_raw:
        raise ConfigError(f"{ctx}.waypoints must be a non-empty list of [x, y] pairs")
    waypoints = []
    for i, wp in enumerate(wps_raw):
        if not isinstance(wp, (list, tuple)) or len(wp) != 2:
            raise ConfigError(f"{ctx}.waypoints[{i}] must be an [x, y] pair, got {wp!r}")
        waypoints.append(
            (_num(wp[0], f"{ctx}.waypoints[{i}][0]"), _num(wp[1], f"{ctx}.waypoints[{i}][1]"))
        )
    spec = PedestrianSpec(
        waypoints=tuple(waypoints),
        speed=_num(_take(m, "speed", ctx), f"{ctx}.speed"),
        height=_num(_take(m, "height", ctx), f"{ctx}.height"),
        radius=_num(_take(m, "radius", ctx), f"{ctx}.radius"),
        points_per_frame=_int(_take(m, "points_per_frame", ctx), f"{ctx}.points_per_frame"),
        rcs_mean=_num(_take(m, "rcs_mean", ctx), f"{ctx}.rcs_mean"),
        rcs_sigma=_num(_take(m, "rcs_sigma", ctx), f"{ctx}.rcs_sigma"),
    )
    _finish(m, ctx)
    return spec


def parse_scene_spec(data) -> SceneSpec:
    ctx = "scene spec"
    m = _mapping(data, ctx)

    room_m = _mapping(_take(m, "room", ctx), "room")
    room = RoomSpec(
        length_x=_num(_take(room_m, "length_x", "room"), "room.length_x"),
        width_y=_num(_take(room_m, "width_y", "room"), "room.width_y"),
        height_z=_num(_take(room_m, "height_z", "room"), "room.height_z"),
    )
    _finish(room_m, "room")

    sensor_m = _mapping(_take(m, "sensor", ctx), "sensor")
    sensor = SensorSpec(
        x=_num(_take(sensor_m, "x", "sensor"), "sensor.x"),
        y=_num(_take(sensor_m, "y", "sensor"), "sensor.y"),
        z=_num(_take(sensor_m, "z", "sensor"), "sensor.z"),
        fov_az=_deg(_take(sensor_m, "fov_az_deg", "sensor"), "sensor.fov_az_deg"),
        fov_el=_deg(_take(sensor_m, "fov_el_deg", "sensor"), "sensor.fov_el_deg"),
    )
    _finish(sensor_m, "sensor")

    peds_raw = _take(m, "pedestrians", ctx)
    if not isinstance(peds_raw, list):
        raise ConfigError("pedestrians must be a list")
    pedestrians = tuple(
        _parse_pedestrian(p, f"pedestrians[{i}]") for i, p in enumerate(peds_raw)
    )

    dust_m = _mapping(_take(m, "dust", ctx), "dust")
    rates_raw = _take(dust_m, "rates", "dust")
    if not isinstance(rates_raw, list) or not rates_raw:
        raise ConfigError("dust.rates must be a non-empty list")
    dust = DustSpec(
        rates=tuple(_int(r, f"dust.rates[{i}]") for i, r in enumerate(rates_raw)),
        rcs_mean=_num(_take(dust_m, "rcs_mean", "dust"), "dust.rcs_mean"),
        rcs_sigma=_num(_take(dust_m, "rcs_sigma", "dust"), "dust.rcs_sigma"),
        v_max=_num(_take(dust_m, "v_max", "dust"), "dust.v_max"),
    )
    _finish(dust_m, "dust")

    ghosts_m = _mapping(_take(m, "ghosts", ctx), "ghosts")
    planes_raw = _take(ghosts_m, "planes", "ghosts")
    if not isinstance(planes_raw, list):
        raise ConfigError("ghosts.planes must be a list")
    ghosts = GhostSpec(
        enabled=_bool(_take(ghosts_m, "enabled", "ghosts"), "ghosts.enabled"),
        planes=tuple(_str(p, f"ghosts.planes[{i}]") for i, p in enumerate(planes_raw)),
        gain_db=_num(_take(ghosts_m, "gain_db", "ghosts"), "ghosts.gain_db"),
    )
    _finish(ghosts_m, "ghosts")

    structure_m = _mapping(_take(m, "structure", ctx), "structure")
    structure = StructureSpec(
        enabled=_bool(_take(structure_m, "enabled", "structure"), "structure.enabled"),
        points_per_frame=_int(
            _take(structure_m, "points_per_frame", "structure"), "structure.points_per_frame"
        ),
        rcs_mean=_num(_take(structure_m, "rcs_mean", "structure"), "structure.rcs_mean"),
        rcs_sigma=_num(_take(structure_m, "rcs_sigma", "structure"), "structure.rcs_sigma"),
    )
    _finish(structure_m, "structure")

    spec = SceneSpec(
        room=room,
        sensor=sensor,
        pedestrians=pedestrians,
        dust=dust,
        ghosts=ghosts,
        structure=structure,
        velocity_jitter=_num(_take(m, "velocity_jitter", ctx), "velocity_jitter"),
        frame_rate=_num(_take(m, "frame_rate", ctx), "frame_rate"),
        frame_count=_int(_take(m, "frame_count", ctx), "frame_count"),
        dust_level=_int(_take(m, "dust_level", ctx), "dust_level"),
        rng_seed=_int(_take(m, "rng_seed", ctx), "rng_seed"),
    )
    _finish(m, ctx)
    return spec


def _load_yaml(path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path!s}: {exc}") from exc


def load_pipeline_config(path) -> PipelineConfig:
    """Load and validate a pipeline config file."""
    return parse_pipeline_config(_load_yaml(path))


def load_scene_spec(path) -> SceneSpec:
    """Load and validate a scene spec file."""
    return parse_scene_spec(_load_yaml(path))


def _packaged(name: str) -> object:
    text = resources.files("dustradar.data").joinpath(name).read_text(encoding="utf-8")
    return yaml.safe_load(text)


@functools.lru_cache(maxsize=None)
def default_pipeline_config() -> PipelineConfig:
    """The packaged default processing configuration."""
    return parse_pipeline_config(_packaged("pipeline.yaml"))


@functools.lru_cache(maxsize=None)
def default_scene_spec() -> SceneSpec:
    """The packaged default scene: two walkers in a reflective dusty room."""
    return parse_scene_spec(_packaged("scene.yaml"))
