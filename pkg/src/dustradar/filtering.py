"""Threshold-based noise filtering.

Enclosed reflective spaces fill radar frames with clutter: metal surfaces
return abnormally strong echoes, multipath bounces land detections at
angles the sensor cannot physically see, and airborne dust shows up as
faint, nearly static speckle. This module drops such points with a fixed
cascade of per-point gates:

1. RCS gate - reject unless ``rcs_min <= rcs <= rcs_max``.
2. Angle gate - reject unless azimuth and elevation both lie inside the
   configured coverage bounds.
3. Velocity gate - reject if ``|v| > v_abs_max``; additionally, when the
   static gate is enabled, reject near-static points (``|v| <=
   static_band``) whose range falls outside the expected static window.

Each point is judged independently, so filtering a frame is a single O(n)
pass, and a rejection is attributed to the first failing gate. All bounds
are inclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError
from .points import COL_AZ, COL_EL, COL_RCS, COL_V, Frame, HALF_PI, RadarPoint

# Gate names in evaluation order; FilterReport tallies use these keys.
RULE_RCS = "rcs"
RULE_ANGLE = "angle"
RULE_VELOCITY = "velocity"
RULE_VELOCITY_STATIC = "velocity_static"
RULE_ORDER = (RULE_RCS, RULE_ANGLE, RULE_VELOCITY, RULE_VELOCITY_STATIC)

# Integer codes used by the vectorized path: 0 = keep, 1..4 = RULE_ORDER.
KEEP_CODE = 0


@dataclass(frozen=True, slots=True)
class FilterConfig:
    """All gate bounds. Angles in radians, RCS in dBsm, speeds in m/s.

    ``static_band`` is the half-width of the near-zero velocity band and
    ``static_range_min/max`` delimit the range window inside which such
    near-static returns are still plausible (floors, walls, standing
    people); near-static returns outside it are treated as clutter when
    ``enable_static_gate`` is on.

    There are no built-in field defaults: the shipped numbers live in the
    packaged config file (see :func:`FilterConfig.default`), which is the
    single auditable source for every threshold.
    """

    rcs_min: float
    rcs_max: float
    az_min: float
    az_max: float
    el_min: float
    el_max: float
    v_abs_max: float
    static_band: float
    static_range_min: float
    static_range_max: float
    enable_static_gate: bool

    def __post_init__(self):
        pairs = (
            ("rcs_min", "rcs_max"),
            ("az_min", "az_max"),
            ("el_min", "el_max"),
            ("static_range_min", "static_range_max"),
        )
        for lo_name, hi_name in pairs:
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise ConfigError(f"{lo_name} < {hi_name} required, got {lo} / {hi}")
        if not self.v_abs_max > 0:
            raise ConfigError(f"v_abs_max must be > 0, got {self.v_abs_max}")
        if not self.static_band >= 0:
            raise ConfigError(f"static_band must be >= 0, got {self.static_band}")
        if self.az_min < -math.pi or self.az_max > math.pi:
            raise ConfigError("azimuth bounds must lie within [-pi, pi]")
        if self.el_min < -HALF_PI or self.el_max > HALF_PI:
            raise ConfigError("elevation bounds must lie within [-pi/2, pi/2]")

    @classmethod
    def default(cls) -> "FilterConfig":
        """The packaged default gate bounds."""
        from .config import default_pipeline_config

        return default_pipeline_config().filter


@dataclass(frozen=True, slots=True)
class FilterReport:
    """Per-frame tally of what the filter did.

    ``input_count == kept_count + sum(rejected_by_rule.values())`` always
    holds; rejections are attributed to the first failing gate.
    """

    input_count: int
    kept_count: int
    rejected_by_rule: Mapping[str, int]

    def __post_init__(self):
        if self.input_count != self.kept_count + sum(self.rejected_by_rule.values()):
            raise ValueError("report counts do not sum to the input size")

    @property
    def rejected_count(self) -> int:
        return self.input_count - self.kept_count


def point_passes(point: RadarPoint, config: FilterConfig) -> str | None:
    """Judge a single point against the gate cascade.

    Returns ``None`` to keep the point, or the name of the first failing
    gate (one of :data:`RULE_ORDER`).
    """
    if not config.rcs_min <= point.rcs <= config.rcs_max:
        return RULE_RCS
    if not (
        config.az_min <= point.azimuth <= config.az_max
        and config.el_min <= point.elevation <= config.el_max
    ):
        return RULE_ANGLE
    if abs(point.v) > config.v_abs_max:
        return RULE_VELOCITY
    if config.enable_static_gate and abs(point.v) <= config.static_band:
        r = point.range
        if not config.static_range_min <= r <= config.static_range_max:
            return RULE_VELOCITY_STATIC
    return None


def rule_codes(frame: Frame, config: FilterConfig) -> np.ndarray:
    """Vectorized gate decisions for a whole frame.

    Returns an ``(n,)`` uint8 array: 0 keeps the point, 1..4 name the first
    failing gate in :data:`RULE_ORDER` order. Semantically identical to
    calling :func:`point_passes` per point.
    """
    d = frame.data
    n = d.shape[0]
    codes = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return codes

    rcs = d[:, COL_RCS]
    az = d[:, COL_AZ]
    el = d[:, COL_EL]
    v_abs = np.abs(d[:, COL_V])

    rcs_ok = (rcs >= config.rcs_min) & (rcs <= config.rcs_max)
    angle_ok = (
        (az >= config.az_min)
        & (az <= config.az_max)
        & (el >= config.el_min)
        & (el <= config.el_max)
    )
    vel_fast = v_abs > config.v_abs_max
    if config.enable_static_gate:
        r = frame.ranges()
        static_bad = (v_abs <= config.static_band) & (
            (r < config.static_range_min) | (r > config.static_range_max)
        )
    else:
        static_bad = np.zeros(n, dtype=bool)

    # First failing gate wins; assign in reverse order so earlier gates
    # overwrite later ones.
    codes[rcs_ok & angle_ok & ~vel_fast & static_bad] = 4
    codes[rcs_ok & angle_ok & vel_fast] = 3
    codes[rcs_ok & ~angle_ok] = 2
    codes[~rcs_ok] = 1
    return codes


def keep_mask(frame: Frame, config: FilterConfig) -> np.ndarray:
    """Boolean mask of the points :func:`filter_frame` would keep."""
    return rule_codes(frame, config) == KEEP_CODE


def filter_frame(frame: Frame, config: FilterConfig) -> tuple[Frame, FilterReport]:
    """Filter one frame in a single pass.

    The output frame keeps the input's seq and timestamp, and the kept
    points preserve their relative order (the output is a subsequence of
    the input).

    Returns:
        The filtered frame and the per-gate rejection tally.
    """
    codes = rule_codes(frame, config)
    kept = codes == KEEP_CODE
    counts = np.bincount(codes, minlength=len(RULE_ORDER) + 1)
    report = FilterReport(
        input_count=len(frame),
        kept_count=int(counts[0]),
        rejected_by_rule={
            rule: int(counts[i + 1]) for i, rule in enumerate(RULE_ORDER)
        },
    )
    out = Frame(frame.seq, frame.timestamp, frame.data[kept])
    return out, report


class RadarNoiseFilter(BaseEstimator):
    """Estimator-style wrapper around :func:`filter_frame`.

    Stateless: ``fit`` only validates the configuration. ``transform`` maps
    a frame to its filtered frame (or a sequence of frames to a list),
    which composes with the clustering and classification estimators.

    Args:
        config: Gate bounds; ``None`` selects the packaged defaults.
    """

    def __init__(self, config: FilterConfig | None = None):
        self.config = config

    def _resolved(self) -> FilterConfig:
        return self.config if self.config is not None else FilterConfig.default()

    def fit(self, X=None, y=None) -> "RadarNoiseFilter":
        self.config_ = self._resolved()
        return self

    def transform(self, X):
        """Filter a frame, or each frame of an iterable."""
        cfg = self._resolved()
        if isinstance(X, Frame):
            return filter_frame(X, cfg)[0]
        return [filter_frame(f, cfg)[0] for f in X]

    def transform_with_report(self, frame: Frame) -> tuple[Frame, FilterReport]:
        """Like ``transform`` on one frame, also returning the tally."""
        return filter_frame(frame, self._resolved())
