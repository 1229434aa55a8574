"""Per-cluster semantic descriptors and rule-based labeling.

Each cluster is summarized by a small descriptor (size, signed mean
radial velocity, binned-mode RCS, centroid, axis-aligned extent) and then
matched against an ordered list of interval rules. The first rule whose
every interval contains the corresponding descriptor feature assigns its
label; clusters matching no rule are labeled :data:`LABEL_UNKNOWN`. There
is no training step, which keeps the labeling auditable: the full rule
table is plain data and can be printed via :func:`format_rules`.

Mode RCS is defined over a fixed histogram: bins are half-open intervals
``[k*w, (k+1)*w)`` aligned to integer multiples of the bin width ``w``,
count ties break toward the lower bin, and the reported value is the
winning bin's center.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .clustering import Clustering
from .errors import ConfigError, EmptyClusterError, MismatchedClusteringError
from .points import COL_RCS, COL_V, Frame
from .validation import check_members

LABEL_PEDESTRIAN = "pedestrian"
LABEL_CLUTTER = "clutter"
LABEL_UNKNOWN = "unknown"

#: Descriptor features that interval rules may constrain.
RULE_FEATURES = (
    "size",
    "abs_mean_velocity",
    "mode_rcs",
    "extent_z",
    "horizontal_extent",
)


@dataclass(frozen=True)
class ClusterDescriptor:
    """Summary statistics of one cluster.

    Attributes:
        size: Number of member points.
        mean_velocity: Arithmetic mean of the members' signed radial
            velocities, m/s. Opposing motions cancel by design.
        mode_rcs: Center of the most populated RCS histogram bin, dBsm.
        centroid: Mean member position (x, y, z), meters.
        extent: Axis-aligned bounding-box dimensions (dx, dy, dz),
            meters; the cluster's volumetric spread.
        range_m: Distance from the sensor to the centroid, meters.
    """

    size: int
    mean_velocity: float  # m/s, signed
    mode_rcs: float  # dBsm, bin center
    centroid: tuple[float, float, float]  # m
    extent: tuple[float, float, float]  # m
    range_m: float  # m

    @property
    def abs_mean_velocity(self) -> float:
        """Magnitude of the signed mean velocity, m/s (|mean|, not mean of |v|)."""
        return abs(self.mean_velocity)

    @property
    def horizontal_extent(self) -> float:
        """Larger of the two horizontal bounding-box dimensions, meters."""
        return max(self.extent[0], self.extent[1])

    def feature(self, key: str) -> float:
        """Look up a rule feature by name (one of :data:`RULE_FEATURES`)."""
        if key == "size":
            return float(self.size)
        if key == "abs_mean_velocity":
            return self.abs_mean_velocity
        if key == "mode_rcs":
            return self.mode_rcs
        if key == "extent_z":
            return self.extent[2]
        if key == "horizontal_extent":
            return self.horizontal_extent
        raise KeyError(f"unknown descriptor feature {key!r}")


def binned_mode(values, bin_width: float = 1.0) -> float:
    """Mode of continuous values over a fixed-width histogram.

    Bin edges sit at integer multiples of ``bin_width``; a value on an
    edge belongs to the upper bin. Ties break toward the lower bin.

    Args:
        values: Sample values (non-empty).
        bin_width: Histogram resolution, same units as ``values``.

    Returns:
        The center of the most populated bin.
    """
    if not (math.isfinite(bin_width) and bin_width > 0.0):
        raise ConfigError(f"bin_width must be finite and > 0, got {bin_width!r}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyClusterError("mode of zero values")
    idx = np.floor(arr / bin_width).astype(np.int64)
    bins, counts = np.unique(idx, return_counts=True)
    # unique() sorts ascending and argmax takes the first maximum, so
    # count ties resolve to the lower bin.
    best = bins[int(np.argmax(counts))]
    return float((best + 0.5) * bin_width)


def describe_cluster(frame: Frame, members, bin_width: float = 1.0) -> ClusterDescriptor:
    """Compute the semantic descriptor of one cluster.

    Member indices are processed in ascending order regardless of how the
    list is given, so the result is bitwise invariant under permutation.

    Args:
        frame: The frame the members index into.
        members: Non-empty member indices.
        bin_width: RCS histogram resolution for the mode, dBsm.

    Returns:
        The cluster's :class:`ClusterDescriptor`.

    Raises:
        EmptyClusterError: ``members`` is empty.
        MemberIndexError: An index falls outside the frame.
    """
    members = check_members(frame, members)
    if members.size == 0:
        raise EmptyClusterError("cannot describe an empty cluster")
    members = np.sort(members)
    rows = frame.data[members]
    pos = rows[:, :3]
    centroid = pos.mean(axis=0)
    extent = pos.max(axis=0) - pos.min(axis=0)
    cx, cy, cz = (float(c) for c in centroid)
    return ClusterDescriptor(
        size=int(members.size),
        mean_velocity=float(rows[:, COL_V].mean()),
        mode_rcs=binned_mode(rows[:, COL_RCS], bin_width),
        centroid=(cx, cy, cz),
        extent=(float(extent[0]), float(extent[1]), float(extent[2])),
        range_m=math.sqrt((cx * cx + cy * cy) + cz * cz),
    )


@dataclass(frozen=True)
class ClassRule:
    """One labeling rule: a conjunction of closed feature intervals.

    A descriptor matches when every constrained feature lies inside its
    interval (bounds inclusive; use ``inf`` for one-sided constraints).

    Attributes:
        name: Unique rule name, reported on matching detections.
        label: Label assigned on match.
        bounds: Mapping of feature name to (lo, hi).
    """

    name: str
    label: str
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        norm: dict[str, tuple[float, float]] = {}
        for key, interval in dict(self.bounds).items():
            if key not in RULE_FEATURES:
                raise ConfigError(
                    f"rule {self.name!r}: unknown feature {key!r} "
                    f"(expected one of {', '.join(RULE_FEATURES)})"
                )
            try:
                lo, hi = (float(v) for v in interval)
            except (TypeError, ValueError) as exc:
                raise ConfigError(
                    f"rule {self.name!r}: interval for {key!r} must be "
                    f"two numbers, got {interval!r}"
                ) from exc
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ConfigError(
                    f"rule {self.name!r}: invalid interval for {key!r}: "
                    f"[{lo!r}, {hi!r}]"
                )
            norm[key] = (lo, hi)
        object.__setattr__(self, "bounds", norm)

    def matches(self, desc: ClusterDescriptor) -> bool:
        return all(lo <= desc.feature(k) <= hi for k, (lo, hi) in self.bounds.items())


@dataclass(frozen=True)
class RuleSet:
    """Ordered rules; position in the list is the priority (first wins)."""

    rules: tuple[ClassRule, ...]

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        names = [r.name for r in rules]
        if len(set(names)) != len(names):
            raise ConfigError(f"rule names must be unique, got {names!r}")

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class Detection:
    """A labeled cluster.

    ``rule`` is the name of the matched rule, or None when no rule
    matched and the label fell through to :data:`LABEL_UNKNOWN`.
    """

    cluster_id: int
    label: str
    descriptor: ClusterDescriptor
    rule: str | None


def classify_cluster(
    desc: ClusterDescriptor, rules: RuleSet, cluster_id: int = 0
) -> Detection:
    """Label one descriptor by the first matching rule.

    Evaluation is pure and total: exactly one label comes out, falling
    through to :data:`LABEL_UNKNOWN` when nothing matches.
    """
    for rule in rules:
        if rule.matches(desc):
            return Detection(cluster_id, rule.label, desc, rule.name)
    return Detection(cluster_id, LABEL_UNKNOWN, desc, None)


def classify_frame(
    frame: Frame,
    clustering: Clustering,
    rules: RuleSet,
    bin_width: float = 1.0,
) -> list[Detection]:
    """Describe and label every cluster of a frame, in cluster-id order.

    Raises:
        MismatchedClusteringError: The clustering was not produced from
            this frame (label count or member indices disagree).
    """
    n = len(frame)
    if clustering.labels.shape[0] != n:
        raise MismatchedClusteringError(
            f"clustering covers {clustering.labels.shape[0]} points, "
            f"frame has {n}"
        )
    for members in clustering.clusters:
        if members.size and (int(members[0]) < 0 or int(members[-1]) >= n):
            raise MismatchedClusteringError(
                f"cluster member index out of range for frame of {n} points"
            )
    return [
        classify_cluster(describe_cluster(frame, members, bin_width), rules, cid)
        for cid, members in enumerate(clustering.clusters)
    ]


class RuleBasedClassifier(BaseEstimator):
    """Estimator-style wrapper around :func:`classify_frame`.

    Args:
        rules: Rule table; ``None`` selects the packaged default rules.
        bin_width: RCS histogram resolution, dBsm; ``None`` selects the
            packaged default.
    """

    def __init__(self, rules: RuleSet | None = None, bin_width: float | None = None):
        self.rules = rules
        self.bin_width = bin_width

    def fit(self, X=None, y=None) -> "RuleBasedClassifier":
        """Resolve the rule table; no training happens."""
        rules, bin_width = self.rules, self.bin_width
        if rules is None or bin_width is None:
            from .config import default_pipeline_config

            defaults = default_pipeline_config().classify
            rules = defaults.rules if rules is None else rules
            bin_width = defaults.bin_width if bin_width is None else bin_width
        if not isinstance(rules, RuleSet):
            rules = RuleSet(tuple(rules))
        if not (math.isfinite(bin_width) and bin_width > 0.0):
            raise ConfigError(f"bin_width must be finite and > 0, got {bin_width!r}")
        self.rules_ = rules
        self.bin_width_ = float(bin_width)
        return self

    def predict(self, frame: Frame, clustering: Clustering) -> list[Detection]:
        check_is_fitted(self, "rules_")
        return classify_frame(frame, clustering, self.rules_, self.bin_width_)


def format_rules(rules: RuleSet) -> str:
    """Render a rule table as indented human-readable text."""
    lines = []
    for pos, rule in enumerate(rules, start=1):
        lines.append(f"{pos}. {rule.name} -> {rule.label}")
        if not rule.bounds:
            lines.append("     (no constraints)")
        for key, (lo, hi) in rule.bounds.items():
            lines.append(f"     {key} in [{lo:g}, {hi:g}]")
    lines.append(f"{len(rules) + 1}. (no match) -> {LABEL_UNKNOWN}")
    return "\n".join(lines)
