"""Independent oracles the library is checked against.

Everything here is deliberately written without the library's own code
paths: the filter oracle is a scalar per-point rewrite of the gate
definitions, the clustering oracle builds connected components with
union-find over the full O(n^2) pair matrix, the neighbor oracle is a
linear scan, and the mode oracle is an explicit dict histogram.

Where tests assert bit-exact agreement, distance expressions keep the
same association order, ``(dx*dx + dy*dy) + dz*dz``, that the library
pins down; IEEE arithmetic is deterministic per expression shape, so
equal expressions on equal inputs give equal floats.
"""

from __future__ import annotations

import math

import numpy as np


def filter_oracle_rule(row, cfg) -> str | None:
    """First failing gate for one point row, or None to keep.

    ``row`` is the 7-field point record (x, y, z, rcs, v, azimuth,
    elevation; angles in radians); ``cfg`` is any object carrying the
    gate attributes.
    """
    x, y, z, rcs, v, az, el = (float(c) for c in row)
    if not (cfg.rcs_min <= rcs <= cfg.rcs_max):
        return "rcs"
    if not (cfg.az_min <= az <= cfg.az_max and cfg.el_min <= el <= cfg.el_max):
        return "angle"
    if abs(v) > cfg.v_abs_max:
        return "velocity"
    if cfg.enable_static_gate and abs(v) <= cfg.static_band:
        r = math.sqrt((x * x + y * y) + z * z)
        if not (cfg.static_range_min <= r <= cfg.static_range_max):
            return "velocity_static"
    return None


def filter_oracle_keep(rows, cfg) -> list[int]:
    """Indices the scalar oracle keeps, in order."""
    return [i for i, row in enumerate(rows) if filter_oracle_rule(row, cfg) is None]


class UnionFind:
    """Textbook disjoint-set forest with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def cluster_oracle(points, radius: float, min_cluster_size: int = 1) -> set[frozenset]:
    """Connected components of the <= radius graph, as a set of frozensets.

    Components smaller than ``min_cluster_size`` are dropped, matching the
    clustering contract under test.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    uf = UnionFind(n)
    r2 = radius * radius
    for i in range(n):
        dx = pts[:, 0] - pts[i, 0]
        dy = pts[:, 1] - pts[i, 1]
        dz = pts[:, 2] - pts[i, 2]
        d2 = (dx * dx + dy * dy) + dz * dz
        for j in np.nonzero(d2 <= r2)[0]:
            if j > i:
                uf.union(i, int(j))
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return {
        frozenset(members)
        for members in groups.values()
        if len(members) >= min_cluster_size
    }


def linear_scan_ball(points, center, radius: float) -> np.ndarray:
    """Sorted indices of all points within ``radius`` of ``center`` (inclusive)."""
    pts = np.asarray(points, dtype=np.float64)
    c = np.asarray(center, dtype=np.float64)
    dx = pts[:, 0] - c[0]
    dy = pts[:, 1] - c[1]
    dz = pts[:, 2] - c[2]
    d2 = (dx * dx + dy * dy) + dz * dz
    return np.nonzero(d2 <= radius * radius)[0].astype(np.int64)


def mode_oracle(values, bin_width: float) -> float:
    """Histogram mode by explicit counting; ties go to the lower bin."""
    counts: dict[int, int] = {}
    for v in values:
        b = math.floor(float(v) / bin_width)
        counts[b] = counts.get(b, 0) + 1
    best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return (best + 0.5) * bin_width


def random_point_rows(rng: np.random.Generator, n: int) -> np.ndarray:
    """(n, 7) structurally valid point rows spanning every gate regime.

    Positions cover all octants (so azimuth sweeps the full circle), RCS
    spans well past both RCS gates, and speeds exceed the velocity gate,
    exercising keep and reject paths of every rule.
    """
    pos = rng.uniform([-15.0, -15.0, -8.0], [20.0, 15.0, 8.0], (n, 3))
    near = rng.random(n) < 0.1  # push some points inside the static window
    pos[near] *= 0.02
    rcs = rng.uniform(-60.0, 45.0, n)
    v = rng.uniform(-12.0, 12.0, n)
    static = rng.random(n) < 0.2  # oversample the near-zero velocity band
    v[static] = rng.uniform(-0.08, 0.08, n)[static]
    az = np.arctan2(pos[:, 1], pos[:, 0])
    el = np.arctan2(pos[:, 2], np.hypot(pos[:, 0], pos[:, 1]))
    return np.column_stack([pos, rcs, v, az, el])
