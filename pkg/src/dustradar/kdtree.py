"""Balanced 3-d KD-tree with exact inclusive radius queries.

The tree indexes the Cartesian positions of one frame and returns, for a
query ball, exactly the indices whose Euclidean distance to the center is
<= the radius - no misses, no false hits. Construction is deterministic
for a given input order: axes cycle x, y, z with depth, each node splits
at the median, and coordinate ties are broken by the lower point index.

Pruning uses per-node bounding boxes. Box distances are computed with the
same association order as point distances, and IEEE rounding is monotone,
so the computed box distance never exceeds the computed distance of any
point inside the box: pruning can never drop a point the exact linear scan
would return.
"""

from __future__ import annotations

import numpy as np

from .points import Frame
from .validation import as_positions, check_radius

_LEAF_SIZE = 16


class _Node:
    __slots__ = ("lo", "hi", "left", "right", "indices")

    def __init__(self, lo, hi, left=None, right=None, indices=None):
        self.lo = lo          # bounding-box minima, shape (3,)
        self.hi = hi          # bounding-box maxima, shape (3,)
        self.left = left
        self.right = right
        self.indices = indices  # leaf only: sorted point indices


class KdTree:
    """Spatial index over the points of one frame. Immutable after build.

    Accepts a :class:`~dustradar.points.Frame` or an ``(n, 3)`` position
    array; stores point indices into that frame.
    """

    def __init__(self, points, leaf_size: int = _LEAF_SIZE):
        pts = as_positions(points)
        self._points = np.array(pts, dtype=np.float64, copy=True)
        self._points.setflags(write=False)
        self._leaf_size = max(1, int(leaf_size))
        n = self._points.shape[0]
        self._root = self._build(np.arange(n, dtype=np.int64), 0) if n else None

    @classmethod
    def from_frame(cls, frame: Frame) -> "KdTree":
        return cls(frame)

    def __len__(self) -> int:
        return self._points.shape[0]

    @property
    def points(self) -> np.ndarray:
        """The indexed ``(n, 3)`` positions (read-only)."""
        return self._points

    def _build(self, idx: np.ndarray, depth: int) -> _Node:
        pts = self._points[idx]
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        if idx.size <= self._leaf_size:
            return _Node(lo, hi, indices=np.sort(idx))
        axis = depth % 3
        # Median split; ties on the coordinate broken by lower index.
        order = np.lexsort((idx, pts[:, axis]))
        mid = idx.size // 2
        left = self._build(idx[order[:mid]], depth + 1)
        right = self._build(idx[order[mid:]], depth + 1)
        return _Node(lo, hi, left=left, right=right)

    def query_ball(self, center, radius: float) -> np.ndarray:
        """Indices of all points within ``radius`` (inclusive) of ``center``.

        Returns a sorted int64 array. Distance is plain Euclidean; the
        boundary is inclusive (d == radius is a hit).
        """
        radius = check_radius(radius)
        c = np.asarray(center, dtype=np.float64).reshape(3)
        r2 = radius * radius
        if self._root is None:
            return np.empty(0, dtype=np.int64)
        hits: list[np.ndarray] = []
        stack = [self._root]
        pts = self._points
        while stack:
            node = stack.pop()
            # Squared distance from center to the node's box, associated
            # identically to the point-distance expression below.
            gx = max(node.lo[0] - c[0], c[0] - node.hi[0], 0.0)
            gy = max(node.lo[1] - c[1], c[1] - node.hi[1], 0.0)
            gz = max(node.lo[2] - c[2], c[2] - node.hi[2], 0.0)
            if (gx * gx + gy * gy) + gz * gz > r2:
                continue
            if node.indices is not None:
                p = pts[node.indices]
                dx = p[:, 0] - c[0]
                dy = p[:, 1] - c[1]
                dz = p[:, 2] - c[2]
                d2 = (dx * dx + dy * dy) + dz * dz
                sel = node.indices[d2 <= r2]
                if sel.size:
                    hits.append(sel)
            else:
                stack.append(node.right)
                stack.append(node.left)
        if not hits:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(hits))


def build_kdtree(frame: Frame) -> KdTree:
    """Index a frame's point positions."""
    return KdTree(frame)


def radius_neighbors(tree: KdTree, center, radius: float) -> np.ndarray:
    """Inclusive ball query; see :meth:`KdTree.query_ball`."""
    return tree.query_ball(center, radius)
