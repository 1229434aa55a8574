"""Euclidean connected-component clustering over a filtered frame.

Two points are neighbors when their Euclidean distance is <= the cluster
radius; clusters are exactly the connected components of that neighbor
graph, extracted by breadth-first expansion over KD-tree ball queries.
Components smaller than ``min_cluster_size`` stay unclustered (label -1),
which suppresses residual speckle that survived filtering.

Output is deterministic: cluster ids are assigned in order of each
component's lowest member index, and members are listed ascending.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .kdtree import KdTree, build_kdtree, radius_neighbors  # noqa: F401  (re-export)
from .points import Frame
from .validation import as_positions, check_min_cluster_size, check_radius

#: Label used for points that belong to no (sufficiently large) cluster.
UNCLUSTERED = -1


@dataclass(frozen=True)
class Clustering:
    """A partition of a frame's points into Euclidean clusters.

    Attributes:
        labels: ``(n,)`` int64 array; cluster id per point, or
            :data:`UNCLUSTERED` (-1).
        clusters: Tuple of member-index arrays, one per cluster, ids in
            order of lowest member index, members ascending.
    """

    labels: np.ndarray
    clusters: tuple[np.ndarray, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def sizes(self) -> np.ndarray:
        return np.array([m.size for m in self.clusters], dtype=np.int64)


def extract_clusters(
    frame_or_positions,
    tree: KdTree | None = None,
    radius: float = 0.5,
    min_cluster_size: int = 1,
) -> Clustering:
    """Extract Euclidean connected components.

    Args:
        frame_or_positions: The frame (or bare ``(n, 3)`` positions) the
            tree indexes.
        tree: Prebuilt KD-tree over the same points; built here if None.
        radius: Neighbor distance ``d`` (inclusive boundary).
        min_cluster_size: Components smaller than this stay unclustered.

    Returns:
        The deterministic :class:`Clustering` partition.
    """
    radius = check_radius(radius)
    min_cluster_size = check_min_cluster_size(min_cluster_size)
    pts = as_positions(frame_or_positions)
    if tree is None:
        tree = KdTree(pts)
    n = pts.shape[0]
    labels = np.full(n, UNCLUSTERED, dtype=np.int64)
    clusters: list[np.ndarray] = []
    visited = np.zeros(n, dtype=bool)
    queue: deque[int] = deque()
    for seed in range(n):
        if visited[seed]:
            continue
        visited[seed] = True
        queue.append(seed)
        component: list[int] = []
        while queue:
            j = queue.popleft()
            component.append(j)
            for nb in tree.query_ball(pts[j], radius):
                if not visited[nb]:
                    visited[nb] = True
                    queue.append(int(nb))
        if len(component) >= min_cluster_size:
            members = np.array(sorted(component), dtype=np.int64)
            labels[members] = len(clusters)
            clusters.append(members)
    return Clustering(labels=labels, clusters=tuple(clusters))


class EuclideanClusterer(ClusterMixin, BaseEstimator):
    """Estimator-style connected-component clustering.

    ``fit`` accepts a :class:`~dustradar.points.Frame` or an ``(n, 3)``
    position array and exposes the partition through the usual fitted
    attributes, so the clusterer drops into code written for other
    fit/predict cluster estimators.

    Args:
        radius: Neighbor distance; ``None`` selects the packaged default.
        min_cluster_size: Component-size floor; ``None`` selects the
            packaged default.

    Attributes:
        labels_: Cluster id per point (-1 = unclustered).
        clustering_: The full :class:`Clustering`.
        tree_: The KD-tree built over the inputs.
        n_clusters_: Number of clusters found.
    """

    def __init__(
        self,
        radius: float | None = None,
        min_cluster_size: int | None = None,
    ):
        self.radius = radius
        self.min_cluster_size = min_cluster_size

    def _resolved(self) -> tuple[float, int]:
        radius, min_size = self.radius, self.min_cluster_size
        if radius is None or min_size is None:
            from .config import default_pipeline_config

            defaults = default_pipeline_config().cluster
            radius = defaults.radius if radius is None else radius
            min_size = defaults.min_cluster_size if min_size is None else min_size
        return check_radius(radius), check_min_cluster_size(min_size)

    def fit(self, X, y=None) -> "EuclideanClusterer":
        radius, min_size = self._resolved()
        pts = as_positions(X)
        self.tree_ = KdTree(pts)
        self.clustering_ = extract_clusters(
            pts, self.tree_, radius=radius, min_cluster_size=min_size
        )
        self.labels_ = self.clustering_.labels
        self.n_clusters_ = self.clustering_.n_clusters
        return self
