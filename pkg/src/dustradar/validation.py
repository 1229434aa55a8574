"""Input-validation helpers shared by the estimator API and the functions.

These keep argument checking consistent: estimators and plain functions
alike accept either a :class:`~dustradar.points.Frame` or a bare position
array where that makes sense, and reject malformed parameters with the
package's error types.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import MemberIndexError, MinClusterSizeError, NegativeRadiusError
from .points import Frame


def check_radius(radius: float) -> float:
    """Validate a spatial radius (finite, >= 0) and return it as float."""
    radius = float(radius)
    if not math.isfinite(radius) or radius < 0.0:
        raise NegativeRadiusError(f"radius must be finite and >= 0, got {radius!r}")
    return radius


def check_min_cluster_size(min_cluster_size: int) -> int:
    """Validate a cluster-size floor (integer >= 1) and return it as int."""
    size = int(min_cluster_size)
    if size != min_cluster_size or size < 1:
        raise MinClusterSizeError(
            f"min_cluster_size must be an integer >= 1, got {min_cluster_size!r}"
        )
    return size


def as_positions(X) -> np.ndarray:
    """Coerce a Frame or array-like into an ``(n, 3)`` float64 position array."""
    if isinstance(X, Frame):
        return X.positions
    pos = np.asarray(X, dtype=np.float64)
    if pos.size == 0:
        return pos.reshape(0, 3)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ValueError(f"expected positions of shape (n, 3), got {pos.shape}")
    if not np.isfinite(pos).all():
        raise ValueError("positions contain NaN or infinite values")
    return pos


def check_members(frame: Frame, members) -> np.ndarray:
    """Validate cluster member indices against a frame.

    Returns the indices as an int64 array. Raises
    :class:`~dustradar.errors.MemberIndexError` on out-of-range or negative
    indices; emptiness is the caller's concern.
    """
    idx = np.asarray(members, dtype=np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= len(frame)):
        raise MemberIndexError(
            f"member indices out of range for frame of {len(frame)} points"
        )
    return idx
