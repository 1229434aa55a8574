"""Radar point and frame data model.

A 4D imaging radar reports one record per detection: Cartesian position,
radar cross-section, radial Doppler velocity, and the angular direction of
arrival. This module defines that record (:class:`RadarPoint`), the frame
container holding one scan's worth of detections (:class:`Frame`), and the
consistency checks tying the Cartesian and angular fields together.

Coordinate convention (sensor frame): x points along boresight, y left,
z up. Azimuth is measured in the x-y plane from +x toward +y; elevation
from the x-y plane toward +z. Angles are radians everywhere in memory;
degrees appear only at file boundaries (see :mod:`dustradar.frameio`).
Radial velocity is signed, positive = receding from the sensor.

Frames store their points as an immutable ``(n, 7)`` float64 array in the
column order ``x, y, z, rcs, v, azimuth, elevation``; the row index is the
point's identity for the rest of the processing chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    AngleRangeError,
    AngularMismatchError,
    NegativeRangeError,
    NonFiniteFieldError,
)

# Column layout of a frame's data array.
COL_X, COL_Y, COL_Z, COL_RCS, COL_V, COL_AZ, COL_EL = range(7)
N_COLS = 7
FIELD_NAMES = ("x", "y", "z", "rcs", "v", "azimuth", "elevation")

HALF_PI = math.pi / 2.0

#: Angular-consistency tolerance for ingested sensor data (radians). Real
#: sensors quantize angles (~1.4 deg resolution is typical), so stored and
#: recomputed angles disagree by rounding; 1e-4 rad tolerates that without
#: masking genuinely inconsistent records.
DEFAULT_ANGLE_TOL = 1e-4

#: Angular-consistency tolerance for simulator output, which derives angles
#: directly from the Cartesian fields.
SIM_ANGLE_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class RadarPoint:
    """One radar detection.

    Attributes:
        x, y, z: Cartesian position in the sensor frame (meters).
        rcs: Radar cross-section (dBsm).
        v: Radial velocity (m/s), signed, positive = receding.
        azimuth: Horizontal angle of arrival (radians, [-pi, pi]).
        elevation: Vertical angle of arrival (radians, [-pi/2, pi/2]).
    """

    x: float
    y: float
    z: float
    rcs: float
    v: float
    azimuth: float
    elevation: float

    @property
    def range(self) -> float:
        """Distance from the sensor (meters)."""
        return math.sqrt((self.x * self.x + self.y * self.y) + self.z * self.z)

    def as_row(self) -> np.ndarray:
        """The point as a length-7 float64 row (column order of FIELD_NAMES)."""
        return np.array(
            [self.x, self.y, self.z, self.rcs, self.v, self.azimuth, self.elevation],
            dtype=np.float64,
        )

    @classmethod
    def from_row(cls, row) -> "RadarPoint":
        x, y, z, rcs, v, az, el = (float(c) for c in row)
        return cls(x, y, z, rcs, v, az, el)


def angles_from_cartesian(x, y, z):
    """Azimuth and elevation implied by Cartesian coordinates.

    Accepts scalars or arrays; returns ``(azimuth, elevation)``. At the
    origin both angles degenerate to 0 (the atan2 convention).
    """
    az = np.arctan2(y, x)
    el = np.arctan2(z, np.sqrt(x * x + y * y))
    return az, el


def validate_point(point: RadarPoint, angle_tol: float = DEFAULT_ANGLE_TOL) -> None:
    """Check a point against its structural invariants.

    Raises the error for the first violated invariant, checked in order:
    field finiteness, angle ranges, then angular consistency between the
    stored angles and those implied by the Cartesian fields.

    The angular-consistency check is skipped where geometry makes the angle
    undefined: azimuth is unconstrained when x = y = 0, and elevation is
    additionally unconstrained at the exact origin.

    Args:
        point: The point to check.
        angle_tol: Allowed |stored - implied| angle difference (radians).

    Raises:
        NonFiniteFieldError, AngleRangeError, AngularMismatchError
    """
    for name in FIELD_NAMES:
        value = getattr(point, name)
        if not math.isfinite(value):
            raise NonFiniteFieldError(name, value)
    if not -math.pi <= point.azimuth <= math.pi:
        raise AngleRangeError("azimuth", point.azimuth, -math.pi, math.pi)
    if not -HALF_PI <= point.elevation <= HALF_PI:
        raise AngleRangeError("elevation", point.elevation, -HALF_PI, HALF_PI)

    horizontal = math.sqrt(point.x * point.x + point.y * point.y)
    if horizontal != 0.0:
        expected_az = math.atan2(point.y, point.x)
        if _angle_delta(expected_az, point.azimuth) > angle_tol:
            raise AngularMismatchError("azimuth", expected_az, point.azimuth, angle_tol)
    if horizontal != 0.0 or point.z != 0.0:
        expected_el = math.atan2(point.z, horizontal)
        if abs(expected_el - point.elevation) > angle_tol:
            raise AngularMismatchError(
                "elevation", expected_el, point.elevation, angle_tol
            )


def is_valid_point(point: RadarPoint, angle_tol: float = DEFAULT_ANGLE_TOL) -> bool:
    """True iff :func:`validate_point` accepts the point."""
    try:
        validate_point(point, angle_tol)
    except (NonFiniteFieldError, AngleRangeError, AngularMismatchError):
        return False
    return True


def _angle_delta(a: float, b: float) -> float:
    # Azimuth is circular at +-pi: atan2 may return pi where a file stored -pi.
    d = abs(a - b)
    return min(d, 2.0 * math.pi - d)


def from_spherical(
    range_m: float,
    azimuth: float,
    elevation: float,
    rcs: float = 0.0,
    v: float = 0.0,
) -> RadarPoint:
    """Build a point from spherical coordinates.

    x = r cos(el) cos(az), y = r cos(el) sin(az), z = r sin(el). The stored
    angular fields keep the inputs, so the result is self-consistent to
    float precision and passes :func:`validate_point` at the simulator
    tolerance.

    Raises:
        NegativeRangeError: If ``range_m`` < 0.
        AngleRangeError: If an angle is outside its legal range.
    """
    if not math.isfinite(range_m) or range_m < 0.0:
        raise NegativeRangeError(f"range must be finite and >= 0, got {range_m!r}")
    if not -math.pi <= azimuth <= math.pi:
        raise AngleRangeError("azimuth", azimuth, -math.pi, math.pi)
    if not -HALF_PI <= elevation <= HALF_PI:
        raise AngleRangeError("elevation", elevation, -HALF_PI, HALF_PI)
    cos_el = math.cos(elevation)
    return RadarPoint(
        x=range_m * cos_el * math.cos(azimuth),
        y=range_m * cos_el * math.sin(azimuth),
        z=range_m * math.sin(elevation),
        rcs=rcs,
        v=v,
        azimuth=azimuth,
        elevation=elevation,
    )


class Frame:
    """One radar scan: an ordered, immutable collection of points.

    Attributes:
        seq: Non-negative sequence id, strictly increasing along a stream.
        timestamp: Scan time in seconds, non-decreasing along a stream.
        data: Read-only ``(n, 7)`` float64 array; see module docstring for
            the column layout. Row order is the points' identity.
    """

    __slots__ = ("seq", "timestamp", "data")

    def __init__(self, seq: int, timestamp: float, data=None):
        if not isinstance(seq, (int, np.integer)) or isinstance(seq, bool) or seq < 0:
            raise ValueError(f"seq must be a non-negative integer, got {seq!r}")
        timestamp = float(timestamp)
        if not math.isfinite(timestamp):
            raise ValueError(f"timestamp must be finite, got {timestamp!r}")
        if data is None:
            data = np.empty((0, N_COLS), dtype=np.float64)
        else:
            data = np.array(data, dtype=np.float64, copy=True, ndmin=2)
            if data.size == 0:
                data = data.reshape(0, N_COLS)
        if data.ndim != 2 or data.shape[1] != N_COLS:
            raise ValueError(f"frame data must have shape (n, {N_COLS}), got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "seq", int(seq))
        object.__setattr__(self, "timestamp", timestamp)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Frame is immutable")

    @classmethod
    def from_points(
        cls, seq: int, timestamp: float, points: Iterable[RadarPoint]
    ) -> "Frame":
        rows = [p.as_row() for p in points]
        data = np.stack(rows) if rows else None
        return cls(seq, timestamp, data)

    def __len__(self) -> int:
        return self.data.shape[0]

    def __iter__(self) -> Iterator[RadarPoint]:
        for row in self.data:
            yield RadarPoint.from_row(row)

    def point(self, i: int) -> RadarPoint:
        """The i-th point as a :class:`RadarPoint`."""
        return RadarPoint.from_row(self.data[i])

    @property
    def positions(self) -> np.ndarray:
        """Read-only ``(n, 3)`` view of the Cartesian columns."""
        return self.data[:, COL_X : COL_Z + 1]

    def ranges(self) -> np.ndarray:
        """Per-point distance from the sensor (meters)."""
        x = self.data[:, COL_X]
        y = self.data[:, COL_Y]
        z = self.data[:, COL_Z]
        return np.sqrt((x * x + y * y) + z * z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.seq == other.seq
            and self.timestamp == other.timestamp
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.seq, self.timestamp, self.data.shape))

    def __repr__(self) -> str:
        return f"Frame(seq={self.seq}, timestamp={self.timestamp}, n={len(self)})"


def validate_frame(frame: Frame, angle_tol: float = DEFAULT_ANGLE_TOL) -> None:
    """Validate every point of a frame.

    Vectorized fast path; on failure the lowest offending point index is
    located and re-checked point-wise so the raised error names the first
    violated invariant for that point.

    Raises:
        PointValidationError: For the first invalid point (lowest index).
    """
    d = frame.data
    if d.shape[0] == 0:
        return
    x, y, z = d[:, COL_X], d[:, COL_Y], d[:, COL_Z]
    az, el = d[:, COL_AZ], d[:, COL_EL]
    bad = ~np.isfinite(d).all(axis=1)
    bad |= (az < -math.pi) | (az > math.pi)
    bad |= (el < -HALF_PI) | (el > HALF_PI)
    expected_az, expected_el = angles_from_cartesian(x, y, z)
    horizontal = (x != 0.0) | (y != 0.0)
    az_delta = np.abs(expected_az - az)
    az_delta = np.minimum(az_delta, 2.0 * math.pi - az_delta)
    bad |= horizontal & (az_delta > angle_tol)
    bad |= (horizontal | (z != 0.0)) & (np.abs(expected_el - el) > angle_tol)
    if bad.any():
        i = int(np.argmax(bad))
        validate_point(frame.point(i), angle_tol)
        raise AssertionError(
            f"frame {frame.seq}: point {i} flagged invalid by the vectorized "
            "check but passed the scalar check"
        )
