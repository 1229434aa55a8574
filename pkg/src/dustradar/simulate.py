"""Synthetic dusty-room radar scenes with per-point ground truth.

Generates frame streams mimicking an enclosed reflective environment: a
box-shaped room observed by a sensor on one wall, walkers sampled as
vertical capsules of points, first-order multipath ghosts mirrored across
reflective planes, airborne dust as volumetric low-RCS speckle whose rate
grows with a discrete dust level, and static high-RCS structure returns
on the walls and ceiling. Every emitted point carries exactly one
provenance label, which is what end-to-end evaluation matches against.

Determinism: one stream draws all randomness from a single
``numpy.random.Generator`` running the PCG64 bit generator, seeded from
the scene spec, so identical (spec, seed) pairs produce bit-identical
streams on any platform.

Coordinates: the room frame has x along the sensor boresight, y centered
on the room's width, z up from the floor; emitted points are expressed in
the sensor frame (room frame translated by the sensor position).

The dust-level scale is a stand-in with no physical units: each level
just selects a points-per-frame rate, chosen so raw counts rise steeply
across levels.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .points import (
    COL_AZ,
    COL_EL,
    COL_RCS,
    COL_V,
    HALF_PI,
    N_COLS,
    Frame,
    RadarPoint,
    angles_from_cartesian,
)

LABEL_GHOST = "ghost"
LABEL_DUST = "dust"
LABEL_STRUCTURE = "structure"
PEDESTRIAN_LABEL_PREFIX = "pedestrian"

#: Mirror-plane names resolvable against a room box.
PLANE_NAMES = ("near", "far", "left", "right", "floor", "ceiling")


def pedestrian_label(index: int) -> str:
    """Provenance label of the index-th pedestrian ("pedestrian:0", ...)."""
    return f"{PEDESTRIAN_LABEL_PREFIX}:{index}"


def is_pedestrian_label(label: str) -> bool:
    return label.split(":", 1)[0] == PEDESTRIAN_LABEL_PREFIX


def _require(cond: bool, detail: str) -> None:
    if not cond:
        raise InvalidSpecError(detail)


def _finite(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True)
class RoomSpec:
    """Axis-aligned room box: x in [0, length], y centered, z from floor."""

    length_x: float  # m, along boresight
    width_y: float  # m, centered on y = 0
    height_z: float  # m, floor at z = 0

    def __post_init__(self):
        for name in ("length_x", "width_y", "height_z"):
            v = getattr(self, name)
            _require(_finite(v) and v > 0, f"room.{name} must be > 0, got {v!r}")

    def plane(self, name: str) -> tuple[int, float]:
        """(axis, offset) of a named wall plane, room frame."""
        table = {
            "near": (0, 0.0),
            "far": (0, self.length_x),
            "left": (1, -self.width_y / 2.0),
            "right": (1, self.width_y / 2.0),
            "floor": (2, 0.0),
            "ceiling": (2, self.height_z),
        }
        if name not in table:
            raise InvalidSpecError(
                f"unknown plane {name!r} (expected one of {', '.join(PLANE_NAMES)})"
            )
        return table[name]


@dataclass(frozen=True)
class SensorSpec:
    """Sensor pose (room frame) and angular coverage (half-angles)."""

    x: float  # m
    y: float  # m
    z: float  # m above the floor
    fov_az: float  # rad, half-angle
    fov_el: float  # rad, half-angle

    def __post_init__(self):
        for name in ("x", "y", "z"):
            _require(_finite(getattr(self, name)), f"sensor.{name} must be finite")
        for name in ("fov_az", "fov_el"):
            v = getattr(self, name)
            _require(_finite(v) and 0 < v <= HALF_PI, f"sensor.{name} must be in (0, pi/2]")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


@dataclass(frozen=True)
class PedestrianSpec:
    """One walker: a capsule of scattering points following a waypoint path.

    The walker ping-pongs along its waypoints at constant speed. With one
    waypoint or zero speed it stands still.

    Attributes:
        waypoints: ((x, y), ...) path vertices, room frame, meters.
        speed: Walking speed, m/s.
        height: Body height, meters.
        radius: Capsule radius, meters; also the top-cap shrink scale.
        points_per_frame: Returns sampled from the body each frame.
        rcs_mean: Body RCS distribution mean, dBsm.
        rcs_sigma: Body RCS distribution standard deviation, dBsm.
    """

    waypoints: tuple[tuple[float, float], ...]
    speed: float
    height: float
    radius: float
    points_per_frame: int
    rcs_mean: float
    rcs_sigma: float

    def __post_init__(self):
        wps = tuple((float(x), float(y)) for x, y in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        _require(len(wps) >= 1, "pedestrian needs at least one waypoint")
        _require(all(_finite(c) for xy in wps for c in xy), "waypoints must be finite")
        _require(_finite(self.speed) and self.speed >= 0, "pedestrian speed must be >= 0")
        _require(_finite(self.height) and self.height > 0, "pedestrian height must be > 0")
        _require(
            _finite(self.radius) and 0 < self.radius <= self.height / 2.0,
            "pedestrian radius must be in (0, height/2]",
        )
        _require(
            isinstance(self.points_per_frame, int) and self.points_per_frame >= 0,
            "points_per_frame must be an integer >= 0",
        )
        _require(_finite(self.rcs_mean), "rcs_mean must be finite")
        _require(_finite(self.rcs_sigma) and self.rcs_sigma >= 0, "rcs_sigma must be >= 0")


@dataclass(frozen=True)
class DustSpec:
    """Volumetric speckle: rate per dust level, low RCS, near-zero Doppler."""

    rates: tuple[int, ...]  # points/frame, indexed by dust_level
    rcs_mean: float  # dBsm
    rcs_sigma: float  # dBsm
    v_max: float  # m/s, |v| bound

    def __post_init__(self):
        rates = tuple(int(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        _require(len(rates) >= 1, "dust.rates must be non-empty")
        _require(all(r >= 0 for r in rates), "dust rates must be >= 0")
        _require(
            all(a <= b for a, b in zip(rates, rates[1:])),
            "dust rates must be non-decreasing in dust level",
        )
        _require(_finite(self.rcs_mean), "dust.rcs_mean must be finite")
        _require(_finite(self.rcs_sigma) and self.rcs_sigma >= 0, "dust.rcs_sigma must be >= 0")
        _require(_finite(self.v_max) and self.v_max >= 0, "dust.v_max must be >= 0")


@dataclass(frozen=True)
class GhostSpec:
    """First-order multipath model: mirror body points across room planes."""

    enabled: bool
    planes: tuple[str, ...]
    gain_db: float  # added to each ghost's RCS

    def __post_init__(self):
        planes = tuple(str(p) for p in self.planes)
        object.__setattr__(self, "planes", planes)
        for p in planes:
            _require(p in PLANE_NAMES, f"unknown ghost plane {p!r}")
        _require(len(set(planes)) == len(planes), "ghost planes must be unique")
        _require(_finite(self.gain_db), "ghost gain_db must be finite")


@dataclass(frozen=True)
class StructureSpec:
    """Static returns from the room fabric (ceiling reflectors, walls)."""

    enabled: bool
    points_per_frame: int
    rcs_mean: float  # dBsm
    rcs_sigma: float  # dBsm

    def __post_init__(self):
        _require(
            isinstance(self.points_per_frame, int) and self.points_per_frame >= 0,
            "structure.points_per_frame must be an integer >= 0",
        )
        _require(_finite(self.rcs_mean), "structure.rcs_mean must be finite")
        _require(
            _finite(self.rcs_sigma) and self.rcs_sigma >= 0,
            "structure.rcs_sigma must be >= 0",
        )


@dataclass(frozen=True)
class SceneSpec:
    """Complete description of one synthetic scene stream."""

    room: RoomSpec
    sensor: SensorSpec
    pedestrians: tuple[PedestrianSpec, ...]
    dust: DustSpec
    ghosts: GhostSpec
    structure: StructureSpec
    velocity_jitter: float  # m/s, uniform [-j, +j] added to body Doppler
    frame_rate: float  # Hz
    frame_count: int
    dust_level: int
    rng_seed: int

    def __post_init__(self):
        object.__setattr__(self, "pedestrians", tuple(self.pedestrians))
        _require(
            _finite(self.velocity_jitter) and self.velocity_jitter >= 0,
            "velocity_jitter must be >= 0",
        )
        _require(_finite(self.frame_rate) and self.frame_rate > 0, "frame_rate must be > 0")
        _require(
            isinstance(self.frame_count, int) and self.frame_count >= 1,
            "frame_count must be an integer >= 1",
        )
        _require(
            isinstance(self.dust_level, int)
            and 0 <= self.dust_level < len(self.dust.rates),
            f"dust_level must index dust.rates (0..{len(self.dust.rates) - 1})",
        )
        _require(isinstance(self.rng_seed, int), "rng_seed must be an integer")
        _require(
            0.0 <= self.sensor.z <= self.room.height_z,
            "sensor must sit between floor and ceiling",
        )

    @property
    def max_dust_level(self) -> int:
        return len(self.dust.rates) - 1


@dataclass(frozen=True)
class GroundTruth:
    """Per-frame provenance: one label per emitted point, plus true walkers.

    ``true_positions`` are body centers in the sensor frame, one per
    pedestrian currently inside the sensor field of view; ``true_count``
    is their number.
    """

    seq: int
    dust_level: int
    labels: tuple[str, ...]
    true_count: int
    true_positions: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class ReflectivePlane:
    """Axis-aligned mirror plane, sensor frame."""

    name: str
    axis: int  # 0 = x, 1 = y, 2 = z
    offset: float  # m, plane coordinate along axis


def sensor_plane(spec: SceneSpec, name: str) -> ReflectivePlane:
    """Resolve a named room plane into sensor-frame coordinates."""
    axis, offset = spec.room.plane(name)
    return ReflectivePlane(name, axis, offset - spec.sensor.position[axis])


def _mirror_rows(rows: np.ndarray, plane: ReflectivePlane, gain_db: float) -> np.ndarray:
    """Mirror point rows across a plane; the vectorized ghost kernel.

    Positions reflect across the plane, RCS gains ``gain_db``, angles are
    recomputed from the reflected position, and the Doppler magnitude is
    preserved with its sign set by whether the mirrored source direction
    still aligns with the ghost's line of sight (exact for targets moving
    radially; the bounced path lengthens iff the direct one does).
    """
    out = rows.copy()
    out[:, plane.axis] = 2.0 * plane.offset - rows[:, plane.axis]
    out[:, COL_RCS] = rows[:, COL_RCS] + gain_db
    mirrored_dir = rows[:, :3].copy()
    mirrored_dir[:, plane.axis] = -mirrored_dir[:, plane.axis]
    align = np.einsum("ij,ij->i", mirrored_dir, out[:, :3])
    out[:, COL_V] = np.where(align < 0.0, -rows[:, COL_V], rows[:, COL_V])
    az, el = angles_from_cartesian(out[:, 0], out[:, 1], out[:, 2])
    out[:, COL_AZ] = az
    out[:, COL_EL] = el
    return out


def mirror_ghost(point: RadarPoint, plane: ReflectivePlane, gain_db: float) -> RadarPoint:
    """First-order multipath image of one point.

    The reflected position is the mirror image across the plane; its
    angles are recomputed from that position (and routinely land outside
    the physical field of view, which is what makes ghosts filterable).
    Reflecting twice across the same plane with zero gain returns the
    original point.
    """
    rows = _mirror_rows(point.as_row()[np.newaxis, :], plane, gain_db)
    return RadarPoint.from_row(rows[0])


def _path_segments(waypoints) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Non-degenerate path segments as (starts, deltas, cumulative lengths)."""
    pts = np.asarray(waypoints, dtype=np.float64)
    deltas = np.diff(pts, axis=0)
    lengths = np.hypot(deltas[:, 0], deltas[:, 1])
    keep = lengths > 0.0
    starts, deltas, lengths = pts[:-1][keep], deltas[keep], lengths[keep]
    return starts, deltas, np.concatenate([[0.0], np.cumsum(lengths)])


def _walker_state(ped: PedestrianSpec, t: float) -> tuple[float, float, float, float]:
    """Walker center (cx, cy) and velocity (wx, wy) at time t, room frame."""
    starts, deltas, cum = _path_segments(ped.waypoints)
    total = cum[-1]
    if ped.speed == 0.0 or total == 0.0:
        x0, y0 = ped.waypoints[0]
        return x0, y0, 0.0, 0.0
    cycle = math.fmod(ped.speed * t, 2.0 * total)
    forward = cycle <= total
    s = cycle if forward else 2.0 * total - cycle
    i = min(int(np.searchsorted(cum, s, side="right")) - 1, len(deltas) - 1)
    frac = (s - cum[i]) / (cum[i + 1] - cum[i])
    cx, cy = starts[i] + frac * deltas[i]
    seg_len = cum[i + 1] - cum[i]
    sign = 1.0 if forward else -1.0
    wx = sign * ped.speed * deltas[i, 0] / seg_len
    wy = sign * ped.speed * deltas[i, 1] / seg_len
    return float(cx), float(cy), wx, wy


def _finish_rows(pos: np.ndarray, rcs: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Assemble (n, 7) rows from sensor-frame positions and scalars."""
    az, el = angles_from_cartesian(pos[:, 0], pos[:, 1], pos[:, 2])
    return np.column_stack([pos, rcs, v, az, el])


def _sample_body(
    rng: np.random.Generator,
    spec: SceneSpec,
    ped: PedestrianSpec,
    cx: float,
    cy: float,
    wx: float,
    wy: float,
) -> np.ndarray:
    """Sample one walker's returns: capsule points with projected Doppler."""
    n = ped.points_per_frame
    if n == 0:
        return np.empty((0, N_COLS), dtype=np.float64)
    # Stratified in z so the body always spans its full height, which keeps
    # the cluster's vertical extent stable frame to frame.
    z = (np.arange(n) + rng.uniform(0.0, 1.0, n)) / n * ped.height
    cap_base = ped.height - ped.radius
    r_eff = np.where(
        z > cap_base,
        np.sqrt(np.maximum(ped.radius**2 - (z - cap_base) ** 2, 0.0)),
        ped.radius,
    )
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    rho = r_eff * np.sqrt(rng.uniform(0.0, 1.0, n))
    room_pos = np.column_stack([cx + rho * np.cos(theta), cy + rho * np.sin(theta), z])
    pos = room_pos - spec.sensor.position
    rcs = rng.normal(ped.rcs_mean, ped.rcs_sigma, n)
    norms = np.sqrt(np.einsum("ij,ij->i", pos, pos))
    norms = np.where(norms > 0.0, norms, 1.0)
    v = (pos[:, 0] * wx + pos[:, 1] * wy) / norms
    if spec.velocity_jitter > 0.0:
        v = v + rng.uniform(-spec.velocity_jitter, spec.velocity_jitter, n)
    return _finish_rows(pos, rcs, v)


def _sample_structure(rng: np.random.Generator, spec: SceneSpec) -> np.ndarray:
    """Static room-fabric returns on the ceiling, side walls, and far wall."""
    n = spec.structure.points_per_frame if spec.structure.enabled else 0
    if n == 0:
        return np.empty((0, N_COLS), dtype=np.float64)
    room = spec.room
    surface = rng.choice(4, size=n, p=[0.5, 0.2, 0.2, 0.1])
    u1 = rng.uniform(0.0, 1.0, n)
    u2 = rng.uniform(0.0, 1.0, n)
    room_pos = np.empty((n, 3), dtype=np.float64)
    ceiling, left, right, far = (surface == k for k in range(4))
    room_pos[ceiling] = np.column_stack(
        [
            u1[ceiling] * room.length_x,
            (u2[ceiling] - 0.5) * room.width_y,
            np.full(int(ceiling.sum()), room.height_z),
        ]
    )
    for mask, y_side in ((left, -0.5), (right, 0.5)):
        room_pos[mask] = np.column_stack(
            [
                u1[mask] * room.length_x,
                np.full(int(mask.sum()), y_side * room.width_y),
                u2[mask] * room.height_z,
            ]
        )
    room_pos[far] = np.column_stack(
        [
            np.full(int(far.sum()), room.length_x),
            (u1[far] - 0.5) * room.width_y,
            u2[far] * room.height_z,
        ]
    )
    pos = room_pos - spec.sensor.position
    rcs = rng.normal(spec.structure.rcs_mean, spec.structure.rcs_sigma, n)
    return _finish_rows(pos, rcs, np.zeros(n))


def _sample_dust(rng: np.random.Generator, spec: SceneSpec) -> np.ndarray:
    """Uniform speckle throughout the room volume; count is exact per level."""
    n = spec.dust.rates[spec.dust_level]
    if n == 0:
        return np.empty((0, N_COLS), dtype=np.float64)
    room = spec.room
    lo = np.array([0.0, -room.width_y / 2.0, 0.0])
    hi = np.array([room.length_x, room.width_y / 2.0, room.height_z])
    room_pos = rng.uniform(lo, hi, (n, 3))
    pos = room_pos - spec.sensor.position
    rcs = rng.normal(spec.dust.rcs_mean, spec.dust.rcs_sigma, n)
    v = rng.uniform(-spec.dust.v_max, spec.dust.v_max, n)
    return _finish_rows(pos, rcs, v)


def _in_fov(spec: SceneSpec, x: float, y: float, z: float) -> bool:
    az, el = angles_from_cartesian(x, y, z)
    return abs(az) <= spec.sensor.fov_az and abs(el) <= spec.sensor.fov_el


def simulate(spec: SceneSpec) -> Iterator[tuple[Frame, GroundTruth]]:
    """Generate the scene's frame stream lazily.

    Draw order per frame is fixed (walkers in list order, then structure,
    then dust; ghosts are derived, not drawn), so streams are reproducible
    bit for bit from (spec, rng_seed).

    Yields:
        (frame, ground_truth) pairs with seq starting at 0 and
        ``timestamp = seq / frame_rate``.
    """
    rng = np.random.Generator(np.random.PCG64(spec.rng_seed))
    planes = [sensor_plane(spec, name) for name in spec.ghosts.planes]
    for seq in range(spec.frame_count):
        t = seq / spec.frame_rate
        parts: list[np.ndarray] = []
        labels: list[str] = []
        body_rows: list[np.ndarray] = []
        true_positions: list[tuple[float, float, float]] = []
        for pid, ped in enumerate(spec.pedestrians):
            cx, cy, wx, wy = _walker_state(ped, t)
            rows = _sample_body(rng, spec, ped, cx, cy, wx, wy)
            body_rows.append(rows)
            parts.append(rows)
            labels.extend([pedestrian_label(pid)] * rows.shape[0])
            center = (
                cx - spec.sensor.x,
                cy - spec.sensor.y,
                ped.height / 2.0 - spec.sensor.z,
            )
            if _in_fov(spec, *center):
                true_positions.append(center)
        if spec.ghosts.enabled:
            for plane in planes:
                for rows in body_rows:
                    ghost = _mirror_rows(rows, plane, spec.ghosts.gain_db)
                    parts.append(ghost)
                    labels.extend([LABEL_GHOST] * ghost.shape[0])
        rows = _sample_structure(rng, spec)
        parts.append(rows)
        labels.extend([LABEL_STRUCTURE] * rows.shape[0])
        rows = _sample_dust(rng, spec)
        parts.append(rows)
        labels.extend([LABEL_DUST] * rows.shape[0])
        data = np.vstack(parts) if parts else np.empty((0, N_COLS))
        frame = Frame(seq, t, data)
        truth = GroundTruth(
            seq=seq,
            dust_level=spec.dust_level,
            labels=tuple(labels),
            true_count=len(true_positions),
            true_positions=tuple(true_positions),
        )
        yield frame, truth
