"""Point/frame data model: construction, validation, conversions."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dustradar.errors import (
    AngleRangeError,
    AngularMismatchError,
    NegativeRangeError,
    NonFiniteFieldError,
)
from dustradar.points import (
    DEFAULT_ANGLE_TOL,
    HALF_PI,
    N_COLS,
    SIM_ANGLE_TOL,
    Frame,
    RadarPoint,
    angles_from_cartesian,
    from_spherical,
    is_valid_point,
    validate_frame,
    validate_point,
)

from oracles import random_point_rows


def _point(**overrides) -> RadarPoint:
    base = dict(x=3.0, y=1.0, z=0.5, rcs=-5.0, v=1.2)
    base.update(overrides)
    if "azimuth" not in base or "elevation" not in base:
        az, el = angles_from_cartesian(base["x"], base["y"], base["z"])
        base.setdefault("azimuth", float(az))
        base.setdefault("elevation", float(el))
    return RadarPoint(**base)


class TestRadarPoint:
    def test_range_matches_euclidean_norm(self):
        p = _point(x=3.0, y=4.0, z=0.0)
        assert p.range == 5.0

    def test_row_round_trip(self):
        p = _point()
        assert RadarPoint.from_row(p.as_row()) == p

    def test_valid_point_accepted(self):
        validate_point(_point(), SIM_ANGLE_TOL)

    def test_nonfinite_field_reports_first_bad_field(self):
        with pytest.raises(NonFiniteFieldError) as err:
            validate_point(_point(rcs=math.nan))
        assert err.value.field == "rcs"

    def test_azimuth_out_of_range(self):
        with pytest.raises(AngleRangeError):
            validate_point(_point(azimuth=3.5))

    def test_elevation_out_of_range(self):
        with pytest.raises(AngleRangeError):
            validate_point(_point(elevation=HALF_PI + 0.01))

    def test_inconsistent_azimuth_rejected(self):
        p = _point()
        bad = RadarPoint(p.x, p.y, p.z, p.rcs, p.v, p.azimuth + 0.01, p.elevation)
        with pytest.raises(AngularMismatchError) as err:
            validate_point(bad)
        assert err.value.field == "azimuth"

    def test_azimuth_wraparound_is_consistent(self):
        # atan2 returns +pi for (-1, +0); a stored -pi means the same ray.
        p = RadarPoint(-2.0, 0.0, 0.0, 0.0, 0.0, -math.pi, 0.0)
        validate_point(p, DEFAULT_ANGLE_TOL)

    def test_azimuth_unconstrained_on_vertical_axis(self):
        # x = y = 0 makes azimuth geometrically meaningless.
        p = RadarPoint(0.0, 0.0, 2.0, 0.0, 0.0, 1.234, HALF_PI)
        validate_point(p, SIM_ANGLE_TOL)

    def test_elevation_still_checked_on_vertical_axis(self):
        p = RadarPoint(0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.3)
        with pytest.raises(AngularMismatchError):
            validate_point(p)

    def test_origin_point_is_valid_with_any_angles(self):
        p = RadarPoint(0.0, 0.0, 0.0, -10.0, 0.0, 0.7, -0.2)
        validate_point(p, SIM_ANGLE_TOL)

    def test_is_valid_point(self):
        assert is_valid_point(_point())
        assert not is_valid_point(_point(x=math.inf))


class TestFromSpherical:
    def test_boresight(self):
        p = from_spherical(5.0, 0.0, 0.0)
        assert (p.x, p.y, p.z) == (5.0, 0.0, 0.0)

    def test_negative_range_rejected(self):
        with pytest.raises(NegativeRangeError):
            from_spherical(-1.0, 0.0, 0.0)

    def test_angle_bounds_enforced(self):
        with pytest.raises(AngleRangeError):
            from_spherical(1.0, 4.0, 0.0)
        with pytest.raises(AngleRangeError):
            from_spherical(1.0, 0.0, 2.0)

    def test_zero_range_any_direction(self):
        p = from_spherical(0.0, 0.3, -0.2)
        assert (p.x, p.y, p.z) == (0.0, 0.0, 0.0)
        validate_point(p, SIM_ANGLE_TOL)

    @given(
        r=st.floats(1e-3, 100.0),
        az=st.floats(-math.pi, math.pi),
        el=st.floats(-HALF_PI, HALF_PI),
    )
    def test_self_consistency_property(self, r, az, el):
        p = from_spherical(r, az, el, rcs=1.0, v=0.5)
        validate_point(p, 1e-6)
        assert p.range == pytest.approx(r, abs=1e-9, rel=1e-12)


class TestFrame:
    def test_empty_frame(self):
        f = Frame(0, 0.0)
        assert len(f) == 0
        assert f.data.shape == (0, N_COLS)
        assert list(f) == []

    def test_empty_list_data(self):
        f = Frame(0, 0.0, [])
        assert f.data.shape == (0, N_COLS)

    def test_from_points_round_trip(self):
        pts = [_point(), _point(x=1.0, y=-2.0, z=0.2)]
        f = Frame.from_points(3, 0.3, pts)
        assert [f.point(0), f.point(1)] == pts
        assert list(f) == pts

    def test_attributes_immutable(self):
        f = Frame(1, 0.1)
        with pytest.raises(AttributeError):
            f.seq = 2

    def test_data_not_writable(self):
        f = Frame.from_points(0, 0.0, [_point()])
        with pytest.raises(ValueError):
            f.data[0, 0] = 9.0

    def test_constructor_copies_input(self):
        rows = random_point_rows(np.random.default_rng(0), 4)
        f = Frame(0, 0.0, rows)
        rows[0, 0] = 999.0
        assert f.data[0, 0] != 999.0

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            Frame(0, 0.0, np.zeros((3, 4)))

    def test_bad_seq_rejected(self):
        with pytest.raises(ValueError):
            Frame(-1, 0.0)
        with pytest.raises(ValueError):
            Frame(True, 0.0)

    def test_positions_view(self):
        f = Frame.from_points(0, 0.0, [_point(x=1.0, y=2.0, z=3.0)])
        assert f.positions.tolist() == [[1.0, 2.0, 3.0]]

    def test_ranges_fixed_association(self):
        rng = np.random.default_rng(7)
        rows = random_point_rows(rng, 64)
        f = Frame(0, 0.0, rows)
        x, y, z = rows[:, 0], rows[:, 1], rows[:, 2]
        expected = np.sqrt((x * x + y * y) + z * z)
        assert np.array_equal(f.ranges(), expected)

    def test_equality(self):
        rows = random_point_rows(np.random.default_rng(1), 3)
        assert Frame(0, 0.0, rows) == Frame(0, 0.0, rows)
        assert Frame(0, 0.0, rows) != Frame(1, 0.0, rows)


class TestValidateFrame:
    def test_valid_random_frame(self):
        rows = random_point_rows(np.random.default_rng(2), 256)
        validate_frame(Frame(0, 0.0, rows), DEFAULT_ANGLE_TOL)

    def test_reports_first_bad_point(self):
        rows = random_point_rows(np.random.default_rng(3), 16)
        rows[10, 5] += 0.5  # corrupt azimuth of point 10
        rows[12, 3] = math.nan  # and rcs of point 12
        with pytest.raises(AngularMismatchError):
            validate_frame(Frame(0, 0.0, rows))

    def test_matches_scalar_validation(self):
        rng = np.random.default_rng(4)
        rows = random_point_rows(rng, 128)
        corrupt = rng.random(128) < 0.1
        rows[corrupt, 6] += 0.3
        f = Frame(0, 0.0, rows)
        scalar_ok = all(is_valid_point(p) for p in f)
        try:
            validate_frame(f)
            vector_ok = True
        except AngularMismatchError:
            vector_ok = False
        assert vector_ok == scalar_ok
