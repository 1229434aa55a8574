"""KD-tree construction determinism and radius queries vs a linear scan."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dustradar.errors import NegativeRadiusError
from dustradar.kdtree import KdTree, build_kdtree, radius_neighbors
from dustradar.points import Frame

from oracles import linear_scan_ball, random_point_rows


def _cloud(rng, n, scale=10.0):
    return rng.uniform(-scale, scale, (n, 3))


class TestConstruction:
    def test_empty_tree(self):
        t = KdTree(np.empty((0, 3)))
        assert len(t) == 0
        assert t.query_ball(np.zeros(3), 1.0).size == 0

    def test_single_point(self):
        t = KdTree(np.array([[1.0, 2.0, 3.0]]))
        assert t.query_ball(np.array([1.0, 2.0, 3.0]), 0.0).tolist() == [0]

    def test_duplicate_points_all_reported(self):
        pts = np.zeros((5, 3))
        t = KdTree(pts)
        assert t.query_ball(np.zeros(3), 0.0).tolist() == [0, 1, 2, 3, 4]

    def test_from_frame_positions(self):
        rows = random_point_rows(np.random.default_rng(0), 40)
        frame = Frame(0, 0.0, rows)
        t = build_kdtree(frame)
        hits = t.query_ball(rows[0, :3], 1.0)
        assert 0 in hits

    def test_deterministic_across_builds(self):
        pts = _cloud(np.random.default_rng(1), 500)
        a, b = KdTree(pts), KdTree(pts)

        def shape(node):
            if node is None:
                return None
            if node.indices is not None:
                return tuple(node.indices.tolist())
            return (node.lo.tolist(), node.hi.tolist(),
                    shape(node.left), shape(node.right))

        assert shape(a._root) == shape(b._root)

    def test_tie_heavy_input_deterministic(self):
        # Many identical coordinates force the index tie-break everywhere.
        rng = np.random.default_rng(8)
        pts = rng.integers(0, 3, (200, 3)).astype(np.float64)
        a, b = KdTree(pts, leaf_size=2), KdTree(pts, leaf_size=2)
        for _ in range(20):
            c = rng.uniform(-0.5, 2.5, 3)
            np.testing.assert_array_equal(a.query_ball(c, 1.0),
                                          b.query_ball(c, 1.0))
            np.testing.assert_array_equal(a.query_ball(c, 1.0),
                                          linear_scan_ball(pts, c, 1.0))

    def test_leaf_size_one(self):
        pts = _cloud(np.random.default_rng(2), 64)
        t = KdTree(pts, leaf_size=1)
        center = pts[10]
        np.testing.assert_array_equal(t.query_ball(center, 3.0),
                                      linear_scan_ball(pts, center, 3.0))


class TestQueryBall:
    def test_negative_radius_rejected(self):
        t = KdTree(_cloud(np.random.default_rng(3), 10))
        with pytest.raises(NegativeRadiusError):
            t.query_ball(np.zeros(3), -0.5)

    def test_radius_boundary_inclusive(self):
        pts = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
        t = KdTree(pts)
        assert t.query_ball(np.zeros(3), 5.0).tolist() == [0, 1]
        assert t.query_ball(np.zeros(3), np.nextafter(5.0, 0.0)).tolist() == [0]

    def test_results_sorted_int64(self):
        pts = _cloud(np.random.default_rng(4), 300)
        hits = KdTree(pts).query_ball(np.zeros(3), 8.0)
        assert hits.dtype == np.int64
        assert np.all(np.diff(hits) > 0)

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("leaf_size", [1, 4, 16, 64])
    def test_matches_linear_scan(self, seed, leaf_size):
        rng = np.random.default_rng(seed)
        pts = _cloud(rng, 400, scale=5.0)
        t = KdTree(pts, leaf_size=leaf_size)
        for _ in range(50):
            center = rng.uniform(-6.0, 6.0, 3)
            radius = float(rng.uniform(0.0, 4.0))
            np.testing.assert_array_equal(t.query_ball(center, radius),
                                          linear_scan_ball(pts, center, radius))

    def test_clustered_data_matches_linear_scan(self):
        # Tight clumps stress the bbox pruning on both sides of the split.
        rng = np.random.default_rng(5)
        centers = rng.uniform(-10.0, 10.0, (8, 3))
        pts = np.concatenate([c + rng.normal(0.0, 0.2, (60, 3)) for c in centers])
        t = KdTree(pts)
        for c in centers:
            np.testing.assert_array_equal(t.query_ball(c, 0.5),
                                          linear_scan_ball(pts, c, 0.5))

    def test_query_far_outside_cloud(self):
        pts = _cloud(np.random.default_rng(6), 100, scale=1.0)
        t = KdTree(pts)
        assert t.query_ball(np.array([50.0, 50.0, 50.0]), 1.0).size == 0

    @settings(max_examples=100, deadline=None)
    @given(data=st.data())
    def test_property_matches_linear_scan(self, data):
        n = data.draw(st.integers(0, 60), label="n")
        coords = data.draw(
            st.lists(
                st.tuples(*[st.floats(-8.0, 8.0) for _ in range(3)]),
                min_size=n, max_size=n,
            ),
            label="points",
        )
        pts = np.asarray(coords, dtype=np.float64).reshape(n, 3)
        center = np.asarray(
            data.draw(st.tuples(*[st.floats(-8.0, 8.0) for _ in range(3)])),
            dtype=np.float64,
        )
        radius = data.draw(st.floats(0.0, 10.0), label="radius")
        t = KdTree(pts, leaf_size=4)
        np.testing.assert_array_equal(t.query_ball(center, radius),
                                      linear_scan_ball(pts, center, radius))


class TestRadiusNeighbors:
    def test_self_neighborhoods(self):
        rng = np.random.default_rng(7)
        pts = _cloud(rng, 120, scale=2.0)
        t = KdTree(pts)
        for i in range(len(pts)):
            hood = radius_neighbors(t, pts[i], 0.8)
            assert i in hood  # every point is its own neighbor at any radius
            np.testing.assert_array_equal(hood, linear_scan_ball(pts, pts[i], 0.8))
