"""Cluster descriptors and rule-based labeling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dustradar.classification import (
    LABEL_CLUTTER,
    LABEL_PEDESTRIAN,
    LABEL_UNKNOWN,
    RULE_FEATURES,
    ClassRule,
    ClusterDescriptor,
    Detection,
    RuleBasedClassifier,
    RuleSet,
    binned_mode,
    classify_cluster,
    classify_frame,
    describe_cluster,
    format_rules,
)
from dustradar.clustering import extract_clusters
from dustradar.config import default_pipeline_config
from dustradar.errors import (
    ConfigError,
    EmptyClusterError,
    MemberIndexError,
    MismatchedClusteringError,
)
from dustradar.points import Frame, angles_from_cartesian

from oracles import mode_oracle, random_point_rows

DEFAULT_RULES = default_pipeline_config().classify.rules


def _frame_at(positions, rcs, v, seq=0):
    positions = np.asarray(positions, dtype=np.float64)
    rcs = np.broadcast_to(np.asarray(rcs, dtype=np.float64), len(positions))
    v = np.broadcast_to(np.asarray(v, dtype=np.float64), len(positions))
    az, el = angles_from_cartesian(positions[:, 0], positions[:, 1], positions[:, 2])
    rows = np.column_stack([positions, rcs, v, az, el])
    return Frame(seq, 0.0, rows)


def _pedestrian_like_frame(rng, n=40, center=(4.0, 0.5, 0.85)):
    # A capsule-ish blob whose descriptor lands inside the default rule.
    pos = np.asarray(center) + rng.uniform(
        [-0.2, -0.2, -0.85], [0.2, 0.2, 0.85], (n, 3)
    )
    rcs = rng.uniform(-8.0, -2.0, n)
    v = rng.uniform(0.9, 1.3, n)
    return _frame_at(pos, rcs, v)


class TestBinnedMode:
    def test_single_value_reports_bin_center(self):
        # floor(-7.3) = -8, so the value lands in [-8, -7) with center -7.5.
        assert binned_mode(np.array([-7.3]), 1.0) == -7.5

    def test_mode_of_repeated_bin(self):
        vals = np.array([2.1, 2.9, 2.5, 7.0])
        assert binned_mode(vals, 1.0) == 2.5

    def test_tie_prefers_lower_bin(self):
        vals = np.array([1.2, 1.8, 3.2, 3.8])
        assert binned_mode(vals, 1.0) == 1.5

    def test_custom_bin_width(self):
        vals = np.array([0.4, 0.6, 0.7, 5.0])
        assert binned_mode(vals, 0.5) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(EmptyClusterError):
            binned_mode(np.array([]), 1.0)

    def test_bad_width_rejected(self):
        for w in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(ConfigError):
                binned_mode(np.array([1.0]), w)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_histogram_oracle(self, seed):
        rng = np.random.default_rng(seed)
        vals = rng.normal(0.0, 10.0, int(rng.integers(1, 200)))
        width = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
        assert binned_mode(vals, width) == mode_oracle(vals, width)

    @settings(max_examples=150, deadline=None)
    @given(
        vals=st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=60),
        width=st.sampled_from([0.5, 1.0, 2.5]),
    )
    def test_mode_lies_within_one_bin_of_data(self, vals, width):
        arr = np.asarray(vals)
        mode = binned_mode(arr, width)
        assert arr.min() - width <= mode <= arr.max() + width
        assert mode == mode_oracle(arr, width)


class TestDescribeCluster:
    def test_single_point_descriptor(self):
        f = _frame_at([[3.0, 4.0, 0.0]], rcs=-7.3, v=-0.4)
        d = describe_cluster(f, np.array([0]))
        assert d.size == 1
        assert d.mean_velocity == -0.4
        assert d.abs_mean_velocity == 0.4
        assert d.mode_rcs == -7.5  # lone -7.3 falls in bin [-8, -7)
        assert d.centroid == (3.0, 4.0, 0.0)
        assert d.extent == (0.0, 0.0, 0.0)
        assert d.range_m == 5.0

    def test_opposite_velocities_cancel_exactly(self):
        f = _frame_at([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], rcs=0.0, v=[1.7, -1.7])
        d = describe_cluster(f, np.array([0, 1]))
        assert d.mean_velocity == 0.0
        assert d.abs_mean_velocity == 0.0

    def test_extent_and_centroid(self):
        pos = [[1.0, -1.0, 0.0], [3.0, 1.0, 0.5], [2.0, 0.0, 2.0]]
        f = _frame_at(pos, rcs=0.0, v=0.0)
        d = describe_cluster(f, np.array([0, 1, 2]))
        assert d.centroid == (2.0, 0.0, 2.5 / 3)
        assert d.extent == (2.0, 2.0, 2.0)
        assert d.horizontal_extent == 2.0

    def test_range_uses_centroid(self):
        f = _frame_at([[3.0, 0.0, 4.0], [3.0, 0.0, 4.0]], rcs=0.0, v=0.0)
        d = describe_cluster(f, np.array([0, 1]))
        assert d.range_m == 5.0

    def test_fifty_point_mode_matches_oracle(self):
        rng = np.random.default_rng(50)
        rows = random_point_rows(rng, 50)
        f = Frame(0, 0.0, rows)
        d = describe_cluster(f, np.arange(50))
        assert d.mode_rcs == mode_oracle(rows[:, 3], 1.0)

    def test_permutation_invariance_bitwise(self):
        rng = np.random.default_rng(9)
        rows = random_point_rows(rng, 80)
        f = Frame(0, 0.0, rows)
        members = np.arange(30, 70)
        base = describe_cluster(f, members)
        for _ in range(10):
            shuffled = rng.permutation(members)
            assert describe_cluster(f, shuffled) == base

    def test_subset_selection(self):
        rng = np.random.default_rng(10)
        rows = random_point_rows(rng, 20)
        f = Frame(0, 0.0, rows)
        members = np.array([3, 7, 11])
        d = describe_cluster(f, members)
        assert d.size == 3
        assert d.mean_velocity == np.mean(np.sort(rows[members, 4]))

    def test_empty_members_rejected(self):
        f = _frame_at([[1.0, 0.0, 0.0]], rcs=0.0, v=0.0)
        with pytest.raises(EmptyClusterError):
            describe_cluster(f, np.array([], dtype=np.int64))

    def test_out_of_range_member_rejected(self):
        f = _frame_at([[1.0, 0.0, 0.0]], rcs=0.0, v=0.0)
        with pytest.raises(MemberIndexError):
            describe_cluster(f, np.array([1]))
        with pytest.raises(MemberIndexError):
            describe_cluster(f, np.array([-1]))

    def test_mode_rcs_invariant_on_random_clusters(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            rows = random_point_rows(rng, int(rng.integers(1, 60)))
            f = Frame(0, 0.0, rows)
            d = describe_cluster(f, np.arange(len(f)))
            w = 1.0
            assert rows[:, 3].min() - w <= d.mode_rcs <= rows[:, 3].max() + w

    def test_feature_accessor(self):
        f = _frame_at([[3.0, 4.0, 1.0]], rcs=-6.0, v=0.5)
        d = describe_cluster(f, np.array([0]))
        assert d.feature("size") == 1
        assert d.feature("abs_mean_velocity") == 0.5
        assert d.feature("mode_rcs") == d.mode_rcs
        assert d.feature("extent_z") == 0.0
        assert d.feature("horizontal_extent") == 0.0
        with pytest.raises(KeyError):
            d.feature("centroid")


class TestClassRule:
    def test_closed_interval_matching(self):
        rule = ClassRule("r", "lab", {"size": (3, 10)})
        d = ClusterDescriptor(3, 0.0, 0.0, (0.0,) * 3, (0.0,) * 3, 0.0)
        assert rule.matches(d)
        d10 = ClusterDescriptor(10, 0.0, 0.0, (0.0,) * 3, (0.0,) * 3, 0.0)
        assert rule.matches(d10)
        d11 = ClusterDescriptor(11, 0.0, 0.0, (0.0,) * 3, (0.0,) * 3, 0.0)
        assert not rule.matches(d11)

    def test_unknown_feature_rejected(self):
        with pytest.raises(ConfigError):
            ClassRule("r", "lab", {"volume": (0, 1)})

    def test_inverted_interval_rejected(self):
        with pytest.raises(ConfigError):
            ClassRule("r", "lab", {"size": (5, 1)})

    def test_nan_bound_rejected(self):
        with pytest.raises(ConfigError):
            ClassRule("r", "lab", {"size": (math.nan, 3)})

    def test_infinite_bound_allowed(self):
        rule = ClassRule("r", "lab", {"mode_rcs": (15.0, math.inf)})
        d = ClusterDescriptor(1, 0.0, 40.0, (0.0,) * 3, (0.0,) * 3, 0.0)
        assert rule.matches(d)

    def test_rule_features_constant(self):
        assert RULE_FEATURES == (
            "size", "abs_mean_velocity", "mode_rcs", "extent_z", "horizontal_extent"
        )


class TestRuleSet:
    def test_duplicate_names_rejected(self):
        r = ClassRule("a", "x", {"size": (0, 1)})
        with pytest.raises(ConfigError):
            RuleSet([r, r])

    def test_iteration_preserves_order(self):
        rules = [ClassRule(f"r{i}", "x", {"size": (0, 100)}) for i in range(3)]
        rs = RuleSet(rules)
        assert [r.name for r in rs] == ["r0", "r1", "r2"]
        assert len(rs) == 3

    def test_default_rules_shape(self):
        names = [r.name for r in DEFAULT_RULES]
        labels = [r.label for r in DEFAULT_RULES]
        assert labels[0] == LABEL_PEDESTRIAN
        assert set(labels[1:]) == {LABEL_CLUTTER}
        assert len(names) == 3


class TestClassifyCluster:
    def _desc(self, **overrides):
        base = dict(size=40, mean_velocity=1.0, mode_rcs=-5.5,
                    centroid=(4.0, 0.0, 0.9), extent=(0.4, 0.4, 1.6), range_m=4.1)
        base.update(overrides)
        return ClusterDescriptor(**base)

    def test_pedestrian_rule_matches(self):
        det = classify_cluster(self._desc(), DEFAULT_RULES, cluster_id=2)
        assert det.label == LABEL_PEDESTRIAN
        assert det.cluster_id == 2
        assert det.rule == "walking-pedestrian"

    def test_first_match_wins(self):
        # High-RCS fast mover: pedestrian rule fails on rcs, clutter rule takes it.
        det = classify_cluster(self._desc(mode_rcs=20.5), DEFAULT_RULES)
        assert det.label == LABEL_CLUTTER
        assert det.rule == "high-rcs-clutter"

    def test_static_clutter_rule(self):
        det = classify_cluster(self._desc(mean_velocity=0.01), DEFAULT_RULES)
        assert det.label == LABEL_CLUTTER
        assert det.rule == "static-clutter"

    def test_fallthrough_to_unknown(self):
        det = classify_cluster(self._desc(mean_velocity=5.0), DEFAULT_RULES)
        assert det.label == LABEL_UNKNOWN
        assert det.rule is None

    def test_negative_velocity_pedestrian(self):
        # Walking away from the sensor still matches via |mean v|.
        det = classify_cluster(self._desc(mean_velocity=-1.0), DEFAULT_RULES)
        assert det.label == LABEL_PEDESTRIAN

    def test_boundary_values_inclusive(self):
        d = self._desc(size=5, mean_velocity=0.2, mode_rcs=5.0,
                       extent=(0.1, 0.1, 0.8))
        assert classify_cluster(d, DEFAULT_RULES).label == LABEL_PEDESTRIAN


class TestClassifyFrame:
    def test_detections_per_cluster(self):
        rng = np.random.default_rng(12)
        ped = _pedestrian_like_frame(rng)
        clustering = extract_clusters(ped, radius=0.5, min_cluster_size=5)
        dets = classify_frame(ped, clustering, DEFAULT_RULES)
        assert len(dets) == clustering.n_clusters == 1
        assert dets[0].label == LABEL_PEDESTRIAN
        assert dets[0].cluster_id == 0
        assert dets[0].descriptor.size == 40

    def test_empty_clustering(self):
        f = Frame(0, 0.0)
        clustering = extract_clusters(f, radius=0.5)
        assert classify_frame(f, clustering, DEFAULT_RULES) == []

    def test_mismatched_clustering_rejected(self):
        rng = np.random.default_rng(13)
        f1 = _pedestrian_like_frame(rng, n=40)
        f2 = _pedestrian_like_frame(rng, n=30)
        clustering = extract_clusters(f1, radius=0.5, min_cluster_size=5)
        with pytest.raises(MismatchedClusteringError):
            classify_frame(f2, clustering, DEFAULT_RULES)


class TestEstimatorAndFormatting:
    def test_classifier_predict(self):
        rng = np.random.default_rng(14)
        f = _pedestrian_like_frame(rng)
        clustering = extract_clusters(f, radius=0.5, min_cluster_size=5)
        clf = RuleBasedClassifier().fit()
        dets = clf.predict(f, clustering)
        assert dets == classify_frame(f, clustering, DEFAULT_RULES)

    def test_classifier_unfitted(self):
        from sklearn.exceptions import NotFittedError

        rng = np.random.default_rng(15)
        f = _pedestrian_like_frame(rng)
        clustering = extract_clusters(f, radius=0.5, min_cluster_size=5)
        with pytest.raises(NotFittedError):
            RuleBasedClassifier().predict(f, clustering)

    def test_detection_is_frozen(self):
        d = Detection(0, LABEL_UNKNOWN,
                      ClusterDescriptor(1, 0.0, 0.0, (0.0,) * 3, (0.0,) * 3, 0.0),
                      None)
        with pytest.raises(AttributeError):
            d.label = "other"

    def test_format_rules_lists_all_rules(self):
        text = format_rules(DEFAULT_RULES)
        for rule in DEFAULT_RULES:
            assert rule.name in text
            assert rule.label in text
        assert "unknown" in text
