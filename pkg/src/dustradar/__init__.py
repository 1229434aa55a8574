"""Streaming perception for 4D imaging radar point clouds.

The package turns raw per-frame radar detections into labeled object
detections in three stages, each usable on its own or through the
``dustradar`` command line:

1. threshold noise filtering (:mod:`dustradar.filtering`),
2. KD-tree Euclidean clustering (:mod:`dustradar.clustering`),
3. rule-based cluster classification (:mod:`dustradar.classification`).

A deterministic scene simulator (:mod:`dustradar.simulate`) generates
dusty enclosed-room sequences with per-point ground truth, and
:mod:`dustradar.pipeline` ties the stages together with evaluation and
latency benchmarks. All tunable thresholds live in packaged YAML config
files (:mod:`dustradar.config`).
"""

from .classification import (
    LABEL_CLUTTER,
    LABEL_PEDESTRIAN,
    LABEL_UNKNOWN,
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
from .clustering import (
    UNCLUSTERED,
    Clustering,
    EuclideanClusterer,
    extract_clusters,
)
from .config import (
    ClassifyConfig,
    ClusterConfig,
    IoConfig,
    PipelineConfig,
    default_pipeline_config,
    default_scene_spec,
    load_pipeline_config,
    load_scene_spec,
)
from .errors import (
    ConfigError,
    DustRadarError,
    EmptyClusterError,
    FrameMismatchError,
    InvalidSpecError,
    MemberIndexError,
    MinClusterSizeError,
    MismatchedClusteringError,
    NegativeRadiusError,
    NonMonotonicSeqError,
    ParseError,
    PointValidationError,
)
from .filtering import (
    FilterConfig,
    FilterReport,
    RadarNoiseFilter,
    filter_frame,
    keep_mask,
    point_passes,
    rule_codes,
)
from .frameio import (
    read_detections,
    read_frames,
    read_reports,
    read_truth,
    write_detections,
    write_frames,
    write_reports,
    write_summary,
    write_truth,
)
from .kdtree import KdTree, build_kdtree, radius_neighbors
from .pipeline import (
    DEFAULT_MATCH_RADIUS,
    EvalSummary,
    FrameResult,
    LevelSummary,
    benchmark_filter,
    dust_level_sweep,
    evaluate,
    evaluate_runs,
    format_summary,
    process_frame,
    process_frames,
    run_pipeline,
    run_scene,
)
from .points import (
    Frame,
    RadarPoint,
    angles_from_cartesian,
    from_spherical,
    is_valid_point,
    validate_frame,
    validate_point,
)
from .simulate import (
    GhostSpec,
    GroundTruth,
    PedestrianSpec,
    ReflectivePlane,
    RoomSpec,
    SceneSpec,
    SensorSpec,
    mirror_ghost,
    sensor_plane,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ClassRule",
    "ClassifyConfig",
    "ClusterConfig",
    "ClusterDescriptor",
    "Clustering",
    "ConfigError",
    "DEFAULT_MATCH_RADIUS",
    "Detection",
    "DustRadarError",
    "EmptyClusterError",
    "EuclideanClusterer",
    "EvalSummary",
    "FilterConfig",
    "FilterReport",
    "Frame",
    "FrameMismatchError",
    "FrameResult",
    "GhostSpec",
    "GroundTruth",
    "InvalidSpecError",
    "IoConfig",
    "KdTree",
    "LABEL_CLUTTER",
    "LABEL_PEDESTRIAN",
    "LABEL_UNKNOWN",
    "LevelSummary",
    "MemberIndexError",
    "MinClusterSizeError",
    "MismatchedClusteringError",
    "NegativeRadiusError",
    "NonMonotonicSeqError",
    "ParseError",
    "PedestrianSpec",
    "PipelineConfig",
    "PointValidationError",
    "RadarNoiseFilter",
    "RadarPoint",
    "ReflectivePlane",
    "RoomSpec",
    "RuleBasedClassifier",
    "RuleSet",
    "SceneSpec",
    "SensorSpec",
    "UNCLUSTERED",
    "angles_from_cartesian",
    "benchmark_filter",
    "binned_mode",
    "build_kdtree",
    "classify_cluster",
    "classify_frame",
    "default_pipeline_config",
    "default_scene_spec",
    "describe_cluster",
    "dust_level_sweep",
    "evaluate",
    "evaluate_runs",
    "extract_clusters",
    "filter_frame",
    "format_rules",
    "format_summary",
    "from_spherical",
    "is_valid_point",
    "keep_mask",
    "load_pipeline_config",
    "load_scene_spec",
    "mirror_ghost",
    "point_passes",
    "process_frame",
    "process_frames",
    "radius_neighbors",
    "read_detections",
    "read_frames",
    "read_reports",
    "read_truth",
    "rule_codes",
    "run_pipeline",
    "run_scene",
    "sensor_plane",
    "simulate",
    "validate_frame",
    "validate_point",
    "write_detections",
    "write_frames",
    "write_reports",
    "write_summary",
    "write_truth",
]
