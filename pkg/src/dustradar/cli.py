"""Command-line interface.

Subcommands compose through the file formats in :mod:`dustradar.frameio`
(pass ``-`` for stdin/stdout):

    simulate  generate a synthetic scene (frames, optional ground truth)
    filter    apply the noise gates to a frame stream
    cluster   group a frame stream into Euclidean clusters
    classify  describe and label clusters (assumes filtered input)
    pipeline  filter -> cluster -> classify with per-frame latency
    evaluate  score detections against ground truth, per dust level
    bench     measure filter latency scaling across frame sizes

Exit codes: 0 success, 1 usage or file-system error, 2 data error
(malformed input, failed validation, bad configuration).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import replace

from .classification import classify_frame, format_rules
from .clustering import extract_clusters
from .config import (
    PipelineConfig,
    default_pipeline_config,
    default_scene_spec,
    load_pipeline_config,
    load_scene_spec,
)
from .errors import DustRadarError
from .filtering import filter_frame
from .frameio import (
    _open_sink,
    read_detections,
    read_frames,
    read_reports,
    read_truth,
    write_cluster_labels,
    write_detections,
    write_frames,
    write_reports,
    write_scene,
    write_summary,
)
from .pipeline import (
    DEFAULT_MATCH_RADIUS,
    benchmark_filter,
    evaluate_runs,
    format_summary,
    process_frames,
)
from .simulate import simulate


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this interface reserves 2 for
    data errors, so downgrade usage failures to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_pipeline_config(args.config)
    return default_pipeline_config()


def _read_input(args, config: PipelineConfig):
    return read_frames(
        args.infile,
        validate=config.io.validate_on_read,
        angle_tol=config.io.ingest_angle_tolerance,
    )


def _add_io_args(sub, config_help: str = "pipeline config file (YAML)") -> None:
    sub.add_argument("--config", metavar="PATH", help=config_help)
    sub.add_argument(
        "--in", dest="infile", metavar="PATH", default="-", help="input frames (JSONL, - for stdin)"
    )
    sub.add_argument(
        "--out", metavar="PATH", default="-", help="output destination (- for stdout)"
    )


def _cmd_simulate(args) -> int:
    spec = load_scene_spec(args.scene) if args.scene else default_scene_spec()
    overrides = {}
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.dust_level is not None:
        overrides["dust_level"] = args.dust_level
    if args.frames is not None:
        overrides["frame_count"] = args.frames
    if overrides:
        spec = replace(spec, **overrides)
    write_scene(simulate(spec), args.out, args.truth_out)
    return 0


def _cmd_filter(args) -> int:
    config = _load_config(args)
    frames = _read_input(args, config)
    reports: list[tuple] = []

    def kept_stream():
        for frame in frames:
            t0 = time.perf_counter()
            kept, report = filter_frame(frame, config.filter)
            latency_ms = (time.perf_counter() - t0) * 1e3
            reports.append((frame.seq, report, latency_ms))
            yield kept

    write_frames(kept_stream(), args.out)
    if args.report:
        write_reports(reports, args.report)
    return 0


def _cmd_cluster(args) -> int:
    config = _load_config(args)
    frames = _read_input(args, config)

    def rows():
        for frame in frames:
            clustering = extract_clusters(
                frame,
                radius=config.cluster.radius,
                min_cluster_size=config.cluster.min_cluster_size,
            )
            yield frame.seq, clustering.labels

    write_cluster_labels(rows(), args.out)
    return 0


def _cmd_classify(args) -> int:
    config = _load_config(args)
    if args.print_rules:
        print(format_rules(config.classify.rules))
        return 0
    frames = _read_input(args, config)

    def rows():
        for frame in frames:
            clustering = extract_clusters(
                frame,
                radius=config.cluster.radius,
                min_cluster_size=config.cluster.min_cluster_size,
            )
            detections = classify_frame(
                frame, clustering, config.classify.rules, config.classify.bin_width
            )
            for det in detections:
                yield frame.seq, det

    write_detections(rows(), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    config = _load_config(args)
    frames = _read_input(args, config)
    reports: list[tuple] = []

    def rows():
        for result in process_frames(frames, config):
            reports.append((result.seq, result.report, result.latency_ms))
            for det in result.detections:
                yield result.seq, det

    write_detections(rows(), args.out)
    if args.report:
        write_reports(reports, args.report)
    return 0


def _cmd_evaluate(args) -> int:
    n_runs = len(args.detections)
    if len(args.truth) != n_runs:
        print(
            "dustradar evaluate: need one --truth per --detections",
            file=sys.stderr,
        )
        return 1
    if args.report and len(args.report) != n_runs:
        print(
            "dustradar evaluate: --report must be given once per run or not at all",
            file=sys.stderr,
        )
        return 1
    runs = []
    for i in range(n_runs):
        detections = read_detections(args.detections[i])
        truths = list(read_truth(args.truth[i]))
        reports = read_reports(args.report[i]) if args.report else None
        runs.append((detections, truths, reports))
    summary = evaluate_runs(runs, args.match_radius)
    write_summary(summary, args.out)
    print(format_summary(summary), file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    config = _load_config(args)
    results = benchmark_filter(
        sizes=args.sizes, repeats=args.repeats, seed=args.seed, config=config.filter
    )
    with _open_sink(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n_points", "median_latency_ms", "ratio_vs_prev"))
        prev = None
        for row in results:
            ratio = "" if prev is None else repr(row.median_latency_ms / prev)
            writer.writerow((row.n_points, repr(row.median_latency_ms), ratio))
            prev = row.median_latency_ms
    for row in results:
        print(
            f"n={row.n_points}: median {row.median_latency_ms:.3f} ms",
            file=sys.stderr,
        )
    return 0


def _sizes_arg(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dustradar",
        description="Streaming 4D radar perception: filter, cluster, classify.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("simulate", help="generate a synthetic dusty scene")
    p.add_argument("--scene", metavar="PATH", help="scene spec file (YAML)")
    p.add_argument("--seed", type=int, help="override the scene's rng_seed")
    p.add_argument("--dust-level", type=int, help="override the scene's dust level")
    p.add_argument("--frames", type=int, help="override the scene's frame count")
    p.add_argument("--out", metavar="PATH", default="-", help="frames output (JSONL)")
    p.add_argument("--truth-out", metavar="PATH", help="ground-truth output (JSONL)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("filter", help="apply the noise gates to frames")
    _add_io_args(p)
    p.add_argument("--report", metavar="PATH", help="per-frame filter report (CSV)")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("cluster", help="extract Euclidean clusters per frame")
    _add_io_args(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("classify", help="describe and label clusters")
    _add_io_args(p)
    p.add_argument(
        "--print-rules",
        action="store_true",
        help="print the effective rule table and exit",
    )
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("pipeline", help="filter, cluster, and classify frames")
    _add_io_args(p)
    p.add_argument("--report", metavar="PATH", help="per-frame report with latency (CSV)")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("evaluate", help="score detections against ground truth")
    p.add_argument(
        "--detections",
        metavar="PATH",
        action="append",
        required=True,
        help="detections table (CSV); repeat for multiple runs",
    )
    p.add_argument(
        "--truth",
        metavar="PATH",
        action="append",
        required=True,
        help="ground-truth stream (JSONL); one per --detections",
    )
    p.add_argument(
        "--report",
        metavar="PATH",
        action="append",
        help="per-frame report (CSV); one per run, optional",
    )
    p.add_argument(
        "--match-radius",
        type=float,
        default=DEFAULT_MATCH_RADIUS,
        help="centroid-to-truth association distance, meters",
    )
    p.add_argument("--out", metavar="PATH", default="-", help="summary table (CSV)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("bench", help="filter latency scaling benchmark")
    p.add_argument("--config", metavar="PATH", help="pipeline config file (YAML)")
    p.add_argument(
        "--sizes",
        type=_sizes_arg,
        default=[1000, 2000, 4000, 8000],
        help="comma-separated frame sizes (default 1000,2000,4000,8000)",
    )
    p.add_argument("--repeats", type=int, default=15, help="timings per size")
    p.add_argument("--seed", type=int, default=0, help="benchmark input seed")
    p.add_argument("--out", metavar="PATH", default="-", help="bench table (CSV)")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except OSError as exc:
        print(f"dustradar: {exc}", file=sys.stderr)
        return 1
    except DustRadarError as exc:
        print(f"dustradar: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
