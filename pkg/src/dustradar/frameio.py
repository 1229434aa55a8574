"""Serialization of frames, ground truth, detections, and reports.

Frames and ground truth travel as JSON Lines (one record per line), the
stage outputs as CSV tables. Both choices keep the files streamable,
diffable, and trivially consumed by other tooling.

Conventions:
    * Angles are stored in degrees in files and converted to radians on
      read; everything in memory is radians.
    * Floats are written in shortest round-trip decimal form, so writing
      is byte-deterministic and a read-back reproduces every field to
      within 1e-9 relative error (conversion of the angle fields costs a
      few ulps; all other fields return bit-exact).
    * Readers are strict: unknown keys, malformed rows, and sequence
      numbers that fail to increase are errors carrying a line number.
    * Paths may be ``"-"`` for stdin/stdout; open file objects are used
      as-is and left open.
"""

from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager
from typing import Iterable, Iterator

import numpy as np

from .classification import ClusterDescriptor, Detection
from .errors import NonMonotonicSeqError, ParseError, PointValidationError
from .filtering import RULE_ORDER, FilterReport
from .points import COL_AZ, COL_EL, DEFAULT_ANGLE_TOL, N_COLS, Frame, validate_frame
from .simulate import GroundTruth

_FRAME_KEYS = {"seq", "timestamp", "points"}
_TRUTH_KEYS = {"seq", "dust_level", "true_count", "true_positions", "labels"}

DETECTION_COLUMNS = (
    "frame_seq",
    "cluster_id",
    "label",
    "rule",
    "size",
    "mean_velocity",
    "abs_mean_velocity",
    "mode_rcs",
    "centroid_x",
    "centroid_y",
    "centroid_z",
    "extent_x",
    "extent_y",
    "extent_z",
    "range_m",
)

REPORT_COLUMNS = (
    "frame_seq",
    "input_count",
    "kept_count",
    "rejected_rcs",
    "rejected_angle",
    "rejected_velocity",
    "rejected_velocity_static",
    "latency_ms",
)

CLUSTER_COLUMNS = ("frame_seq", "point_index", "cluster_id")

SUMMARY_COLUMNS = (
    "dust_level",
    "frames",
    "mean_raw_points",
    "mean_kept_points",
    "mean_detected_pedestrians",
    "precision",
    "recall",
    "frames_without_predictions",
    "latency_p50_ms",
    "latency_p95_ms",
    "latency_p99_ms",
)


@contextmanager
def _open_source(source):
    if source == "-":
        yield sys.stdin
    elif hasattr(source, "read"):
        yield source
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            yield fh


@contextmanager
def _open_sink(sink):
    if sink == "-":
        yield sys.stdout
    elif hasattr(sink, "write"):
        yield sink
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _int_field(obj: dict, key: str, lineno: int) -> int:
    v = obj.get(key)
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    raise ParseError(lineno, f"{key} must be an integer, got {v!r}")


def _json_object(line: str, lineno: int, required: set) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(lineno, f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(lineno, f"record must be an object, got {type(obj).__name__}")
    if set(obj) != required:
        raise ParseError(
            lineno,
            f"record keys {sorted(obj)} do not match required {sorted(required)}",
        )
    return obj


def _frame_from_obj(obj: dict, lineno: int) -> Frame:
    seq = _int_field(obj, "seq", lineno)
    ts = obj["timestamp"]
    if isinstance(ts, bool) or not isinstance(ts, (int, float)):
        raise ParseError(lineno, f"timestamp must be a number, got {ts!r}")
    points = obj["points"]
    if not isinstance(points, list):
        raise ParseError(lineno, "points must be a list of 7-element rows")
    try:
        data = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(lineno, f"points are not numeric: {exc}") from exc
    if data.size == 0:
        data = data.reshape(0, N_COLS)
    if data.ndim != 2 or data.shape[1] != N_COLS:
        raise ParseError(lineno, f"each point needs {N_COLS} fields, got shape {data.shape}")
    data[:, COL_AZ] = np.radians(data[:, COL_AZ])
    data[:, COL_EL] = np.radians(data[:, COL_EL])
    return Frame(seq, float(ts), data)


def read_frames(
    source,
    validate: bool = True,
    angle_tol: float = DEFAULT_ANGLE_TOL,
) -> Iterator[Frame]:
    """Stream frames from a JSON Lines source, in file order.

    Sequence numbers must strictly increase and timestamps must not
    decrease. With ``validate`` on, every point is checked against the
    structural invariants (finiteness, angle ranges, angular consistency
    within ``angle_tol``).

    Raises:
        ParseError: Malformed line (with its line number).
        NonMonotonicSeqError: Sequence numbers fail to increase.
    """
    with _open_source(source) as fh:
        last_seq: int | None = None
        last_ts: float | None = None
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _json_object(line, lineno, _FRAME_KEYS)
            try:
                frame = _frame_from_obj(obj, lineno)
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from exc
            if last_seq is not None and frame.seq <= last_seq:
                raise NonMonotonicSeqError(
                    lineno, f"seq {frame.seq} does not increase past {last_seq}"
                )
            if last_ts is not None and frame.timestamp < last_ts:
                raise ParseError(
                    lineno, f"timestamp {frame.timestamp} decreases below {last_ts}"
                )
            last_seq, last_ts = frame.seq, frame.timestamp
            if validate:
                try:
                    validate_frame(frame, angle_tol)
                except PointValidationError as exc:
                    raise ParseError(lineno, f"invalid point: {exc}") from exc
            yield frame


def frame_record(frame: Frame) -> dict:
    """A frame as the plain dict that one JSONL line encodes."""
    data = frame.data.copy()
    data[:, COL_AZ] = np.degrees(data[:, COL_AZ])
    data[:, COL_EL] = np.degrees(data[:, COL_EL])
    return {
        "seq": int(frame.seq),
        "timestamp": float(frame.timestamp),
        "points": data.tolist(),
    }


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def write_frames(frames: Iterable[Frame], sink) -> int:
    """Write frames as JSON Lines; returns the number written."""
    count = 0
    with _open_sink(sink) as fh:
        for frame in frames:
            fh.write(_dump_line(frame_record(frame)))
            fh.write("\n")
            count += 1
    return count


def truth_record(truth: GroundTruth) -> dict:
    return {
        "seq": int(truth.seq),
        "dust_level": int(truth.dust_level),
        "true_count": int(truth.true_count),
        "true_positions": [[float(c) for c in p] for p in truth.true_positions],
        "labels": list(truth.labels),
    }


def write_truth(truths: Iterable[GroundTruth], sink) -> int:
    """Write ground-truth records as JSON Lines."""
    count = 0
    with _open_sink(sink) as fh:
        for truth in truths:
            fh.write(_dump_line(truth_record(truth)))
            fh.write("\n")
            count += 1
    return count


def write_scene(pairs, frames_sink, truth_sink=None) -> int:
    """Write a simulated (frame, truth) stream; truth output is optional."""
    count = 0
    with _open_sink(frames_sink) as ffh:
        if truth_sink is None:
            for frame, _truth in pairs:
                ffh.write(_dump_line(frame_record(frame)))
                ffh.write("\n")
                count += 1
        else:
            with _open_sink(truth_sink) as tfh:
                for frame, truth in pairs:
                    ffh.write(_dump_line(frame_record(frame)))
                    ffh.write("\n")
                    tfh.write(_dump_line(truth_record(truth)))
                    tfh.write("\n")
                    count += 1
    return count


def read_truth(source) -> Iterator[GroundTruth]:
    """Stream ground-truth records; seq must strictly increase."""
    with _open_source(source) as fh:
        last_seq: int | None = None
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _json_object(line, lineno, _TRUTH_KEYS)
            seq = _int_field(obj, "seq", lineno)
            if last_seq is not None and seq <= last_seq:
                raise NonMonotonicSeqError(
                    lineno, f"seq {seq} does not increase past {last_seq}"
                )
            last_seq = seq
            level = _int_field(obj, "dust_level", lineno)
            count = _int_field(obj, "true_count", lineno)
            positions = obj["true_positions"]
            labels = obj["labels"]
            if not isinstance(positions, list) or not all(
                isinstance(p, list) and len(p) == 3 for p in positions
            ):
                raise ParseError(lineno, "true_positions must be a list of [x, y, z]")
            if count != len(positions):
                raise ParseError(
                    lineno,
                    f"true_count {count} disagrees with {len(positions)} positions",
                )
            if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
                raise ParseError(lineno, "labels must be a list of strings")
            try:
                pos = tuple(tuple(float(c) for c in p) for p in positions)
            except (TypeError, ValueError) as exc:
                raise ParseError(lineno, f"true_positions are not numeric: {exc}") from exc
            yield GroundTruth(
                seq=seq,
                dust_level=level,
                labels=tuple(labels),
                true_count=count,
                true_positions=pos,
            )


def _fmt(value) -> str:
    """Shortest round-trip decimal form of one CSV cell."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_detections(rows: Iterable[tuple[int, Detection]], sink) -> int:
    """Write (frame_seq, detection) rows as a flat CSV table."""
    count = 0
    with _open_sink(sink) as fh:
        writer = _csv_writer(fh)
        writer.writerow(DETECTION_COLUMNS)
        for seq, det in rows:
            d = det.descriptor
            writer.writerow(
                [
                    int(seq),
                    int(det.cluster_id),
                    det.label,
                    det.rule if det.rule is not None else "",
                    d.size,
                    _fmt(d.mean_velocity),
                    _fmt(d.abs_mean_velocity),
                    _fmt(d.mode_rcs),
                    _fmt(d.centroid[0]),
                    _fmt(d.centroid[1]),
                    _fmt(d.centroid[2]),
                    _fmt(d.extent[0]),
                    _fmt(d.extent[1]),
                    _fmt(d.extent[2]),
                    _fmt(d.range_m),
                ]
            )
            count += 1
    return count


def _check_header(row, expected, what: str) -> None:
    if tuple(row) != tuple(expected):
        raise ParseError(1, f"bad {what} header: {row!r}")


def read_detections(source) -> list[tuple[int, Detection]]:
    """Read back a detections table written by :func:`write_detections`."""
    out: list[tuple[int, Detection]] = []
    with _open_source(source) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty detections table") from None
        _check_header(header, DETECTION_COLUMNS, "detections")
        for row in reader:
            lineno = reader.line_num
            if len(row) != len(DETECTION_COLUMNS):
                raise ParseError(lineno, f"expected {len(DETECTION_COLUMNS)} cells")
            try:
                desc = ClusterDescriptor(
                    size=int(row[4]),
                    mean_velocity=float(row[5]),
                    mode_rcs=float(row[7]),
                    centroid=(float(row[8]), float(row[9]), float(row[10])),
                    extent=(float(row[11]), float(row[12]), float(row[13])),
                    range_m=float(row[14]),
                )
                det = Detection(
                    cluster_id=int(row[1]),
                    label=row[2],
                    descriptor=desc,
                    rule=row[3] or None,
                )
                out.append((int(row[0]), det))
            except ValueError as exc:
                raise ParseError(lineno, f"bad detection row: {exc}") from exc
    return out


def write_reports(rows, sink) -> int:
    """Write (frame_seq, FilterReport, latency_ms) rows as a CSV table."""
    count = 0
    with _open_sink(sink) as fh:
        writer = _csv_writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for seq, report, latency_ms in rows:
            writer.writerow(
                [
                    int(seq),
                    report.input_count,
                    report.kept_count,
                    *(report.rejected_by_rule[rule] for rule in RULE_ORDER),
                    _fmt(latency_ms),
                ]
            )
            count += 1
    return count


def read_reports(source) -> list[tuple[int, FilterReport, float]]:
    """Read back a report table written by :func:`write_reports`."""
    out: list[tuple[int, FilterReport, float]] = []
    with _open_source(source) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty report table") from None
        _check_header(header, REPORT_COLUMNS, "report")
        for row in reader:
            lineno = reader.line_num
            if len(row) != len(REPORT_COLUMNS):
                raise ParseError(lineno, f"expected {len(REPORT_COLUMNS)} cells")
            try:
                report = FilterReport(
                    input_count=int(row[1]),
                    kept_count=int(row[2]),
                    rejected_by_rule={
                        rule: int(row[3 + i]) for i, rule in enumerate(RULE_ORDER)
                    },
                )
                out.append((int(row[0]), report, float(row[7])))
            except ValueError as exc:
                raise ParseError(lineno, f"bad report row: {exc}") from exc
    return out


def write_cluster_labels(rows, sink) -> int:
    """Write per-point cluster assignments; rows are (frame_seq, labels)."""
    count = 0
    with _open_sink(sink) as fh:
        writer = _csv_writer(fh)
        writer.writerow(CLUSTER_COLUMNS)
        for seq, labels in rows:
            for i, cid in enumerate(labels):
                writer.writerow([int(seq), i, int(cid)])
                count += 1
    return count


def write_summary(summary, sink) -> int:
    """Write an evaluation summary, one CSV row per dust level."""
    count = 0
    with _open_sink(sink) as fh:
        writer = _csv_writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for level in summary.levels:
            writer.writerow(
                [
                    level.dust_level,
                    level.frames,
                    _fmt(level.mean_raw_points),
                    _fmt(level.mean_kept_points),
                    _fmt(level.mean_detected_pedestrians),
                    _fmt(level.precision),
                    _fmt(level.recall),
                    level.frames_without_predictions,
                    _fmt(level.latency_p50_ms),
                    _fmt(level.latency_p95_ms),
                    _fmt(level.latency_p99_ms),
                ]
            )
            count += 1
    return count
