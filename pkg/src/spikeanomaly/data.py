"""NAB-style series and label files, plus detection/sweep result CSVs.

Series files are ``timestamp,value`` CSVs with timestamps laid out as
``YYYY-MM-DD HH:MM:SS``; because the layout is fixed, string order is
chronological order and timestamps are never parsed into datetimes.
Result files may start with ``#`` comment lines carrying run metadata.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DataError

__all__ = [
    "SeriesPoint",
    "AnomalyWindow",
    "read_series",
    "write_series",
    "read_windows",
    "write_detections",
    "read_detections",
    "write_sweep",
    "read_sweep",
]

TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}(\.\d+)?$")
DETECTION_HEADER = ["index", "timestamp", "value", "rate", "detected"]
SWEEP_HEADER = ["alpha", "tp", "fp", "fn", "score"]


@dataclass(frozen=True)
class SeriesPoint:
    timestamp: str
    value: float


@dataclass(frozen=True)
class AnomalyWindow:
    start: str
    end: str

    def contains(self, timestamp: str) -> bool:
        return self.start <= timestamp <= self.end


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except FileNotFoundError:
        raise DataError("no such file", path=path) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read file: {exc}", path=path) from None


def _data_lines(text: str):
    """Yield (line_number, line) skipping blank and ``#`` comment lines."""
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        yield n, s


def _parse_value(raw: str, path, line) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise DataError(f"value {raw!r} is not a number", path=path, line=line) from None
    if not math.isfinite(v):
        raise DataError(f"value {raw!r} is not finite", path=path, line=line)
    return v


def read_series(path, warnings: list | None = None) -> list[SeriesPoint]:
    """Parse a ``timestamp,value`` CSV.

    Rows whose timestamp does not increase are kept; a message naming the
    line is appended to ``warnings`` if a list is passed.
    """
    text = _read_text(path)
    lines = _data_lines(text)
    first = next(lines, None)
    if first is None:
        raise DataError("missing header 'timestamp,value'", path=path)
    n, header = first
    if [h.strip() for h in header.split(",")] != ["timestamp", "value"]:
        raise DataError(f"expected header 'timestamp,value', got {header!r}",
                        path=path, line=n)
    points = []
    prev = None
    for n, line in lines:
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"expected 2 fields, got {len(parts)}", path=path, line=n)
        ts, raw = parts[0].strip(), parts[1].strip()
        if not TIMESTAMP_RE.match(ts):
            raise DataError(f"bad timestamp {ts!r}", path=path, line=n)
        value = _parse_value(raw, path, n)
        if prev is not None and ts <= prev and warnings is not None:
            warnings.append(f"{path}:{n}: timestamp {ts} does not increase")
        prev = ts
        points.append(SeriesPoint(ts, value))
    return points


def write_series(path, points: Iterable[SeriesPoint]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp,value\n")
        for p in points:
            fh.write(f"{p.timestamp},{p.value!r}\n")


def read_windows(path, dataset_key: str | None = None) -> list[AnomalyWindow]:
    """Anomaly windows from a NAB label JSON file.

    Accepts either a bare list of ``[start, end]`` pairs or the NAB combined
    format mapping dataset keys (e.g. ``realKnownCause/machine_temperature_
    system_failure.csv``) to such lists.
    """
    try:
        doc = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}", path=path) from None
    if isinstance(doc, Mapping):
        if dataset_key is None:
            raise DataError("label file is keyed by dataset; a dataset key is required",
                            path=path)
        if dataset_key not in doc:
            # allow the bare file name as a shorthand
            matches = [k for k in doc if Path(k).name == dataset_key]
            if len(matches) != 1:
                raise DataError(f"dataset key {dataset_key!r} not found", path=path)
            dataset_key = matches[0]
        doc = doc[dataset_key]
    if not isinstance(doc, list):
        raise DataError("expected a list of [start, end] pairs", path=path)
    windows = []
    for i, pair in enumerate(doc):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2
                and all(isinstance(s, str) for s in pair)):
            raise DataError(f"window {i}: expected [start, end] strings, got {pair!r}",
                            path=path)
        start, end = pair[0].strip(), pair[1].strip()
        if start > end:
            raise DataError(f"window {i}: start {start} is after end {end}", path=path)
        windows.append(AnomalyWindow(start, end))
    windows.sort(key=lambda w: (w.start, w.end))
    for a, b in zip(windows, windows[1:]):
        if b.start <= a.end:
            raise DataError(f"windows overlap: {a.start}..{a.end} and {b.start}..{b.end}",
                            path=path)
    return windows


def _comment_block(meta: Mapping | None) -> str:
    if not meta:
        return ""
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def write_detections(path_or_file, records, meta: Mapping | None = None) -> None:
    def emit(fh):
        fh.write(_comment_block(meta))
        fh.write(",".join(DETECTION_HEADER) + "\n")
        for r in records:
            fh.write(f"{r.index},{r.timestamp},{r.value!r},{r.rate:.6f},{int(r.detected)}\n")

    if isinstance(path_or_file, io.TextIOBase):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)


def read_detections(path):
    """Records from a detection CSV (comment lines skipped)."""
    from .detect import DetectionRecord

    rows = _csv_rows(path, DETECTION_HEADER)
    out = []
    for n, row in rows:
        try:
            out.append(DetectionRecord(int(row[0]), row[1], float(row[2]),
                                       float(row[3]), row[4].strip() == "1"))
        except (ValueError, IndexError):
            raise DataError(f"malformed detection row {row!r}", path=path, line=n) from None
    return out


def write_sweep(path_or_file, rows, meta: Mapping | None = None) -> None:
    def emit(fh):
        fh.write(_comment_block(meta))
        fh.write(",".join(SWEEP_HEADER) + "\n")
        for r in rows:
            c = r.card
            fh.write(f"{r.alpha:.4f},{c.tp},{c.fp},{c.fn},{c.score}\n")

    if isinstance(path_or_file, io.TextIOBase):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)


def read_sweep(path):
    from .evaluate import ScoreCard, SweepRow

    out = []
    for n, row in _csv_rows(path, SWEEP_HEADER):
        try:
            out.append(SweepRow(float(row[0]), ScoreCard(int(row[1]), int(row[2]),
                                                         int(row[3]))))
        except (ValueError, IndexError):
            raise DataError(f"malformed sweep row {row!r}", path=path, line=n) from None
    return out


def _csv_rows(path, header):
    text = _read_text(path)
    lines = list(_data_lines(text))
    if not lines:
        raise DataError(f"missing header {','.join(header)!r}", path=path)
    n, first = lines[0]
    if [h.strip() for h in first.split(",")] != header:
        raise DataError(f"expected header {','.join(header)!r}", path=path, line=n)
    reader = csv.reader([line for _, line in lines[1:]])
    return [(lines[i + 1][0], row) for i, row in enumerate(reader)]
