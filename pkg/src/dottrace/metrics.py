"""Normalized per-session performance metrics.

Raw task-completion time, mistake count, and mean resistance change are not
comparable across dot models of different sizes, so each is normalized:
time per dot (s/dot), mistakes per second, and resistance change per second
(%/s). The measurement window for all three runs from the first to the
last dot hit.
"""

import csv
from dataclasses import dataclass, fields

from .errors import (DataFormatError, DegenerateDataError,
                     IncompleteSessionError, TraceAlignmentError)
from .geometry import Configuration, Orientation
from .sensor import SensorTrace, mean_resistance_change
from .session import SessionLog


@dataclass(frozen=True)
class MetricsRecord:
    participant_id: str
    orientation: str
    configuration: str
    dot_count: int
    tct_raw: float              # seconds, first to last dot hit
    norm_tct: float             # seconds per dot
    mistakes: int
    norm_mistakes: float        # mistakes per second
    mean_resistance_pct: float  # mean percent change inside the window
    norm_resistance: float      # percent change per second


def _hit_window(log: SessionLog):
    if not log.complete:
        raise IncompleteSessionError(
            f"session for {log.participant_id!r} did not hit every dot")
    hit_ts = [e.t for e in log.dot_hits()]
    t0, t1 = min(hit_ts), max(hit_ts)
    if t1 <= t0:
        raise DegenerateDataError("zero-duration hit window")
    return t0, t1


def compute_tct(log: SessionLog) -> tuple:
    """(tct_raw, norm_tct): window length and seconds per dot."""
    t0, t1 = _hit_window(log)
    tct = t1 - t0
    return tct, tct / log.model["dot_count"]


def compute_mistakes(log: SessionLog) -> tuple:
    """(mistakes, norm_mistakes): count and mistakes per second."""
    tct, _ = compute_tct(log)
    n = len(log.mistakes())
    return n, n / tct


def compute_resistance_metric(log: SessionLog, trace: SensorTrace,
                              r_min: float | None = None) -> tuple:
    """(mean_resistance_pct, norm_resistance) over the hit window."""
    t0, t1 = _hit_window(log)
    if not any(t0 <= s.t <= t1 for s in trace.samples):
        raise TraceAlignmentError(
            f"trace has no samples inside hit window [{t0:.3f}, {t1:.3f}]")
    mean_pct = mean_resistance_change(trace, window=(t0, t1), r_min=r_min)
    return mean_pct, mean_pct / (t1 - t0)


def build_record(log: SessionLog, trace: SensorTrace,
                 r_min: float | None = None) -> MetricsRecord:
    tct_raw, norm_tct = compute_tct(log)
    mistakes, norm_mistakes = compute_mistakes(log)
    mean_pct, norm_res = compute_resistance_metric(log, trace, r_min=r_min)
    return MetricsRecord(
        participant_id=log.participant_id,
        orientation=log.orientation.value,
        configuration=log.configuration.value,
        dot_count=log.model["dot_count"],
        tct_raw=tct_raw,
        norm_tct=norm_tct,
        mistakes=mistakes,
        norm_mistakes=norm_mistakes,
        mean_resistance_pct=mean_pct,
        norm_resistance=norm_res,
    )


_COLUMNS = [f.name for f in fields(MetricsRecord)]
_FLOAT_COLUMNS = {"tct_raw", "norm_tct", "norm_mistakes",
                  "mean_resistance_pct", "norm_resistance"}


def write_metrics_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for rec in records:
            row = []
            for col in _COLUMNS:
                value = getattr(rec, col)
                row.append(repr(float(value)) if col in _FLOAT_COLUMNS else value)
            writer.writerow(row)


def read_metrics_csv(path) -> list:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataFormatError(f"cannot read metrics: {exc}", path=str(path)) from exc
    if not rows or rows[0] != _COLUMNS:
        raise DataFormatError(f"unexpected metrics header in {path}", path=str(path))
    out = []
    for i, row in enumerate(rows[1:], start=2):
        try:
            Orientation(row[1]), Configuration(row[2])
            out.append(MetricsRecord(
                participant_id=row[0], orientation=row[1], configuration=row[2],
                dot_count=int(row[3]), tct_raw=float(row[4]), norm_tct=float(row[5]),
                mistakes=int(row[6]), norm_mistakes=float(row[7]),
                mean_resistance_pct=float(row[8]), norm_resistance=float(row[9])))
        except (IndexError, ValueError) as exc:
            raise DataFormatError(f"bad metrics row {i}: {row}",
                                  path=str(path)) from exc
    return out
