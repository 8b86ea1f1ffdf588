"""Window-based scoring of detections and the alpha sweep."""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .data import AnomalyWindow
from .detect import DetectorConfig, run
from .errors import ConfigError

__all__ = ["ScoreCard", "SweepRow", "score", "default_alphas", "sweep", "best_row"]

TP_VALUE = 10
FP_VALUE = -1
FN_VALUE = -10


@dataclass(frozen=True)
class ScoreCard:
    tp: int
    fp: int
    fn: int

    @property
    def score(self) -> int:
        return TP_VALUE * self.tp + FP_VALUE * self.fp + FN_VALUE * self.fn


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    card: ScoreCard


def score(detections, windows: Sequence[AnomalyWindow]) -> ScoreCard:
    """TP/FP/FN counts of ``detections`` against sorted anomaly windows.

    A window with at least one detection inside it (bounds inclusive) is a
    single TP however many detections it holds; a window with none is an
    FN; every detected record outside all windows is a separate FP.
    """
    starts = [w.start for w in windows]
    hit = [False] * len(windows)
    fp = 0
    for rec in detections:
        if not rec.detected:
            continue
        i = bisect.bisect_right(starts, rec.timestamp) - 1
        if i >= 0 and windows[i].contains(rec.timestamp):
            hit[i] = True
        else:
            fp += 1
    tp = sum(hit)
    return ScoreCard(tp, fp, len(windows) - tp)


def default_alphas() -> list[float]:
    """0.0005, 0.0010, ..., 0.0500 (100 values)."""
    return [round(0.0005 * i, 4) for i in range(1, 101)]


def _check_alphas(alphas) -> list[float]:
    alphas = list(alphas)
    if not alphas:
        raise ConfigError("alpha grid is empty")
    for a in alphas:
        if not (isinstance(a, (int, float)) and math.isfinite(a) and 0.0 < a < 1.0):
            raise ConfigError(f"alpha must lie in (0, 1), got {a!r}")
    return [float(a) for a in alphas]


def _one_run(args) -> SweepRow:
    points, windows, config = args
    return SweepRow(config.alpha, score(run(points, config), windows))


def sweep(stream, windows: Sequence[AnomalyWindow], base_config: DetectorConfig | None = None,
          alphas: Sequence[float] | None = None, workers: int = 1) -> list[SweepRow]:
    """Score one detector run per alpha; rows come back in grid order.

    Runs are independent, so ``workers > 1`` spreads them over processes
    without changing the result.
    """
    base_config = base_config or DetectorConfig()
    alphas = _check_alphas(default_alphas() if alphas is None else alphas)
    if base_config.tracker != "ewma":
        raise ConfigError("the alpha sweep needs an ewma tracker")
    points = [(p.timestamp, p.value) if hasattr(p, "timestamp") else tuple(p)
              for p in stream]
    windows = list(windows)
    jobs = [(points, windows, base_config.replace(alpha=a)) for a in alphas]
    if workers <= 1:
        return [_one_run(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_run, jobs))


def best_row(rows: Sequence[SweepRow]) -> SweepRow:
    """Highest-scoring row; ties go to the earliest grid point."""
    best = max(range(len(rows)), key=lambda i: (rows[i].card.score, -i))
    return rows[best]
