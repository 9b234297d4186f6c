"""Convergence scoring, time-saved accounting, correlation, plot-data CSVs."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.special import stdtr

try:  # numpy renamed trapz in 2.0
    from numpy import trapezoid as _trapezoid
except ImportError:  # pragma: no cover
    from numpy import trapz as _trapezoid


class DegenerateRange(Exception):
    """Every value in the normalizing set is identical."""


class EmptyLedger(Exception):
    pass


class ZeroVariance(Exception):
    pass


class BadWindow(Exception):
    pass


class MissingColumns(Exception):
    pass


@dataclass
class PerformanceCurve:
    values: list[float]  # one return per completed episode, in order
    run_id: str = ""


@dataclass
class NormalizedCurve:
    t: np.ndarray  # in [0, 1]
    p_hat: np.ndarray  # in [0, 1] within the normalizing set
    run_id: str = ""


@dataclass
class TimeLedger:
    reuse_count: int
    latencies: list[float] = field(default_factory=list)
    fresh_query_count: int = 0


def index_grid(n: int) -> np.ndarray:
    """Episode indexes scaled onto [0, 1] (a single point sits at t=0)."""
    if n == 1:
        return np.zeros(1)
    return np.arange(n, dtype=np.float64) / (n - 1)


def normalize_set(curves: list[PerformanceCurve]) -> list[NormalizedCurve]:
    """Min-max scale all curves jointly, so scores stay comparable across runs."""
    if not curves or any(len(c.values) == 0 for c in curves):
        raise ValueError("need at least one non-empty curve")
    lo = min(min(c.values) for c in curves)
    hi = max(max(c.values) for c in curves)
    if hi == lo:
        raise DegenerateRange(f"all values equal {lo}")
    span = hi - lo
    out = []
    for c in curves:
        p = (np.asarray(c.values, dtype=np.float64) - lo) / span
        out.append(NormalizedCurve(index_grid(len(c.values)), p, c.run_id))
    return out


def convergence_score(curve: NormalizedCurve) -> float:
    """Area under the normalized curve over normalized training time."""
    if len(curve.p_hat) == 1:
        return float(curve.p_hat[0])
    return float(_trapezoid(curve.p_hat, curve.t))


def saved_time_minutes(ledger: TimeLedger) -> float:
    """Training time avoided by cache answers: reuses x mean response time."""
    if not ledger.latencies:
        raise EmptyLedger("no recorded response latencies")
    return ledger.reuse_count * float(np.mean(ledger.latencies)) / 60.0


def pearson(xs, ys) -> tuple[float, float | None]:
    """Sample correlation and a two-sided t-approximate p-value.

    The p-value needs at least 3 points; with exactly 2 it is None.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two equal-length vectors of >= 2 points")
    xc, yc = x - x.mean(), y - y.mean()
    sx = np.sqrt((xc * xc).sum())
    sy = np.sqrt((yc * yc).sum())
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("constant input vector")
    r = float((xc * yc).sum() / (sx * sy))
    r = max(-1.0, min(1.0, r))
    n = len(x)
    if n < 3:
        return r, None
    if abs(r) == 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return r, p


def smooth_for_plot(curve: PerformanceCurve, window: int) -> PerformanceCurve:
    """Centered moving average with shrinking edge windows; length preserved."""
    if window < 1 or window % 2 == 0:
        raise BadWindow(f"window must be odd and >= 1, got {window}")
    values = np.asarray(curve.values, dtype=np.float64)
    half = window // 2
    n = len(values)
    smoothed = [
        float(values[max(0, i - half):min(n, i + half + 1)].mean())
        for i in range(n)
    ]
    return PerformanceCurve(smoothed, curve.run_id)


# ---------------------------------------------------------------------------
# delimited outputs

RUN_CSV_COLUMNS = ["episode_index", "raw_return", "smoothed_return",
                   "t_normalized", "p_hat"]
SUMMARY_COLUMNS = ["environment", "algorithm", "tutor", "reuse", "seed",
                   "convergence_score", "fresh_queries", "reuses",
                   "saved_minutes", "wall_clock_seconds"]


def write_run_csv(path, curve: PerformanceCurve, window: int = 7) -> None:
    """Per-episode plot data; p_hat is normalized within this run alone and
    left blank when the curve is constant or a single point."""
    smoothed = smooth_for_plot(curve, window)
    n = len(curve.values)
    t = index_grid(n) if n else np.zeros(0)
    try:
        p_hat = normalize_set([curve])[0].p_hat
    except (DegenerateRange, ValueError):
        p_hat = None
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_CSV_COLUMNS)
        for i in range(n):
            writer.writerow([
                i, repr(curve.values[i]), repr(smoothed.values[i]),
                repr(float(t[i])), "" if p_hat is None else repr(float(p_hat[i])),
            ])


def write_summary_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_summary_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(SUMMARY_COLUMNS) - set(reader.fieldnames):
            raise MissingColumns(f"{path}: expected columns {SUMMARY_COLUMNS}")
        return list(reader)
