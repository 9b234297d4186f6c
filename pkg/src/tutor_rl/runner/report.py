"""Formatted result tables from the summary CSV, plus the size correlation."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..metrics import ZeroVariance, pearson, read_summary_csv


def _mean(values: list[float]) -> float:
    return float(np.mean(values)) if values else float("nan")


def aggregate_scores(rows: list[dict]) -> dict[tuple, float]:
    """Mean convergence score per (environment, algorithm, tutor, reuse) cell."""
    grouped: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        if row["convergence_score"] == "":
            continue
        key = (row["environment"], row["algorithm"], row["tutor"], row["reuse"])
        grouped[key].append(float(row["convergence_score"]))
    return {key: _mean(vals) for key, vals in sorted(grouped.items())}


def aggregate_time(rows: list[dict]) -> dict[tuple, dict]:
    """Reuse counts, response times, and saved minutes per (environment, tutor)."""
    grouped: dict[tuple, list[dict]] = defaultdict(list)
    for row in rows:
        if row["tutor"] == "none":
            continue
        grouped[(row["environment"], row["tutor"])].append(row)
    out = {}
    for key, group in sorted(grouped.items()):
        reuses = [int(r["reuses"]) for r in group]
        latencies = [float(r["wall_clock_seconds"]) / int(r["fresh_queries"])
                     for r in group if int(r["fresh_queries"]) > 0]
        saved = [float(r["saved_minutes"]) for r in group]
        out[key] = {
            "mean_reuses": _mean(reuses),
            "mean_response_seconds": _mean(latencies),
            "mean_saved_minutes": _mean(saved),
        }
    return out


def size_correlation(rows: list[dict], tutor_sizes: dict[str, float]):
    """Correlation between tutor size and mean cell score, when sizes are known."""
    cells = aggregate_scores(rows)
    xs, ys = [], []
    for (env, algo, tutor, reuse), score in cells.items():
        model = tutor.partition(":")[2] or tutor
        size = tutor_sizes.get(tutor, tutor_sizes.get(model))
        if size is not None and not np.isnan(score):
            xs.append(float(size))
            ys.append(score)
    if len(xs) < 2:
        return None
    try:
        return pearson(xs, ys)
    except ZeroVariance:
        return None


def format_report(summary_path, tutor_sizes: dict[str, float] | None = None) -> str:
    """Render the score grid and the time-saved grid as fixed-width text."""
    rows = read_summary_csv(summary_path)
    lines = ["convergence scores (mean over seeds)",
             f"{'environment':<14}{'algorithm':<11}{'tutor':<26}{'reuse':<7}{'score':>9}"]
    for (env, algo, tutor, reuse), score in aggregate_scores(rows).items():
        lines.append(f"{env:<14}{algo:<11}{tutor:<26}{reuse:<7}{score:>9.4f}")

    lines += ["", "advice reuse time accounting (mean over runs)",
              f"{'environment':<14}{'tutor':<26}{'reuses':>8}"
              f"{'resp (s)':>10}{'saved (min)':>13}"]
    for (env, tutor), cell in aggregate_time(rows).items():
        lines.append(
            f"{env:<14}{tutor:<26}{cell['mean_reuses']:>8.1f}"
            f"{cell['mean_response_seconds']:>10.2f}"
            f"{cell['mean_saved_minutes']:>13.2f}")

    if tutor_sizes:
        result = size_correlation(rows, tutor_sizes)
        lines.append("")
        if result is None:
            lines.append("tutor size correlation: not enough sized cells")
        else:
            r, p = result
            p_text = "n/a (needs >= 3 points)" if p is None else f"{p:.4f}"
            lines.append(
                f"tutor size vs score: pearson r = {r:.4f}, p = {p_text}")
    return "\n".join(lines)
