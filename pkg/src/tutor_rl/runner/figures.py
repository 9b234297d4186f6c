"""Learning-curve figures rendered next to the emitted CSV data."""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .. import metrics  # noqa: E402
from ..records import RunRecord  # noqa: E402

GRID_POINTS = 200


def _resample(curve: metrics.NormalizedCurve, grid: np.ndarray) -> np.ndarray:
    return np.interp(grid, curve.t, curve.p_hat)


def render_learning_curves(records: list[RunRecord], out_dir: str,
                           window: int = 7) -> list[str]:
    """One PNG per environment: normalized smoothed reward over normalized
    training time, one line per cell (seed-averaged). Returns written paths."""
    by_env: dict[str, list[RunRecord]] = defaultdict(list)
    for record in records:
        if record.episode_returns:
            by_env[record.environment].append(record)

    paths = []
    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    os.makedirs(out_dir, exist_ok=True)
    for env, group in sorted(by_env.items()):
        smoothed = [metrics.smooth_for_plot(
            metrics.PerformanceCurve(r.episode_returns), window) for r in group]
        try:
            normalized = metrics.normalize_set(smoothed)
        except metrics.DegenerateRange:
            continue
        cells: dict[tuple, list[np.ndarray]] = defaultdict(list)
        for record, curve in zip(group, normalized):
            cells[(record.algorithm, record.tutor, record.reuse)].append(
                _resample(curve, grid))

        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (algo, tutor, reuse), curves in sorted(cells.items()):
            label = f"{algo} / {tutor}" + (f" / reuse={reuse}" if reuse != "na" else "")
            ax.plot(grid, np.mean(curves, axis=0), label=label, linewidth=1.4)
        ax.set_xlabel("normalized training time")
        ax.set_ylabel("normalized collected reward")
        ax.set_title(env)
        ax.set_ylim(-0.02, 1.02)
        ax.legend(fontsize=7, loc="best")
        fig.tight_layout()
        path = os.path.join(out_dir, f"curves_{env}.png")
        fig.savefig(path, dpi=140)
        plt.close(fig)
        paths.append(path)
    return paths
