"""Figures written next to an evaluation report."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import MetricsReport, PairDetails  # noqa: E402


def report_figure(report: MetricsReport, details: PairDetails, path: str | os.PathLike) -> None:
    """Three histograms: per-row gap fraction, per-pair p-score, per-pair distortion."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))

    ax = axes[0]
    ax.hist(100 * details.row_gap_fraction, bins=40, color="0.4")
    ax.axvline(report.gap_percent, color="C3", lw=1)
    ax.set_xlabel("% gaps per row")
    ax.set_ylabel("rows")

    ax = axes[1]
    if details.p_scores.size:
        ax.hist(details.p_scores, bins=40, range=(0, 1), color="0.4")
        ax.axvline(report.p_avg, color="C3", lw=1)
    ax.set_xlabel("p-score per pair")
    ax.set_ylabel("pairs")

    ax = axes[2]
    d = details.distortions[~np.isnan(details.distortions)]
    if d.size:
        ax.hist(d, bins=40, color="0.4")
        ax.axvline(report.distortion, color="C3", lw=1)
    ax.set_xlabel("distortion per pair")

    fig.suptitle(
        f"width {report.width}  stretch {report.stretch:.2f}  "
        f"{report.pair_count} pairs from {report.sample_size} rows",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
