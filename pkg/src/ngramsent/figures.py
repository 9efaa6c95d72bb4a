"""Figure rendering for evaluation reports.

Renders alongside the machine-readable report: a per-class metrics chart
and a histogram of the ensemble's positive-class probability split by
gold label.  Files are written headlessly (Agg backend), PNG format.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .corpus import NEGATIVE, POSITIVE
from .metrics import MetricsReport

_NEG_COLOR = "#c44e52"
_POS_COLOR = "#4c72b0"


def save_metrics_figure(report: MetricsReport, path: str | Path) -> Path:
    """Bar chart of per-class precision/recall/F1 with accuracy and macro
    F1 in the title."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    measures = ("precision", "recall", "f1")
    width = 0.38
    for offset, (label, color) in enumerate(
        ((NEGATIVE, _NEG_COLOR), (POSITIVE, _POS_COLOR))
    ):
        scores = report.per_class[label]
        values = [getattr(scores, m) for m in measures]
        xs = [i + (offset - 0.5) * width for i in range(len(measures))]
        ax.bar(xs, values, width=width, color=color, label=f"class {label:+d}")
    ax.set_xticks(range(len(measures)))
    ax.set_xticklabels(measures)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    title = f"accuracy {report.accuracy:.4f}   macro F1 {report.macro_f1:.4f}"
    if report.broken_rate is not None:
        title += f"   broken rate {report.broken_rate:.4f}"
    ax.set_title(title, fontsize=10)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_probability_figure(
    samples: Sequence[tuple[int, float]], path: str | Path
) -> Path:
    """Histogram of positive-class probability, one series per gold label.

    `samples` holds (gold label, positive-class probability) pairs.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    bins = [i / 20 for i in range(21)]
    for label, color in ((NEGATIVE, _NEG_COLOR), (POSITIVE, _POS_COLOR)):
        values = [p for gold, p in samples if gold == label]
        if values:
            ax.hist(values, bins=bins, alpha=0.65, color=color,
                    label=f"gold {label:+d}")
    ax.axvline(0.5, color="black", linewidth=0.8, linestyle="--")
    ax.set_xlabel("ensemble positive-class probability")
    ax.set_ylabel("examples")
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
