"""Matplotlib figures for the report path; written next to the JSON output."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_error_decay(
    levels: Sequence[int],
    series: dict[str, Sequence[Fraction]],
    path: Union[str, Path],
    title: str,
    ylabel: str = "exact error (log scale)",
) -> Path:
    """Plot one or more exact error sequences against the level index.

    Zero errors cannot sit on a log axis, so they are drawn at a floor one
    decade below the smallest positive value and annotated as exact zeros.
    """
    path = Path(path)
    positives = [
        float(v) for vs in series.values() for v in vs if v > 0
    ]
    floor = min(positives) / 10 if positives else 1e-18
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in series.items():
        ys = [float(v) if v > 0 else floor for v in values]
        zero_marks = [i for i, v in enumerate(values) if v == 0]
        ax.semilogy(list(levels), ys, marker="o", label=label)
        for i in zero_marks:
            ax.annotate(
                "0",
                (levels[i], floor),
                textcoords="offset points",
                xytext=(0, 6),
                ha="center",
                fontsize=8,
            )
    ax.set_xlabel("level")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
