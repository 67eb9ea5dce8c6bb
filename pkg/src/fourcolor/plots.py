"""Figure rendering for the CLI report path (headless, deterministic PNGs)."""

from __future__ import annotations

from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .codec import PALETTE  # noqa: E402

_METADATA = {"Software": "fourcolor"}  # fixed so repeated renders hash identically
_DPI = 120


def _save(fig, path) -> None:
    fig.savefig(path, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def save_color_usage_figure(usage: Mapping, path) -> None:
    """Scatter + box of per-image color counts, and total cells per color."""
    per_image = usage["per_image"]
    counts = [img["colors_used"] for img in per_image]
    totals = usage["summary"]["total_cells_per_color"]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    left.scatter(range(len(counts)), counts, s=12, alpha=0.6, color="#2d6fb3")
    if counts:
        box = left.boxplot([counts], positions=[len(counts) + max(2, len(counts) // 20)],
                           widths=max(1.5, len(counts) / 25))
        for line in box["medians"]:
            line.set_color("#b3402d")
    left.set_xlabel("image")
    left.set_ylabel("colors used")
    left.set_yticks([0, 1, 2, 3, 4])
    left.set_title("colors per image")
    labels = ["1", "2", "3", "4"]
    values = [totals[c] for c in labels]
    bar_colors = ["#%02x%02x%02x" % PALETTE[i] for i in (1, 2, 3, 4)]
    right.bar(labels, values, color=bar_colors)
    right.set_xlabel("color")
    right.set_ylabel("cells")
    right.set_title("cells per color")
    fig.tight_layout()
    _save(fig, path)


def save_degree_figure(degrees: Mapping, path) -> None:
    """Histogram of per-image maximum degree."""
    hist = degrees["max_degree_histogram"]
    keys = sorted(hist, key=int)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(keys, [hist[k] for k in keys], color="#2d6fb3")
    ax.set_xlabel("max degree")
    ax.set_ylabel("images")
    ax.set_title("adjacency degree distribution")
    fig.tight_layout()
    _save(fig, path)


def save_metrics_figure(payload: Mapping, path) -> None:
    """Box plots of the per-image metric distributions."""
    names = ("dice", "aji", "dq", "sq", "pq")
    series = [[img[m] for img in payload["images"]] for m in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.boxplot(series, tick_labels=[m.upper() for m in names])
    ax.set_ylim(-0.05, 1.05)
    ax.set_ylabel("score")
    ax.set_title("per-image metrics")
    fig.tight_layout()
    _save(fig, path)
