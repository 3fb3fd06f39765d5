"""Figures for the seminorm report."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_ratios(bound, path):
    """Efficiency ratio and certified bound against the family parameter."""
    good = bound.good()
    xs = [r.parameter for r in good]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(xs, [r.ratio for r in good], "o-", label="|value| / ||Z||_1")
    ax.plot(xs, [r.certified for r in good], "s--", ms=4, label="certified bound")
    ax.axhline(math.pi, color="0.5", lw=0.8, ls=":", label="pi")
    ax.set_xlabel("genus")
    ax.set_ylabel("ratio")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    # fixed metadata keeps the PNG byte-stable across runs
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
