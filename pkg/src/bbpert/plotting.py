"""Matplotlib rendering of convergence profiles (static scatter, file output only)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

MARKERS = ["o", "s", "^", "D", "v", "x", "+"]


def publication_style():
    plt.rcParams.update({
        "font.size": 11,
        "axes.labelsize": 12,
        "legend.fontsize": 10,
        "legend.frameon": False,
        "xtick.direction": "in",
        "ytick.direction": "in",
        "svg.hashsalt": "bbpert",
        "svg.fonttype": "none",
    })


def render_profiles(profiles: dict, path, width: float = 5.0, height: float = 3.6) -> Path:
    """Scatter ``log10|E_j/E_0|`` against ``j`` for each labelled profile.

    ``profiles`` maps a label to a sequence of ``(j, value)`` pairs with
    terminated points already dropped.  The format follows the file suffix.
    """
    path = Path(path)
    publication_style()
    fig, ax = plt.subplots(figsize=(width, height))
    for i, (label, points) in enumerate(profiles.items()):
        js = [j for j, _ in points]
        vals = [float(v) for _, v in points]
        ax.plot(js, vals, linestyle="none", marker=MARKERS[i % len(MARKERS)], markersize=4,
                markerfacecolor="none", label=label)
    ax.set_xlabel("j")
    ax.set_ylabel(r"$\log_{10}|E_j/E_0|$")
    if len(profiles) > 1:
        ax.legend(loc="upper right")
    fig.tight_layout()
    # a fixed (empty) date keeps repeated renders byte-identical
    metadata = {"Date": None} if path.suffix.lower() == ".svg" else {}
    fig.savefig(path, metadata=metadata)
    plt.close(fig)
    return path
