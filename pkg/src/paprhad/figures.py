"""Matplotlib rendering of the PAPR/distortion trade-off curves."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["STYLE", "plot_tradeoff"]

STYLE = {
    "glse": {"color": "#0072bd", "marker": "o", "linestyle": "--", "label": "PAPR-limited GLSE"},
    "rzf-clipped": {"color": "#d95319", "marker": "s", "linestyle": ":", "label": "RZF + clipping"},
}

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def plot_tradeoff(points, path, title: str | None = None, figsize=(4.5, 3.2), dpi: int = 150):
    """Average RSS against average PAPR (dB), one curve per scheme.

    Points are connected in PAPR order. Writes the figure to ``path``; the
    format follows the suffix.
    """
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize)
        schemes = list(dict.fromkeys(p.scheme for p in points))
        for scheme in schemes:
            pts = sorted((p for p in points if p.scheme == scheme), key=lambda p: p.papr_db)
            style = STYLE.get(scheme, {"label": scheme, "marker": "x"})
            ax.plot([p.papr_db for p in pts], [p.rss_mean for p in pts], markersize=3.5, linewidth=1, **style)
        ax.set_xlabel("average PAPR [dB]")
        ax.set_ylabel("average RSS")
        if title:
            ax.set_title(title)
        if schemes:
            ax.legend(loc="upper right", frameon=False)
        fig.tight_layout()
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=dpi)
        plt.close(fig)
    return Path(path)
