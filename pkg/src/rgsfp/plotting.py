"""Histogram figures for sampled fixed-point counts.

Figures are drawn with the Agg backend and fixed styling so that the same
histogram always produces the same SVG bytes.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .fixdist import FixDist, distribution  # noqa: E402
from .sampler import Histogram  # noqa: E402

# Fixed figure constants (inches / dpi / colours).
FIG_WIDTH = 6.4
FIG_HEIGHT = 4.0
DPI = 100
BAR_COLOR = "#4c72b0"
EXACT_COLOR = "#dd8452"
FONT_SIZE = 10
# Bins beyond the last one with exact mass above this (and no samples) are not drawn.
DISPLAY_CUTOFF = 1e-5

_RC = {
    "svg.hashsalt": "rgsfp",
    "svg.fonttype": "none",
    "font.size": FONT_SIZE,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _display_range(hist: Histogram, exact: FixDist) -> int:
    last = 1
    for j, count, _emp, ex in hist.rows(exact):
        if count or float(ex) > DISPLAY_CUTOFF:
            last = j
    return last


def histogram_figure(hist: Histogram, exact: Optional[FixDist] = None, title: Optional[str] = None):
    exact = exact or distribution(hist.n)
    last = _display_range(hist, exact)
    rows = [r for r in hist.rows(exact) if r[0] <= last]
    js = [r[0] for r in rows]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(FIG_WIDTH, FIG_HEIGHT), dpi=DPI)
        ax.bar(js, [float(r[2]) for r in rows], width=0.8, color=BAR_COLOR, label="empirical")
        ax.plot(js, [float(r[3]) for r in rows], "o", color=EXACT_COLOR, ms=4, label="exact")
        ax.set_xlabel("number of fixed points $j$")
        ax.set_ylabel("probability")
        ax.set_title(title or f"n = {hist.n}, {hist.total} samples")
        ax.legend(frameon=False)
        fig.tight_layout()
    return fig


def render_svg(hist: Histogram, exact: Optional[FixDist] = None, header: Optional[str] = None) -> str:
    """SVG text of the histogram; ``header`` becomes an XML comment after the declaration."""
    fig = histogram_figure(hist, exact)
    buf = io.StringIO()
    with plt.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    text = buf.getvalue()
    if header:
        comment = "<!-- " + header.replace("--", "- -") + " -->\n"
        decl_end = text.find("?>")
        if text.startswith("<?xml") and decl_end >= 0:
            cut = text.index("\n", decl_end) + 1
            text = text[:cut] + comment + text[cut:]
        else:
            text = comment + text
    return text


def save_figure(hist: Histogram, path: Path | str, exact: Optional[FixDist] = None) -> Path:
    """Write the figure; the format follows the file extension (svg, png, pdf)."""
    path = Path(path)
    if path.suffix.lower() == ".svg":
        path.write_text(render_svg(hist, exact))
        return path
    fig = histogram_figure(hist, exact)
    with plt.rc_context(_RC):
        fig.savefig(path, metadata={"Software": None} if path.suffix.lower() == ".png" else None)
    plt.close(fig)
    return path
