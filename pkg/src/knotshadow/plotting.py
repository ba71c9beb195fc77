"""Matplotlib figures: chord diagrams and search histograms."""
from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .curve import KnotProjection  # noqa: E402


def chord_figure(P: KnotProjection, title: str | None = None):
    """Circle with the 2n passages in traversal order and one chord per double point.

    Chords of ``+`` double points are solid, ``-`` dashed.
    """
    code = P.code()
    m = len(code.word)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, lw=1.5, color="black"))
    ang = [math.pi / 2 - 2 * math.pi * k / max(m, 1) for k in range(m)]
    pts = [(math.cos(a), math.sin(a)) for a in ang]
    where: dict[int, list[int]] = {}
    for k, lab in enumerate(code.word):
        where.setdefault(lab, []).append(k)
    cmap = plt.get_cmap("tab20")
    for lab, (i, j) in sorted(where.items()):
        s = code.signs[lab - 1]
        (x0, y0), (x1, y1) = pts[i], pts[j]
        ax.plot([x0, x1], [y0, y1], color=cmap((lab - 1) % 20), lw=1.4, ls="-" if s > 0 else "--")
    for k, lab in enumerate(code.word):
        x, y = pts[k]
        ax.plot([x], [y], "o", color="black", ms=3)
        sign = "+" if code.signs[lab - 1] > 0 else "-"
        ax.text(1.12 * x, 1.12 * y, f"{lab}{sign}", ha="center", va="center", fontsize=8)
    if m:
        ax.annotate("", xy=(0.12, 1.0), xytext=(-0.12, 1.0), arrowprops=dict(arrowstyle="->", lw=1.2))
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.set_aspect("equal")
    ax.axis("off")
    if title is None:
        title = f"n = {P.n}: {code}" if P.n <= 8 else f"n = {P.n}"
    ax.set_title(title, fontsize=9)
    return fig


def save_figure(fig, path: str | Path | None, fmt: str = "svg") -> bytes | None:
    """Write to ``path``; with no path return the encoded bytes.

    SVG output is byte-reproducible (no date, fixed element ids).
    """
    meta = {"Date": None} if fmt == "svg" else None
    target = io.BytesIO() if path is None else path
    with matplotlib.rc_context({"svg.hashsalt": "knotshadow"}):
        fig.savefig(target, format=fmt, metadata=meta)
    plt.close(fig)
    return target.getvalue() if path is None else None


def render_chord_diagram(P: KnotProjection, path: str | Path | None = None, fmt: str = "svg", title: str | None = None) -> bytes | None:
    return save_figure(chord_figure(P, title), path, fmt)


def search_histogram(states_by_crossings: Mapping[int, int], path: str | Path, title: str = "", fmt: str = "svg") -> None:
    """Bar chart of visited states per crossing count."""
    ks = sorted(int(k) for k in states_by_crossings)
    vs = [states_by_crossings[k] if k in states_by_crossings else states_by_crossings[str(k)] for k in ks]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(ks, vs, color="#4c72b0")
    ax.set_xlabel("double points")
    ax.set_ylabel("states visited")
    ax.set_yscale("log")
    ax.set_xticks(ks)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    save_figure(fig, path, fmt)
