"""Self-contained SVG scatter plots of disc-game embeddings.

Each plot draws the clockwise advantage field ``v(y) = [y_2, -y_1]`` as a grid
of faint arrows behind the agent points. Output is plain text with fixed
number formatting, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .pta import DiscEmbedding

SIZE = 480
MARGIN = 40
FIELD_GRID = 9
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _colors(values: Sequence | None, n: int) -> tuple[list[str], list[tuple[str, str]]]:
    if values is None:
        return [PALETTE[0]] * n, []
    vals = list(values)
    if all(isinstance(v, (int, float)) for v in vals):
        arr = np.asarray(vals, dtype=float)
        lo, hi = float(arr.min()), float(arr.max())
        t = (arr - lo) / (hi - lo) if hi > lo else np.zeros(n)
        # blue -> red ramp
        cols = [f"#{int(255 * u):02x}40{int(255 * (1 - u)):02x}" for u in t]
        return cols, [(f"{lo:g}", "#0040ff"), (f"{hi:g}", "#ff4000")]
    cats = sorted({str(v) for v in vals})
    lut = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(cats)}
    return [lut[str(v)] for v in vals], [(c, lut[c]) for c in cats]


def disc_game_svg(
    mode: DiscEmbedding,
    labels: Sequence[str] | None = None,
    color_by: Sequence | None = None,
    title: str | None = None,
) -> str:
    """SVG document for one mode; ``color_by`` holds one attribute value per agent."""
    pts = np.asarray(mode.coords, dtype=float)
    n = len(pts)
    extent = float(np.max(np.abs(pts))) if n else 0.0
    extent = 1.1 * extent if extent > 0 else 1.0
    scale = (SIZE - 2 * MARGIN) / (2 * extent)
    cx = cy = SIZE / 2

    def sx(x: float) -> float:
        return cx + x * scale

    def sy(y: float) -> float:
        return cy - y * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        '<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#c8c8c8"/></marker></defs>',
        '<g id="field" stroke="#c8c8c8" stroke-width="1" marker-end="url(#head)">',
    ]
    step = 2 * extent / (FIELD_GRID + 1)
    arrow = 0.4 * step
    for a in range(1, FIELD_GRID + 1):
        for b in range(1, FIELD_GRID + 1):
            x, y = -extent + a * step, -extent + b * step
            vx, vy = y, -x
            norm = math.hypot(vx, vy)
            if norm == 0:
                continue
            dx, dy = arrow * vx / norm, arrow * vy / norm
            out.append(
                f'<line x1="{_fmt(sx(x - dx / 2))}" y1="{_fmt(sy(y - dy / 2))}" '
                f'x2="{_fmt(sx(x + dx / 2))}" y2="{_fmt(sy(y + dy / 2))}"/>'
            )
    out.append("</g>")
    out.append(
        f'<g id="axes" stroke="#808080" stroke-width="0.5">'
        f'<line x1="{MARGIN}" y1="{_fmt(cy)}" x2="{SIZE - MARGIN}" y2="{_fmt(cy)}"/>'
        f'<line x1="{_fmt(cx)}" y1="{MARGIN}" x2="{_fmt(cx)}" y2="{SIZE - MARGIN}"/></g>'
    )
    cols, legend = _colors(color_by, n)
    out.append('<g id="agents" stroke="black" stroke-width="0.3">')
    for i, (x, y) in enumerate(pts):
        tip = f"<title>{escape(str(labels[i]))}</title>" if labels is not None else ""
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{cols[i]}">{tip}</circle>')
    out.append("</g>")
    heading = title or f"disc game {mode.mode_index + 1} (omega = {mode.omega:.4g})"
    out.append(f'<text x="{MARGIN}" y="{MARGIN / 2 + 5}" font-family="sans-serif" font-size="14">'
               f"{escape(heading)}</text>")
    for j, (name, col) in enumerate(legend[:20]):
        y = MARGIN + 14 * j
        out.append(f'<circle cx="{SIZE - 110}" cy="{y}" r="4" fill="{col}"/>'
                   f'<text x="{SIZE - 100}" y="{y + 4}" font-family="sans-serif" font-size="11">'
                   f"{escape(name)}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_disc_game_svg(mode: DiscEmbedding, path: str | Path, **kw) -> None:
    Path(path).write_text(disc_game_svg(mode, **kw))
