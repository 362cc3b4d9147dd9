"""Minimal line-plot SVG writer (no plotting dependencies)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from ..errors import EvbcError
from .table import CsvTable

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 150, 30, 52
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class EmptyPlot(EvbcError, ValueError):
    pass


def _nice_ticks(lo: float, hi: float, target: int = 5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.6g}"


def emit_svg(table: CsvTable, x_col: str, y_cols, log_y: bool = False, title: str = "") -> str:
    """Render one polyline per y column against ``x_col``.

    Rows with a non-finite value (or a non-positive one under ``log_y``) are
    left out of that series; the number dropped is recorded in a comment.

    Raises:
        ColumnNotFound: a named column is missing.
        EmptyPlot: nothing finite to draw.
    """
    if isinstance(y_cols, str):
        y_cols = [y_cols]
    xs = table.column(x_col)
    series, dropped = [], 0
    for name in y_cols:
        pts = []
        for x, y in zip(xs, table.column(name)):
            ok = math.isfinite(x) and math.isfinite(y) and (y > 0 or not log_y)
            if ok:
                pts.append((x, math.log10(y) if log_y else y))
            else:
                dropped += 1
        series.append((name, pts))
    all_pts = [p for _, pts in series for p in pts]
    if not all_pts:
        raise EmptyPlot("no finite points to plot")

    x_lo, x_hi = min(p[0] for p in all_pts), max(p[0] for p in all_pts)
    y_lo, y_hi = min(p[1] for p in all_pts), max(p[1] for p in all_pts)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return MARGIN_T + (1 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<!-- dropped {dropped} non-plottable value(s) -->",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="18" text-anchor="middle" '
                   f'font-size="13">{escape(title)}</text>')
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="black"/>')
    for t in _nice_ticks(x_lo, x_hi):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{MARGIN_T + ph}" x2="{X:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    y_ticks = (range(math.ceil(y_lo), math.floor(y_hi) + 1) if log_y and y_hi - y_lo >= 1
               else _nice_ticks(y_lo, y_hi))
    for t in y_ticks:
        Y = sy(t)
        text = f"1e{int(t)}" if log_y and float(t).is_integer() else _label(10 ** t if log_y else t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{Y:.2f}" x2="{MARGIN_L}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{Y + 4:.2f}" text-anchor="end">{text}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_col)}</text>')
    ylab = ("log10 " if log_y else "") + ", ".join(y_cols)
    out.append(f'<text transform="translate(16 {MARGIN_T + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylab)}</text>')
    for i, (name, pts) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        if pts:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}"/>')
        ly = MARGIN_T + 14 + 18 * i
        lx = MARGIN_L + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
