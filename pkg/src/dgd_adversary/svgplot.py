"""Minimal deterministic SVG line charts for error-versus-bound curves."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 64, 168, 24, 48
COLORS = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b"]
DASHES = ["", "", "6,4", "2,3", "", ""]


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def line_chart(x: list[float], series: dict[str, list[float | None]], title: str = "",
               xlabel: str = "k", ylabel: str = "") -> str:
    """Render ``series`` (name -> y values aligned with ``x``) as one polyline each.

    ``None`` entries break nothing; they are simply skipped.
    """
    finite = [v for ys in series.values() for v in ys if v is not None and math.isfinite(v)]
    y_hi = max(finite, default=1.0)
    y_lo = min(0.0, min(finite, default=0.0))
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    y_hi *= 1.05
    x_lo, x_hi = (min(x), max(x)) if x else (0.0, 1.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(v):
        return LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return TOP + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.2f}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{TOP + ph}" x2="{px:.2f}" y2="{TOP + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{TOP + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(f'<line x1="{LEFT - 4}" y1="{py:.2f}" x2="{LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 6}" y="{py + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {TOP + ph / 2:.2f})">{escape(ylabel)}</text>')
    for idx, (name, ys) in enumerate(series.items()):
        color = COLORS[idx % len(COLORS)]
        dash = DASHES[idx % len(DASHES)]
        pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x, ys)
                       if yv is not None and math.isfinite(yv))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline data-series="{escape(name)}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = TOP + 12 + 18 * idx
        lx = WIDTH - RIGHT + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
