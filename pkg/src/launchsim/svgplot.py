"""Minimal deterministic SVG renderer: line series, quantile bands, axis
ticks, legends, vertical markers, and colored grid heatmaps.

No plotting dependency; output is a standalone SVG 1.1 document whose bytes
depend only on the input data (coordinates are formatted to fixed
precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

WIDTH = 860
HEIGHT = 520
MARGIN_L = 70
MARGIN_R = 220
MARGIN_T = 46
MARGIN_B = 56

PALETTE = ("#1f6fb4", "#e07b28", "#2b8a5f", "#9550a8", "#b33939")


@dataclass
class Series:
    xs: Sequence[float]
    ys: Sequence[float]
    label: str
    color: str
    width: float = 1.6
    dash: str | None = None


@dataclass
class Band:
    xs: Sequence[float]
    lo: Sequence[float]
    hi: Sequence[float]
    label: str
    color: str
    opacity: float = 0.25


@dataclass
class VLine:
    x: float
    label: str
    color: str = "#444444"


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    bands: list[Band] = field(default_factory=list)
    vlines: list[VLine] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _fmt(v: float) -> str:
    return format(v, ".2f")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(v) < 1e-12 * span else v)
        v += step
    return ticks


def _tick_label(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return format(v, ".4g")


class _Scale:
    def __init__(self, lo: float, hi: float, out_lo: float, out_hi: float):
        if hi == lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.out_lo, self.out_hi = out_lo, out_hi

    def __call__(self, v: float) -> float:
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + frac * (self.out_hi - self.out_lo)


def render(fig: Figure) -> str:
    """Render the figure to an SVG 1.1 document string."""
    xs_all: list[float] = []
    ys_all: list[float] = []
    for s in fig.series:
        xs_all += [float(v) for v in s.xs]
        ys_all += [float(v) for v in s.ys]
    for b in fig.bands:
        xs_all += [float(v) for v in b.xs]
        ys_all += [float(v) for v in b.lo] + [float(v) for v in b.hi]
    for v in fig.vlines:
        xs_all.append(float(v.x))
    if not xs_all:
        xs_all = [0.0, 1.0]
    if not ys_all:
        ys_all = [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    y_pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo -= y_pad
    y_hi += y_pad
    sx = _Scale(x_lo, x_hi, MARGIN_L, WIDTH - MARGIN_R)
    sy = _Scale(y_lo, y_hi, HEIGHT - MARGIN_B, MARGIN_T)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{MARGIN_L}" y="26" font-family="sans-serif" font-size="16" '
        f'fill="#111111">{_esc(fig.title)}</text>',
    ]

    # axes frame and ticks
    ax_b = HEIGHT - MARGIN_B
    ax_r = WIDTH - MARGIN_R
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{ax_r - MARGIN_L}" '
        f'height="{ax_b - MARGIN_T}" fill="none" stroke="#333333"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{ax_b}" x2="{_fmt(px)}" y2="{ax_b + 5}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{ax_b + 18}" font-family="sans-serif" font-size="11" '
            f'fill="#333333" text-anchor="middle">{_tick_label(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(py)}" x2="{MARGIN_L}" y2="{_fmt(py)}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(py + 4)}" font-family="sans-serif" font-size="11" '
            f'fill="#333333" text-anchor="end">{_tick_label(t)}</text>'
        )
    parts.append(
        f'<text x="{(MARGIN_L + ax_r) // 2}" y="{HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="13" fill="#111111" text-anchor="middle">{_esc(fig.xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(MARGIN_T + ax_b) // 2}" font-family="sans-serif" font-size="13" '
        f'fill="#111111" text-anchor="middle" '
        f'transform="rotate(-90 18 {(MARGIN_T + ax_b) // 2})">{_esc(fig.ylabel)}</text>'
    )

    for b in fig.bands:
        pts_hi = [f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(b.xs, b.hi)]
        pts_lo = [
            f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(reversed(b.xs), reversed(b.lo))
        ]
        parts.append(
            f'<polygon points="{" ".join(pts_hi + pts_lo)}" fill="{b.color}" '
            f'fill-opacity="{b.opacity}" stroke="none"/>'
        )
    for s in fig.series:
        pts = [f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s.xs, s.ys)]
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        parts.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{s.color}" '
            f'stroke-width="{s.width}"{dash}/>'
        )
    for v in fig.vlines:
        px = sx(v.x)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{MARGIN_T}" x2="{_fmt(px)}" y2="{ax_b}" '
            f'stroke="{v.color}" stroke-dasharray="4,3"/>'
        )
        parts.append(
            f'<text x="{_fmt(px + 4)}" y="{MARGIN_T + 14}" font-family="sans-serif" '
            f'font-size="11" fill="{v.color}">{_esc(v.label)}</text>'
        )

    # legend and notes in the right margin
    lx = ax_r + 14
    ly = MARGIN_T + 8
    for s in fig.series:
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{s.color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly + 4}" font-family="sans-serif" font-size="12" '
            f'fill="#111111">{_esc(s.label)}</text>'
        )
        ly += 18
    for b in fig.bands:
        parts.append(
            f'<rect x="{lx}" y="{ly - 8}" width="22" height="10" fill="{b.color}" '
            f'fill-opacity="{b.opacity}"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly + 2}" font-family="sans-serif" font-size="12" '
            f'fill="#111111">{_esc(b.label)}</text>'
        )
        ly += 18
    ly += 8
    for note in fig.notes:
        parts.append(
            f'<text x="{lx}" y="{ly}" font-family="sans-serif" font-size="11" '
            f'fill="#333333">{_esc(note)}</text>'
        )
        ly += 15

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_heatmap(
    title: str,
    xlabel: str,
    ylabel: str,
    xs: Sequence[float],
    ys: Sequence[float],
    values: Sequence[Sequence[float]],
    notes: Sequence[str] = (),
) -> str:
    """Grid heatmap: values[i][j] colors the cell at (xs[j], ys[i]) on a
    blue-to-red ramp between the data minimum and maximum."""
    flat = [v for row in values for v in row if math.isfinite(v)]
    v_lo = min(flat) if flat else 0.0
    v_hi = max(flat) if flat else 1.0
    if v_hi == v_lo:
        v_hi = v_lo + 1.0
    ax_r = WIDTH - MARGIN_R
    ax_b = HEIGHT - MARGIN_B
    cell_w = (ax_r - MARGIN_L) / len(xs)
    cell_h = (ax_b - MARGIN_T) / len(ys)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{MARGIN_L}" y="26" font-family="sans-serif" font-size="16" '
        f'fill="#111111">{_esc(title)}</text>',
    ]
    for i, y in enumerate(ys):
        for jx, x in enumerate(xs):
            v = values[i][jx]
            frac = (v - v_lo) / (v_hi - v_lo) if math.isfinite(v) else 0.5
            color = _ramp(frac)
            px = MARGIN_L + jx * cell_w
            py = ax_b - (i + 1) * cell_h
            parts.append(
                f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cell_w)}" '
                f'height="{_fmt(cell_h)}" fill="{color}" stroke="#ffffff" stroke-width="0.5"/>'
            )
            parts.append(
                f'<text x="{_fmt(px + cell_w / 2)}" y="{_fmt(py + cell_h / 2 + 4)}" '
                f'font-family="sans-serif" font-size="10" fill="#111111" '
                f'text-anchor="middle">{format(v, ".4g")}</text>'
            )
    for jx, x in enumerate(xs):
        parts.append(
            f'<text x="{_fmt(MARGIN_L + (jx + 0.5) * cell_w)}" y="{ax_b + 16}" '
            f'font-family="sans-serif" font-size="11" fill="#333333" '
            f'text-anchor="middle">{format(x, ".4g")}</text>'
        )
    for i, y in enumerate(ys):
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(ax_b - (i + 0.5) * cell_h + 4)}" '
            f'font-family="sans-serif" font-size="11" fill="#333333" '
            f'text-anchor="end">{format(y, ".4g")}</text>'
        )
    parts.append(
        f'<text x="{(MARGIN_L + ax_r) // 2}" y="{HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="13" fill="#111111" text-anchor="middle">{_esc(xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(MARGIN_T + ax_b) // 2}" font-family="sans-serif" font-size="13" '
        f'fill="#111111" text-anchor="middle" '
        f'transform="rotate(-90 18 {(MARGIN_T + ax_b) // 2})">{_esc(ylabel)}</text>'
    )
    ly = MARGIN_T + 8
    for note in notes:
        parts.append(
            f'<text x="{ax_r + 14}" y="{ly}" font-family="sans-serif" font-size="11" '
            f'fill="#333333">{_esc(note)}</text>'
        )
        ly += 15
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _ramp(frac: float) -> str:
    frac = min(1.0, max(0.0, frac))
    lo = (33, 102, 172)
    hi = (178, 24, 43)
    rgb = tuple(round(a + frac * (b - a)) for a, b in zip(lo, hi))
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
