"""Standalone SVG line charts of sweep rows.

Output is plain text built from fixed-precision numbers, so identical rows
always give byte-identical files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

from .model import format_alpha

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
)

LABELS = {
    "gamma": "user intensity γ = N/R",
    "alpha": "iteration cap α",
    "k": "K",
    "access_prob": "access probability",
    "mean_wr": "C_wr (write-read ops)",
    "mean_dec": "C_dec (decode ops)",
    "mean_peak_storage": "C_sto (storage items)",
}

PANEL_W, PANEL_H = 520, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50
LEGEND_W = 150


@dataclass(frozen=True)
class PlotAxes:
    x: str
    series: Tuple[str, ...]
    panels: Tuple[str, ...] = ("access_prob",)
    title: str = ""


FIG4_AXES = PlotAxes(x="gamma", series=("k", "alpha"), panels=("access_prob",),
                     title="Access probability vs user intensity")
FIG5_AXES = PlotAxes(x="alpha", series=("k", "gamma"),
                     panels=("access_prob", "mean_wr", "mean_dec", "mean_peak_storage"),
                     title="Access probability and complexity vs iteration cap")


def _get(row, name):
    return row[name] if isinstance(row, dict) else getattr(row, name)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label_value(name: str, value) -> str:
    if name == "alpha":
        return format_alpha(value)
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _grid(rows, axes: PlotAxes):
    if len(rows) < 2:
        raise ValueError("need at least two rows to draw a line")
    xs = sorted({_get(r, axes.x) for r in rows}, key=float)
    keys = sorted({tuple(_get(r, s) for s in axes.series) for r in rows},
                  key=lambda t: tuple(float(v) for v in t))
    if len(xs) < 2:
        raise ValueError(f"rows have a single {axes.x} value; nothing to draw")
    cells: Dict[Tuple, object] = {}
    for r in rows:
        key = (tuple(_get(r, s) for s in axes.series), _get(r, axes.x))
        if key in cells:
            raise ValueError(f"duplicate row for series {key[0]} at {axes.x}={key[1]}")
        cells[key] = r
    if len(cells) != len(xs) * len(keys):
        raise ValueError("rows do not form a complete grid over x and series")
    return xs, keys, cells


def _ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.floor(lo / step) * step
    ticks = []
    v = start
    while v <= hi + step * 1e-9:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _panel(ox: float, oy: float, field: str, xs, keys, cells, axes: PlotAxes) -> List[str]:
    out = []
    w = PANEL_W - MARGIN_L - MARGIN_R
    h = PANEL_H - MARGIN_T - MARGIN_B
    x0, y0 = ox + MARGIN_L, oy + MARGIN_T
    values = [float(_get(cells[(k, x)], field)) for k in keys for x in xs]
    log = field != "access_prob" and min(values) > 0 and max(values) / min(values) > 100
    tv = [math.log10(v) for v in values] if log else values
    if log:
        lo, hi = math.floor(min(tv)), math.ceil(max(tv))
        if hi == lo:
            hi = lo + 1
        ticks = list(range(lo, hi + 1))
    else:
        ticks = _ticks(min(tv), max(tv))
        lo, hi = ticks[0], ticks[-1]
        if hi == lo:
            hi = lo + 1.0

    categorical = axes.x == "alpha"
    if categorical:
        def px(x):
            return x0 + w * (xs.index(x) + 0.5) / len(xs)
    else:
        xlo, xhi = float(xs[0]), float(xs[-1])

        def px(x):
            return x0 + w * (float(x) - xlo) / (xhi - xlo)

    def py(v):
        t = math.log10(v) if log else v
        return y0 + h - h * (t - lo) / (hi - lo)

    out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" '
               f'fill="none" stroke="#444" stroke-width="1"/>')
    for t in ticks:
        y = y0 + h - h * (t - lo) / (hi - lo)
        label = f"1e{int(t)}" if log else f"{t:g}"
        out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 + w)}" y2="{_fmt(y)}" '
                   f'stroke="#ddd" stroke-width="1"/>')
        out.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end" '
                   f'font-size="11">{escape(label)}</text>')
    for x in xs:
        out.append(f'<text x="{_fmt(px(x))}" y="{_fmt(y0 + h + 16)}" text-anchor="middle" '
                   f'font-size="11">{escape(_label_value(axes.x, x))}</text>')
    out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 + h + 38)}" text-anchor="middle" '
               f'font-size="12">{escape(LABELS.get(axes.x, axes.x))}</text>')
    out.append(f'<text x="{_fmt(ox + 16)}" y="{_fmt(y0 + h / 2)}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 {_fmt(ox + 16)} {_fmt(y0 + h / 2)})">'
               f'{escape(LABELS.get(field, field))}</text>')
    for i, key in enumerate(keys):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(float(_get(cells[(key, x)], field))))}" for x in xs)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        for x in xs:
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(float(_get(cells[(key, x)], field))))}" '
                       f'r="2.5" fill="{color}"/>')
    return out


def render_svg(rows: Sequence, axes: PlotAxes) -> str:
    """SVG text for ``rows``: one panel per field in ``axes.panels``, one polyline per series."""
    xs, keys, cells = _grid(list(rows), axes)
    cols = 1 if len(axes.panels) == 1 else 2
    nrows = math.ceil(len(axes.panels) / cols)
    width = cols * PANEL_W + LEGEND_W
    height = nrows * PANEL_H + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" font-size="15">{escape(axes.title)}</text>',
    ]
    for p, field in enumerate(axes.panels):
        ox = (p % cols) * PANEL_W
        oy = 30 + (p // cols) * PANEL_H
        parts.extend(_panel(ox, oy, field, xs, keys, cells, axes))
    lx = cols * PANEL_W + 10
    for i, key in enumerate(keys):
        y = 50 + 18 * i
        color = PALETTE[i % len(PALETTE)]
        label = ", ".join(f"{s}={_label_value(s, v)}" for s, v in zip(axes.series, key))
        parts.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 26}" y="{y + 4}" font-size="11">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(rows: Sequence, axes: PlotAxes, path) -> None:
    text = render_svg(rows, axes)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
