"""Heatmaps, label maps and SVG line charts."""

from __future__ import annotations

import json
from html import escape

import numpy as np

from .hierarchy import RegionGrid
from .metrics import EntropyMap
from .segmentation import Segmentation

# bright end of the single-hue ramp (amber); black is the dark end
RAMP_TOP = np.array([255.0, 176.0, 32.0])

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def ramp_color(t) -> np.ndarray:
    """Map t in [0, 1] to uint8 RGB; monotone in every channel."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    return np.rint(t[..., None] * RAMP_TOP).astype(np.uint8)


def render_entropy_heatmap(emap: EntropyMap, grid: RegionGrid, scale=None):
    """Fill every region rectangle with the ramp color of its value.

    ``scale`` is ``(lo, hi)`` or ``None`` for ``(0, max value)``; a degenerate
    scale is widened to ``(lo, lo + 1)``. Returns ``(rgb, legend)`` where rgb
    has the source image's size.
    """
    if emap.layer != grid.n:
        raise ValueError(f"entropy map is layer {emap.layer} but grid is layer {grid.n}")
    if scale is None:
        lo, hi = 0.0, float(emap.values.max())
    else:
        lo, hi = (float(v) for v in scale)
    if not hi > lo:
        hi = lo + 1.0
    t = (emap.values - lo) / (hi - lo)
    colors = ramp_color(t)
    # expand region colors to pixels through the per-axis region index
    row_of = np.repeat(np.arange(grid.side), np.diff(grid.row_cuts))
    col_of = np.repeat(np.arange(grid.side), np.diff(grid.col_cuts))
    rgb = colors[row_of[:, None], col_of[None, :]]
    legend = {
        "layer": emap.layer,
        "component_size": emap.component_size,
        "scale": [lo, hi],
        "ramp": {"low": [0, 0, 0], "high": RAMP_TOP.astype(int).tolist()},
    }
    return rgb, legend


def label_color(labels) -> np.ndarray:
    """Deterministic pseudo-random RGB per integer label."""
    x = np.asarray(labels, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (x + np.uint64(0x9E3779B97F4A7C15)) * np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    shifts = np.array([0, 8, 16], dtype=np.uint64)
    return ((x[..., None] >> shifts) & np.uint64(0xFF)).astype(np.uint8)


def render_label_map(seg: Segmentation) -> np.ndarray:
    return label_color(seg.labels)


def legend_json(legend: dict) -> str:
    return json.dumps(legend, indent=2)


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _span(values) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return lo - 0.5, hi + 0.5
    return lo, hi


def render_curve(series, title: str = "", x_label: str = "component size",
                 y_label: str = "value", width: int = 640, height: int = 400) -> str:
    """Line chart of one or more ``label -> [(x, y), ...]`` series as SVG text.

    ``series`` is a mapping or a sequence of ``(label, points)`` pairs. Each
    series is drawn as a polyline with a dot per point. Output depends only on
    the input.
    """
    items = list(series.items()) if hasattr(series, "items") else list(series)
    if not items:
        raise ValueError("no series given")
    for label, pts in items:
        if len(pts) == 0:
            raise ValueError(f"series {label!r} has no points")

    xs = [float(x) for _, pts in items for x, _ in pts]
    ys = [float(y) for _, pts in items for _, y in pts]
    x0, x1 = _span(xs)
    y0, y1 = _span(ys)
    left, right, top, bottom = 70, 160, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:g}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{escape(title)}</text>')
    out.append(f'<g class="axes" stroke="black" stroke-width="1">'
               f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
               f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>')
    ticks = ['<g class="ticks" font-family="sans-serif" font-size="10">']
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        ticks.append(f'<line x1="{_fmt(px(xv))}" y1="{top + ph}" x2="{_fmt(px(xv))}" '
                     f'y2="{top + ph + 4}" stroke="black"/>')
        ticks.append(f'<text x="{_fmt(px(xv))}" y="{top + ph + 16}" '
                     f'text-anchor="middle">{_fmt(xv)}</text>')
        ticks.append(f'<line x1="{left - 4}" y1="{_fmt(py(yv))}" x2="{left}" '
                     f'y2="{_fmt(py(yv))}" stroke="black"/>')
        ticks.append(f'<text x="{left - 6}" y="{_fmt(py(yv) + 3)}" '
                     f'text-anchor="end">{_fmt(yv)}</text>')
    ticks.append("</g>")
    out.extend(ticks)
    out.append(f'<text x="{left + pw / 2:g}" y="{height - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2:g}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 15 {top + ph / 2:g})">{escape(y_label)}</text>')

    for i, (label, pts) in enumerate(items):
        color = PALETTE[i % len(PALETTE)]
        coords = [(_fmt(px(float(x))), _fmt(py(float(y)))) for x, y in pts]
        g = [f'<g class="series" data-label="{escape(str(label))}">']
        if len(coords) > 1:
            g.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{" ".join(f"{a},{b}" for a, b in coords)}"/>')
        g += [f'<circle cx="{a}" cy="{b}" r="2.5" fill="{color}"/>' for a, b in coords]
        g.append("</g>")
        out.extend(g)
        ly = top + 10 + 18 * i
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 35}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 40}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="11">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
