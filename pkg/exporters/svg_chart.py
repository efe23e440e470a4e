"""
SVG Chart Module

Standalone SVG 1.1 line charts of S, I, R curves versus time. Only the
svg, g, polyline, line, text and rect elements are emitted; output is
byte-identical for identical input.
"""

import logging
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from core.campaign import Trajectory

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 64
MARGIN_RIGHT = 120
MARGIN_TOP = 40
MARGIN_BOTTOM = 48
TICK_COUNT = 5
Y_PADDING = 0.05

# S blue, I red, R green; other labels cycle through the extra colors
SIR_PALETTE = {'S': '#1f77b4', 'I': '#d62728', 'R': '#2ca02c'}
EXTRA_PALETTE = ('#ff7f0e', '#9467bd', '#8c564b', '#e377c2', '#7f7f7f')

Series = Tuple[str, Sequence[float], Sequence[float]]


class ChartError(ValueError):
    """Series cannot be charted"""


class SVG:
    """Minimal SVG document builder"""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def group_start(self, group_id: str):
        self.parts.append(f'<g id="{group_id}">')

    def group_end(self):
        self.parts.append('</g>')

    def rect(self, x, y, width, height, fill, stroke='none'):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{width:.2f}" height="{height:.2f}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def line(self, x1, y1, x2, y2, stroke='#000000', width=1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:g}"/>'
        )

    def text(self, x, y, string, anchor='start', size=12):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}">{escape(string)}</text>'
        )

    def polyline(self, xs, ys, stroke, label):
        points = ' '.join(f'{x:.2f},{y:.2f}' for x, y in zip(xs, ys))
        label_attr = escape(label, {'"': '&quot;'})
        self.parts.append(
            f'<polyline class="series" data-label="{label_attr}" fill="none" '
            f'stroke="{stroke}" stroke-width="1.5" points="{points}"/>'
        )

    def get_svg(self) -> str:
        header = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
        )
        return header + '\n'.join(self.parts) + '\n</svg>\n'


def series_color(label: str, index: int) -> str:
    if label in SIR_PALETTE:
        return SIR_PALETTE[label]
    return EXTRA_PALETTE[index % len(EXTRA_PALETTE)]


def _extent(lo: float, hi: float, pad_fraction: float) -> Tuple[float, float]:
    span = hi - lo
    if span == 0:
        span = max(abs(hi), 1.0)
    pad = pad_fraction * span
    return lo - pad, hi + pad


def _validate(series: Sequence[Series]) -> Tuple[np.ndarray, List[np.ndarray]]:
    if not series:
        raise ChartError("no series to plot")
    times = np.asarray(series[0][1], dtype=float)
    if times.size == 0:
        raise ChartError("series have no samples")
    values = []
    for label, t, v in series:
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.shape != times.shape or not np.array_equal(t, times):
            raise ChartError(f"series {label!r} does not share the time vector")
        if v.shape != times.shape:
            raise ChartError(f"series {label!r} has {v.size} values for {times.size} times")
        if not np.all(np.isfinite(v)):
            raise ChartError(f"series {label!r} has non-finite values")
        values.append(v)
    return times, values


def write_svg_chart(series: Sequence[Series], title: str) -> str:
    """
    Render (label, times, values) series as one SVG line chart.

    Linear scales cover the data extents; the y range is padded by 5%.

    Raises:
        ChartError: empty series list, mismatched times or non-finite values
    """
    times, values = _validate(series)

    x_lo, x_hi = float(times[0]), float(times[-1])
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    all_values = np.concatenate(values)
    y_lo, y_hi = _extent(float(all_values.min()), float(all_values.max()), Y_PADDING)

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    left, top = MARGIN_LEFT, MARGIN_TOP
    bottom = top + plot_h

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return bottom - (y - y_lo) / (y_hi - y_lo) * plot_h

    svg = SVG(WIDTH, HEIGHT)
    svg.rect(0, 0, WIDTH, HEIGHT, fill='#ffffff')
    svg.text(WIDTH / 2, MARGIN_TOP / 2 + 4, title, anchor='middle', size=14)

    svg.group_start('axes')
    svg.line(left, bottom, left + plot_w, bottom)
    svg.line(left, top, left, bottom)
    for k in range(TICK_COUNT + 1):
        xv = x_lo + (x_hi - x_lo) * k / TICK_COUNT
        yv = y_lo + (y_hi - y_lo) * k / TICK_COUNT
        x, y = sx(xv), sy(yv)
        svg.line(x, bottom, x, bottom + 5)
        svg.text(x, bottom + 18, f'{xv:.4g}', anchor='middle', size=10)
        svg.line(left - 5, y, left, y)
        svg.text(left - 8, y + 3, f'{yv:.4g}', anchor='end', size=10)
    svg.text(left + plot_w / 2, HEIGHT - 8, 't', anchor='middle')
    svg.text(14, top - 10, 'persons', anchor='start')
    svg.group_end()

    svg.group_start('series')
    xs = [sx(x) for x in times]
    for index, ((label, _, _), v) in enumerate(zip(series, values)):
        svg.polyline(xs, [sy(y) for y in v], series_color(label, index), label)
    svg.group_end()

    svg.group_start('legend')
    legend_x = left + plot_w + 16
    for index, (label, _, _) in enumerate(series):
        y = top + 10 + 20 * index
        svg.rect(legend_x, y - 9, 12, 12, fill=series_color(label, index))
        svg.text(legend_x + 18, y + 1, label)
    svg.group_end()

    logger.debug(f"📊 Chart '{title}': {len(series)} series, {times.size} samples")
    return svg.get_svg()


def sir_series(traj: Trajectory) -> List[Series]:
    return [
        ('S', traj.times, traj.s),
        ('I', traj.times, traj.i),
        ('R', traj.times, traj.r),
    ]
