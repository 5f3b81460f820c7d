"""Minimal static SVG charts: scatter, multi-series line, and panel grids.

Output depends only on the input values, so repeated runs give identical
bytes.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

Point = tuple[float, float]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=64, right=20, top=36, bottom=48)


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:g}"


class _Frame:
    """One plotting area inside an SVG canvas."""

    def __init__(self, x0, y0, width, height, xs, ys, include_zero=False):
        self.x0, self.y0, self.w, self.h = x0, y0, width, height
        xs = list(xs) or [0.0, 1.0]
        ys = list(ys) or [0.0, 1.0]
        if include_zero:
            ys = ys + [0.0]
        self.xlo, self.xhi = min(xs), max(xs)
        self.ylo, self.yhi = min(ys), max(ys)
        if self.xhi == self.xlo:
            self.xlo, self.xhi = self.xlo - 1, self.xhi + 1
        pad = 0.05 * (self.yhi - self.ylo) or 0.5
        self.ylo, self.yhi = self.ylo - pad, self.yhi + pad

    def px(self, x):
        return self.x0 + (x - self.xlo) / (self.xhi - self.xlo) * self.w

    def py(self, y):
        return self.y0 + self.h - (y - self.ylo) / (self.yhi - self.ylo) * self.h

    def axes(self, title, xlabel, ylabel):
        out = [
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{_fmt(self.w)}" '
            f'height="{_fmt(self.h)}" fill="none" stroke="#444"/>'
        ]
        for t in _nice_ticks(self.ylo, self.yhi):
            y = self.py(t)
            out.append(f'<line x1="{_fmt(self.x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(self.x0)}" '
                       f'y2="{_fmt(y)}" stroke="#444"/>')
            out.append(f'<text x="{_fmt(self.x0 - 6)}" y="{_fmt(y + 4)}" font-size="11" '
                       f'text-anchor="end">{_label(t)}</text>')
        for t in _nice_ticks(self.xlo, self.xhi):
            x = self.px(t)
            out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(self.y0 + self.h)}" x2="{_fmt(x)}" '
                       f'y2="{_fmt(self.y0 + self.h + 4)}" stroke="#444"/>')
            out.append(f'<text x="{_fmt(x)}" y="{_fmt(self.y0 + self.h + 16)}" font-size="11" '
                       f'text-anchor="middle">{_label(t)}</text>')
        cx = self.x0 + self.w / 2
        out.append(f'<text x="{_fmt(cx)}" y="{_fmt(self.y0 - 10)}" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
        if xlabel:
            out.append(f'<text x="{_fmt(cx)}" y="{_fmt(self.y0 + self.h + 34)}" font-size="12" '
                       f'text-anchor="middle">{escape(xlabel)}</text>')
        if ylabel:
            cy = self.y0 + self.h / 2
            lx = self.x0 - 48
            out.append(f'<text x="{_fmt(lx)}" y="{_fmt(cy)}" font-size="12" text-anchor="middle" '
                       f'transform="rotate(-90 {_fmt(lx)} {_fmt(cy)})">{escape(ylabel)}</text>')
        return out

    def zero_line(self):
        y = self.py(0.0)
        return [f'<line class="zero" x1="{_fmt(self.x0)}" y1="{_fmt(y)}" x2="{_fmt(self.x0 + self.w)}" '
                f'y2="{_fmt(y)}" stroke="#888" stroke-dasharray="4 3"/>']

    def markers(self, points, color):
        return [f'<circle class="point" cx="{_fmt(self.px(x))}" cy="{_fmt(self.py(y))}" r="3" '
                f'fill="{color}"/>' for x, y in points]

    def polyline(self, points, color, name):
        coords = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in points)
        return [f'<polyline class="series" data-name="{escape(name)}" points="{coords}" '
                f'fill="none" stroke="{color}" stroke-width="1.5"/>']


def _document(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def _inner(width=WIDTH, height=HEIGHT):
    return (MARGIN["left"], MARGIN["top"],
            width - MARGIN["left"] - MARGIN["right"],
            height - MARGIN["top"] - MARGIN["bottom"])


def scatter_chart(points: Sequence[Point], title: str, xlabel: str = "", ylabel: str = "",
                  zero_line: bool = True) -> str:
    frame = _Frame(*_inner(), [p[0] for p in points], [p[1] for p in points], zero_line)
    body = frame.axes(title, xlabel, ylabel)
    if zero_line:
        body += frame.zero_line()
    body += frame.markers(points, PALETTE[0])
    return _document(WIDTH, HEIGHT, body)


def line_chart(series: Mapping[str, Sequence[Point]], title: str, xlabel: str = "",
               ylabel: str = "") -> str:
    """One polyline with markers per named series, plus a legend."""
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    frame = _Frame(*_inner(), xs, ys)
    body = frame.axes(title, xlabel, ylabel)
    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        body += frame.polyline(pts, color, name)
        body += frame.markers(pts, color)
        ly = MARGIN["top"] + 14 + 16 * i
        lx = frame.x0 + frame.w - 110
        body.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 18)}" y2="{_fmt(ly - 4)}" '
                    f'stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{_fmt(lx + 24)}" y="{_fmt(ly)}" font-size="11">{escape(name)}</text>')
    return _document(WIDTH, HEIGHT, body)


def panel_chart(panels: Mapping[str, Sequence[Point]], title: str, xlabel: str = "",
                ylabel: str = "", ncols: int = 2) -> str:
    """Grid of small scatter-and-line panels, each with a zero reference line."""
    nrows = max(1, math.ceil(len(panels) / ncols))
    cell_w, cell_h = 360, 260
    width, height = ncols * cell_w, nrows * cell_h + 30
    body = [f'<text x="{_fmt(width / 2)}" y="20" font-size="15" text-anchor="middle">{escape(title)}</text>']
    for i, (name, pts) in enumerate(panels.items()):
        r, c = divmod(i, ncols)
        frame = _Frame(c * cell_w + 60, 30 + r * cell_h + 30, cell_w - 80, cell_h - 80,
                       [p[0] for p in pts], [p[1] for p in pts], include_zero=True)
        body.append(f'<g class="panel" data-name="{escape(name)}">')
        body += frame.axes(name, xlabel, ylabel)
        body += frame.zero_line()
        if len(pts) > 1:
            body += frame.polyline(pts, PALETTE[0], name)
        body += frame.markers(pts, PALETTE[0])
        body.append("</g>")
    return _document(width, height, body)
