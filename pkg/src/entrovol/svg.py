"""Minimal deterministic SVG charts.

Every coordinate is written with two decimals and nothing time-dependent is
embedded, so the same data always produces the same bytes.  Each plotted
point of a line is one path command (``M`` or ``L``).
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f4e79", "#c0392b", "#27ae60", "#8e44ad", "#d35400")
FONT = 'font-family="Helvetica, Arial, sans-serif"'


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _as_float_x(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x)
    if np.issubdtype(x.dtype, np.datetime64):
        return x.astype("datetime64[D]").astype(np.int64).astype(float), True
    return x.astype(float), False


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _year_ticks(lo: float, hi: float, count: int = 8):
    first = int(np.datetime64(int(lo), "D").astype("datetime64[Y]").astype(int)) + 1970
    last = int(np.datetime64(int(hi), "D").astype("datetime64[Y]").astype(int)) + 1970
    years = list(range(first, last + 2))
    stride = max(1, math.ceil(len(years) / count))
    out = []
    for y in years[::stride]:
        day = float(np.datetime64(f"{y:04d}-01-01", "D").astype(np.int64))
        if lo <= day <= hi:
            out.append((day, str(y)))
    if not out:
        out.append((lo, str(np.datetime64(int(lo), "D"))))
    return out


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.2e}"
    return f"{v:.6g}"


class Panel:
    """One plotting area mapped onto a rectangle of the canvas."""

    def __init__(self, left, top, width, height, xlim, ylim, is_date=False):
        self.left, self.top, self.width, self.height = left, top, width, height
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            pad = abs(self.y0) * 0.05 or 1.0
            self.y0, self.y1 = self.y0 - pad, self.y1 + pad
        self.is_date = is_date
        self.parts: list[str] = []

    def sx(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * self.width

    def sy(self, y):
        return self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height

    def axes(self, title="", xlabel="", ylabel=""):
        p = self.parts
        l, t, w, h = self.left, self.top, self.width, self.height
        p.append(f'<rect x="{_num(l)}" y="{_num(t)}" width="{_num(w)}" height="{_num(h)}" fill="none" stroke="#444" stroke-width="1"/>')
        for v in _nice_ticks(self.y0, self.y1):
            y = self.sy(v)
            p.append(f'<line x1="{_num(l - 4)}" y1="{_num(y)}" x2="{_num(l)}" y2="{_num(y)}" stroke="#444"/>')
            p.append(f'<text x="{_num(l - 6)}" y="{_num(y + 3)}" font-size="10" text-anchor="end" {FONT}>{_fmt_tick(v)}</text>')
        xt = _year_ticks(self.x0, self.x1) if self.is_date else [(v, _fmt_tick(v)) for v in _nice_ticks(self.x0, self.x1)]
        for v, label in xt:
            x = self.sx(v)
            p.append(f'<line x1="{_num(x)}" y1="{_num(t + h)}" x2="{_num(x)}" y2="{_num(t + h + 4)}" stroke="#444"/>')
            p.append(f'<text x="{_num(x)}" y="{_num(t + h + 16)}" font-size="10" text-anchor="middle" {FONT}>{escape(label)}</text>')
        if title:
            p.append(f'<text x="{_num(l + w / 2)}" y="{_num(t - 8)}" font-size="13" text-anchor="middle" {FONT}>{escape(title)}</text>')
        if xlabel:
            p.append(f'<text x="{_num(l + w / 2)}" y="{_num(t + h + 32)}" font-size="11" text-anchor="middle" {FONT}>{escape(xlabel)}</text>')
        if ylabel:
            cx, cy = l - 52, t + h / 2
            p.append(f'<text x="{_num(cx)}" y="{_num(cy)}" font-size="11" text-anchor="middle" transform="rotate(-90 {_num(cx)} {_num(cy)})" {FONT}>{escape(ylabel)}</text>')

    def line(self, x, y, color, width=1.0, label=None):
        cmds = []
        pen_down = False
        for xi, yi in zip(x, y):
            if not math.isfinite(yi):
                pen_down = False
                continue
            cmds.append(f'{"L" if pen_down else "M"}{_num(self.sx(xi))} {_num(self.sy(yi))}')
            pen_down = True
        attrs = f' data-label="{escape(label)}"' if label else ""
        self.parts.append(f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" stroke-width="{width}"{attrs}/>')

    def band(self, x, lower, upper, color, opacity):
        pts = [f"{_num(self.sx(a))},{_num(self.sy(b))}" for a, b in zip(x, upper)]
        pts += [f"{_num(self.sx(a))},{_num(self.sy(b))}" for a, b in zip(x[::-1], lower[::-1])]
        self.parts.append(f'<polygon points="{" ".join(pts)}" fill="{color}" fill-opacity="{opacity}" stroke="none"/>')

    def bars(self, x, heights, bar_width, color, base=0.0):
        for xi, hi in zip(x, heights):
            x_left = self.sx(xi - bar_width / 2)
            x_right = self.sx(xi + bar_width / 2)
            y_a, y_b = sorted((self.sy(base), self.sy(hi)))
            self.parts.append(
                f'<rect x="{_num(x_left)}" y="{_num(y_a)}" width="{_num(max(x_right - x_left, 0.5))}" height="{_num(y_b - y_a)}" fill="{color}"/>'
            )

    def hline(self, y, color, dash="4 3"):
        self.parts.append(
            f'<line x1="{_num(self.left)}" y1="{_num(self.sy(y))}" x2="{_num(self.left + self.width)}" y2="{_num(self.sy(y))}" stroke="{color}" stroke-dasharray="{dash}"/>'
        )

    def legend(self, entries):
        for k, (label, color) in enumerate(entries):
            y = self.top + 14 + 15 * k
            x = self.left + self.width - 150
            self.parts.append(f'<line x1="{_num(x)}" y1="{_num(y - 4)}" x2="{_num(x + 18)}" y2="{_num(y - 4)}" stroke="{color}" stroke-width="2"/>')
            self.parts.append(f'<text x="{_num(x + 24)}" y="{_num(y)}" font-size="10" {FONT}>{escape(label)}</text>')


def _document(width, height, parts) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )
    return head + "\n".join(parts) + "\n</svg>\n"


def _limits(*arrays, pad=0.04):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo
    return lo - pad * span, hi + pad * span


def line_chart(x, series, title="", xlabel="", ylabel="", width=900, height=380) -> str:
    """Line chart of one or more ``(label, values)`` series sharing ``x``."""
    xf, is_date = _as_float_x(x)
    panel = Panel(80, 40, width - 110, height - 90, (float(xf.min()), float(xf.max())), _limits(*[v for _, v in series]), is_date)
    panel.axes(title, xlabel, ylabel)
    for k, (label, values) in enumerate(series):
        panel.line(xf, np.asarray(values, dtype=float), PALETTE[k % len(PALETTE)], label=label)
    if len(series) > 1:
        panel.legend([(label, PALETTE[k % len(PALETTE)]) for k, (label, _) in enumerate(series)])
    return _document(width, height, panel.parts)


def forecast_chart(hist_x, hist_y, fc_x, point, lo80, hi80, lo95, hi95, title="", ylabel="", width=900, height=380) -> str:
    """History line followed by a point forecast with 80% and 95% bands."""
    hx, is_date = _as_float_x(hist_x)
    fx, _ = _as_float_x(fc_x)
    xlim = (float(min(hx.min(), fx.min())), float(max(hx.max(), fx.max())))
    panel = Panel(80, 40, width - 110, height - 90, xlim, _limits(hist_y, lo95, hi95), is_date)
    panel.axes(title, "", ylabel)
    panel.band(fx, np.asarray(lo95), np.asarray(hi95), "#9ecae1", 0.6)
    panel.band(fx, np.asarray(lo80), np.asarray(hi80), "#3182bd", 0.6)
    panel.line(hx, np.asarray(hist_y, dtype=float), "#222222", label="history")
    panel.line(fx, np.asarray(point, dtype=float), "#08306b", width=1.5, label="forecast")
    return _document(width, height, panel.parts)


def residual_chart(dates, residuals, acf_lags, acf_values, hist_edges, hist_counts, title="", width=900, height=640) -> str:
    """Residual trace on top, ACF bars and histogram underneath."""
    parts: list[str] = []
    xf, is_date = _as_float_x(dates)
    top = Panel(80, 40, width - 110, 230, (float(xf.min()), float(xf.max())), _limits(residuals), is_date)
    top.axes(title, "", "residual")
    top.line(xf, np.asarray(residuals, dtype=float), PALETTE[0], label="residuals")
    parts += top.parts

    half = (width - 110 - 80) / 2
    n = len(residuals)
    bound = 1.96 / math.sqrt(n) if n else 0.0
    acf_values = np.asarray(acf_values, dtype=float)
    lim = max(float(np.max(np.abs(acf_values), initial=0.0)), bound) * 1.1 or 1.0
    left = Panel(80, 360, half, 220, (0.0, float(len(acf_lags)) + 1.0), (-lim, lim))
    left.axes("ACF", "lag", "")
    left.hline(0.0, "#444", dash="1 0")
    left.hline(bound, "#c0392b")
    left.hline(-bound, "#c0392b")
    left.bars(np.asarray(acf_lags, dtype=float), acf_values, 0.4, PALETTE[0])
    parts += left.parts

    edges = np.asarray(hist_edges, dtype=float)
    counts = np.asarray(hist_counts, dtype=float)
    right = Panel(80 + half + 80, 360, half, 220, (float(edges[0]), float(edges[-1])), (0.0, float(counts.max(initial=0.0)) * 1.05 or 1.0))
    right.axes("histogram", "residual", "")
    centres = 0.5 * (edges[:-1] + edges[1:])
    right.bars(centres, counts, float(edges[1] - edges[0]) if edges.size > 1 else 1.0, PALETTE[1])
    parts += right.parts
    return _document(width, height, parts)
