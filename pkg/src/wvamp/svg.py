"""Minimal SVG line plots (polylines on linear or log axes), byte-stable output."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


@dataclass
class Series:
    label: str
    x: list
    y: list
    dashed: bool = False
    color: str | None = None


@dataclass
class Plot:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)
    hlines: list = field(default_factory=list)  # (y, label)
    vlines: list = field(default_factory=list)  # (x, label, color)
    logx: bool = False
    logy: bool = False
    width: int = 640
    height: int = 420


def _f(v: float) -> str:
    return f"{v:.2f}"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render(plot: Plot, y_offset: int | None = None) -> str:
    left, right, top, bottom = 70, 170, 40, 50
    w, h = plot.width, plot.height
    pw, ph = w - left - right, h - top - bottom

    tx = math.log10 if plot.logx else (lambda v: v)
    ty = math.log10 if plot.logy else (lambda v: v)
    xs = [tx(v) for s in plot.series for v, u in zip(s.x, s.y) if _ok(v, u, plot)]
    ys = [ty(u) for s in plot.series for v, u in zip(s.x, s.y) if _ok(v, u, plot)]
    ys += [ty(y) for y, _ in plot.hlines]
    xs += [tx(x) for x, *_ in plot.vlines]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return left + (tx(v) - x0) / (x1 - x0) * pw

    def py(u):
        return top + ph - (ty(u) - y0) / (y1 - y0) * ph

    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
            if y_offset is None else f'<svg x="0" y="{y_offset}" width="{w}" height="{h}">')
    out = [head,
           f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
           f'<text x="{w / 2:.1f}" y="22" text-anchor="middle" font-size="15">{_esc(plot.title)}</text>',
           f'<text x="{left + pw / 2:.1f}" y="{h - 10}" text-anchor="middle" font-size="13">{_esc(plot.xlabel)}</text>',
           f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" '
           f'transform="rotate(-90 16 {top + ph / 2:.1f})">{_esc(plot.ylabel)}</text>']
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        lx = 10 ** fx if plot.logx else fx
        ly = 10 ** fy if plot.logy else fy
        X = left + pw * i / 4
        Y = top + ph - ph * i / 4
        out.append(f'<text x="{X:.1f}" y="{top + ph + 16}" text-anchor="middle" font-size="11">{lx:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{Y + 4:.1f}" text-anchor="end" font-size="11">{ly:.3g}</text>')

    legend_y = top + 10
    for i, s in enumerate(plot.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(px(v))},{_f(py(u))}" for v, u in zip(s.x, s.y) if _ok(v, u, plot))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>')
        out.append(f'<line x1="{left + pw + 10}" y1="{legend_y}" x2="{left + pw + 34}" y2="{legend_y}" '
                   f'stroke="{color}" stroke-width="1.6"{dash}/>')
        out.append(f'<text x="{left + pw + 38}" y="{legend_y + 4}" font-size="11">{_esc(s.label)}</text>')
        legend_y += 16
    for y, label in plot.hlines:
        Y = py(y)
        out.append(f'<line x1="{left}" y1="{_f(Y)}" x2="{left + pw}" y2="{_f(Y)}" stroke="magenta" '
                   f'stroke-dasharray="2,3"/>')
        out.append(f'<text x="{left + pw - 4}" y="{_f(Y - 4)}" text-anchor="end" font-size="11">{_esc(label)}</text>')
    for x, label, color in plot.vlines:
        X = px(x)
        out.append(f'<line x1="{_f(X)}" y1="{top}" x2="{_f(X)}" y2="{top + ph}" stroke="{color}" '
                   f'stroke-dasharray="4,3"><title>{_esc(label)}</title></line>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_stack(plots: list) -> str:
    """Several plots stacked vertically in one document."""
    w = max(p.width for p in plots)
    h = sum(p.height for p in plots)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
    y = 0
    for p in plots:
        out.append(render(p, y_offset=y).rstrip("\n"))
        y += p.height
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ok(v, u, plot):
    if v is None or u is None or not (math.isfinite(v) and math.isfinite(u)):
        return False
    if plot.logx and v <= 0:
        return False
    if plot.logy and u <= 0:
        return False
    return True
