"""Minimal SVG polyline charts for sweep results. A convenience for eyeballing
CSV output; never part of any acceptance check."""

from __future__ import annotations

import math

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 50


def _transform(v, lo, hi, log):
    if log:
        v, lo, hi = math.log10(v), math.log10(lo), math.log10(hi)
    if hi == lo:
        return 0.5
    return (v - lo) / (hi - lo)


def _ticks(lo, hi, log):
    if log:
        lo10 = math.floor(math.log10(lo))
        hi10 = math.ceil(math.log10(hi))
        return [10.0 ** e for e in range(lo10, hi10 + 1)
                if lo <= 10.0 ** e <= hi]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(t)
        t += step
    return out


def render_chart(x, series: dict, x_label: str, title: str = "",
                 log_x: bool = False, log_y: bool = False) -> str:
    """SVG line chart of one or more named series against x."""
    pts = {name: [(xi, yi) for xi, yi in zip(x, ys)
                  if yi == yi and (not log_y or yi > 0)
                  and (not log_x or xi > 0)]
           for name, ys in series.items()}
    pts = {k: v for k, v in pts.items() if v}
    if not pts:
        return ("<svg xmlns='http://www.w3.org/2000/svg' width='%d' "
                "height='%d'><text x='20' y='40'>no plottable data</text>"
                "</svg>" % (_W, _H))
    xs = [p[0] for v in pts.values() for p in v]
    ys = [p[1] for v in pts.values() for p in v]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if not log_y:
        pad = 0.05 * (yhi - ylo or abs(yhi) or 1.0)
        ylo, yhi = ylo - pad, yhi + pad
    if not log_x and xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1

    def px(v):
        return _ML + _transform(v, xlo, xhi, log_x) * (_W - _ML - _MR)

    def py(v):
        return _H - _MB - _transform(v, ylo, yhi, log_y) * (_H - _MT - _MB)

    out = [f"<svg xmlns='http://www.w3.org/2000/svg' width='{_W}' "
           f"height='{_H}' font-family='sans-serif' font-size='11'>",
           f"<rect width='{_W}' height='{_H}' fill='white'/>"]
    if title:
        out.append(f"<text x='{_W/2:.0f}' y='18' text-anchor='middle' "
                   f"font-size='13'>{title}</text>")
    out.append(f"<rect x='{_ML}' y='{_MT}' width='{_W-_ML-_MR}' "
               f"height='{_H-_MT-_MB}' fill='none' stroke='#333'/>")
    for t in _ticks(xlo, xhi, log_x):
        out.append(f"<line x1='{px(t):.1f}' y1='{_H-_MB}' x2='{px(t):.1f}' "
                   f"y2='{_H-_MB+4}' stroke='#333'/>")
        out.append(f"<text x='{px(t):.1f}' y='{_H-_MB+16}' "
                   f"text-anchor='middle'>{t:g}</text>")
    for t in _ticks(ylo, yhi, log_y):
        out.append(f"<line x1='{_ML-4}' y1='{py(t):.1f}' x2='{_ML}' "
                   f"y2='{py(t):.1f}' stroke='#333'/>")
        out.append(f"<text x='{_ML-8}' y='{py(t):.1f}' text-anchor='end' "
                   f"dominant-baseline='middle'>{t:g}</text>")
    out.append(f"<text x='{(_ML+_W-_MR)/2:.0f}' y='{_H-12}' "
               f"text-anchor='middle'>{x_label}</text>")
    for i, (name, p) in enumerate(sorted(pts.items())):
        color = _PALETTE[i % len(_PALETTE)]
        path = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in p)
        out.append(f"<polyline points='{path}' fill='none' "
                   f"stroke='{color}' stroke-width='1.5'/>")
        for a, b in p:
            out.append(f"<circle cx='{px(a):.1f}' cy='{py(b):.1f}' r='2.5' "
                       f"fill='{color}'/>")
        ly = _MT + 14 + 14 * i
        out.append(f"<line x1='{_W-_MR-150}' y1='{ly}' x2='{_W-_MR-130}' "
                   f"y2='{ly}' stroke='{color}' stroke-width='1.5'/>")
        out.append(f"<text x='{_W-_MR-125}' y='{ly+4}'>{name}</text>")
    out.append("</svg>")
    return "\n".join(out)
