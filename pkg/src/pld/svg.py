"""Static SVG line plots: polylines, axes with ticks, a legend, notes.

No plotting dependency; output is a single self-contained document.
"""

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#000000", "#2ca02c", "#d62728", "#1f77b4", "#ff7f0e", "#9467bd")


@dataclass
class Curve:
    xs: np.ndarray
    ys: np.ndarray
    label: str = ""
    color: str = ""


@dataclass
class Panel:
    title: str
    curves: list = field(default_factory=list)
    xlabel: str = "x"
    ylabel: str = "y"
    notes: list = field(default_factory=list)


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


def _thin(xs, ys, max_points):
    if len(xs) <= max_points:
        return xs, ys
    idx = np.linspace(0, len(xs) - 1, max_points).astype(int)
    return xs[idx], ys[idx]


def _panel(p, ox, oy, w, h, max_points):
    pad_l, pad_r, pad_t, pad_b = 60, 20, 30, 45
    pw, ph = w - pad_l - pad_r, h - pad_t - pad_b
    xs = np.concatenate([np.asarray(c.xs, dtype=float) for c in p.curves]) if p.curves else np.zeros(1)
    ys = np.concatenate([np.asarray(c.ys, dtype=float) for c in p.curves]) if p.curves else np.zeros(1)
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    mx, my = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my

    def sx(v):
        return ox + pad_l + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return oy + pad_t + (y1 - v) / (y1 - y0) * ph

    out = [f'<text x="{ox + w / 2:.1f}" y="{oy + 18:.1f}" text-anchor="middle" '
           f'font-size="14">{escape(p.title)}</text>',
           f'<rect x="{ox + pad_l}" y="{oy + pad_t}" width="{pw}" height="{ph}" '
           f'fill="none" stroke="#444"/>']
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.1f}" y1="{oy + pad_t + ph}" x2="{X:.1f}" y2="{oy + pad_t + ph + 5}" stroke="#444"/>')
        out.append(f'<text x="{X:.1f}" y="{oy + pad_t + ph + 18}" text-anchor="middle" font-size="10">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{ox + pad_l - 5}" y1="{Y:.1f}" x2="{ox + pad_l}" y2="{Y:.1f}" stroke="#444"/>')
        out.append(f'<text x="{ox + pad_l - 8}" y="{Y + 3:.1f}" text-anchor="end" font-size="10">{t:g}</text>')
    out.append(f'<text x="{ox + pad_l + pw / 2:.1f}" y="{oy + h - 8}" text-anchor="middle" '
               f'font-size="12">{escape(p.xlabel)}</text>')
    out.append(f'<text x="{ox + 14}" y="{oy + pad_t + ph / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 {ox + 14} {oy + pad_t + ph / 2:.1f})">{escape(p.ylabel)}</text>')
    for i, c in enumerate(p.curves):
        color = c.color or PALETTE[i % len(PALETTE)]
        cx, cy = _thin(np.asarray(c.xs, dtype=float), np.asarray(c.ys, dtype=float), max_points)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(cx, cy))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        if c.label:
            ly = oy + pad_t + 14 + 14 * i
            out.append(f'<line x1="{ox + pad_l + 8}" y1="{ly - 4}" x2="{ox + pad_l + 26}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{ox + pad_l + 30}" y="{ly}" font-size="10">{escape(c.label)}</text>')
    for i, note in enumerate(p.notes):
        out.append(f'<text x="{ox + pad_l + pw - 4}" y="{oy + pad_t + 14 + 13 * i}" text-anchor="end" '
                   f'font-size="9" fill="#333">{escape(note)}</text>')
    return out


def render(panels, width=520, height=440, max_points=4000):
    """SVG text with the panels side by side."""
    total_w = width * len(panels)
    body = []
    for k, p in enumerate(panels):
        body += _panel(p, k * width, 0, width, height, max_points)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height}" '
            f'viewBox="0 0 {total_w} {height}" font-family="sans-serif">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n")


def write(path, panels, **kw):
    with open(path, "w") as fh:
        fh.write(render(panels, **kw))
