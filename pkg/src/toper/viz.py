"""Dependency-free SVG scatter plots of (pivot, growth) embeddings."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import EmptyInput

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT = 640, 480
MARGIN = {"left": 70, "right": 150, "top": 40, "bottom": 55}


def _num(v: float) -> str:
    # fixed precision keeps byte output stable across platforms
    return f"{v:.3f}"


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def _span(v):
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi == lo:
        pad = 1.0 if lo == 0 else abs(lo) * 0.1
    else:
        pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def scatter_svg(groups, title: str = "", xlabel: str = "pivot (a)", ylabel: str = "growth (b)") -> str:
    """Render ``groups`` as an SVG 1.1 document.

    ``groups`` is a sequence of ``(name, xs, ys)``; each group gets one
    palette color and one legend entry, in the given order.
    """
    groups = [(str(n), np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)) for n, x, y in groups]
    if not groups or sum(len(x) for _, x, _ in groups) == 0:
        raise EmptyInput("nothing to plot")
    allx = np.concatenate([x for _, x, _ in groups])
    ally = np.concatenate([y for _, _, y in groups])
    x0, x1 = _span(allx)
    y0, y1 = _span(ally)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN["top"] + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')
    left, top, bottom = MARGIN["left"], MARGIN["top"], MARGIN["top"] + ph
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        px = _num(sx(t))
        out.append(f'<line x1="{px}" y1="{bottom}" x2="{px}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{px}" y="{bottom + 18}" text-anchor="middle" font-size="11">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        py = _num(sy(t))
        out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" dominant-baseline="middle" font-size="11">{t:.3g}</text>')
    out.append(f'<text class="xlabel" x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    cy = top + ph / 2
    out.append(
        f'<text class="ylabel" x="18" y="{cy:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {cy:.1f})">{escape(ylabel)}</text>'
    )
    for gi, (name, xs, ys) in enumerate(groups):
        color = PALETTE[gi % len(PALETTE)]
        out.append(f'<g class="points" data-group={quoteattr(name)} fill="{color}" fill-opacity="0.7">')
        for x, y in zip(xs, ys):
            out.append(f'<circle cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="3" data-x="{x:.9g}" data-y="{y:.9g}"/>')
        out.append("</g>")
    lx = WIDTH - MARGIN["right"] + 15
    out.append('<g class="legend" font-size="12">')
    for gi, (name, _, _) in enumerate(groups):
        ly = top + 10 + 20 * gi
        color = PALETTE[gi % len(PALETTE)]
        out.append(f'<rect x="{lx}" y="{ly - 6}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_svg_points(text: str) -> dict:
    """Group name -> ``(n, 2)`` array of data coordinates from :func:`scatter_svg` output."""
    ns = {"s": "http://www.w3.org/2000/svg"}
    root = ET.fromstring(text.encode("utf-8"))
    out = {}
    for g in root.iter("{http://www.w3.org/2000/svg}g"):
        if g.get("class") != "points":
            continue
        pts = [(float(c.get("data-x")), float(c.get("data-y"))) for c in g.findall("s:circle", ns)]
        out[g.get("data-group")] = np.array(pts, dtype=np.float64).reshape(-1, 2)
    return out


def legend_labels(text: str) -> list:
    root = ET.fromstring(text.encode("utf-8"))
    for g in root.iter("{http://www.w3.org/2000/svg}g"):
        if g.get("class") == "legend":
            return [t.text for t in g.iter("{http://www.w3.org/2000/svg}text")]
    return []
