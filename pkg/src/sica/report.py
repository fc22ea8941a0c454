"""Deterministic text, JSON and SVG renderings of analysis results."""
from __future__ import annotations

import json
from xml.sax.saxutils import escape

import numpy as np

from .ca import Decomposition, PrincipalMap

__all__ = ["dumps", "sigmas_to_csv", "coordinates_to_csv", "map_to_svg"]

SVG_SIZE = 800
SVG_MARGIN = 70


def dumps(obj) -> str:
    """JSON with sorted keys and full float precision."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def sigmas_to_csv(d: Decomposition, header_lines=()) -> str:
    lines = [f"# {h}" for h in header_lines]
    lines.append("dim,sigma,inertia,share")
    for m, (s, e, sh) in enumerate(zip(d.sigmas, d.inertia, d.shares), 1):
        lines.append(f"{m},{s:.10f},{e:.10f},{sh:.10f}")
    return "\n".join(lines) + "\n"


def coordinates_to_csv(d: Decomposition, header_lines=()) -> str:
    lines = [f"# {h}" for h in header_lines]
    dims = ",".join(f"dim{m}" for m in range(1, d.n_dims + 1))
    lines.append(f"kind,label,{dims}" if dims else "kind,label")
    for kind, labels, X in (("row", d.row_labels, d.row_principal), ("col", d.col_labels, d.col_principal)):
        for lab, x in zip(labels, X):
            cells = ",".join(f"{v:.10g}" for v in x)
            lines.append(f"{kind},{lab},{cells}" if cells else f"{kind},{lab}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def map_to_svg(m: PrincipalMap, title: str = "") -> str:
    """Static 800x800 scatter of row (circles) and column (squares) points.

    Both axes share one scale so distances read correctly; output depends
    only on the map, so identical inputs give byte-identical files.
    """
    pts = np.vstack([m.row_coords, m.col_coords])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    lo = np.minimum(lo, 0.0)
    hi = np.maximum(hi, 0.0)
    span = float(max((hi - lo).max(), 1e-12))
    inner = SVG_SIZE - 2 * SVG_MARGIN
    k = inner / span
    cx = SVG_MARGIN + (inner - (hi[0] - lo[0]) * k) / 2
    cy = SVG_MARGIN + (inner - (hi[1] - lo[1]) * k) / 2

    def xy(p):
        return cx + (p[0] - lo[0]) * k, SVG_SIZE - (cy + (p[1] - lo[1]) * k)

    ox, oy = xy((0.0, 0.0))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        "<style>.row{fill:#1f77b4}.col{fill:#d62728}.lab{font:11px sans-serif}"
        ".axis{stroke:#888;stroke-width:1}.ttl{font:14px sans-serif}</style>",
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
        f'<line class="axis" x1="{SVG_MARGIN}" y1="{_fmt(oy)}" x2="{SVG_SIZE - SVG_MARGIN}" y2="{_fmt(oy)}"/>',
        f'<line class="axis" x1="{_fmt(ox)}" y1="{SVG_MARGIN}" x2="{_fmt(ox)}" y2="{SVG_SIZE - SVG_MARGIN}"/>',
        f'<text class="lab" x="{SVG_SIZE - SVG_MARGIN}" y="{_fmt(oy - 6)}" text-anchor="end">'
        f"{escape(m.axis_label(0))}</text>",
        f'<text class="lab" x="{_fmt(ox + 6)}" y="{SVG_MARGIN - 8}">{escape(m.axis_label(1))}</text>',
    ]
    if title:
        out.append(f'<text class="ttl" x="{SVG_SIZE // 2}" y="24" text-anchor="middle">{escape(title)}</text>')
    for lab, p in zip(m.row_labels, m.row_coords):
        x, y = xy(p)
        out.append(f'<circle class="row" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3"/>')
        out.append(f'<text class="lab row" x="{_fmt(x + 5)}" y="{_fmt(y - 4)}">{escape(lab)}</text>')
    for lab, p in zip(m.col_labels, m.col_coords):
        x, y = xy(p)
        out.append(f'<rect class="col" x="{_fmt(x - 3)}" y="{_fmt(y - 3)}" width="6" height="6"/>')
        out.append(f'<text class="lab col" x="{_fmt(x + 5)}" y="{_fmt(y - 4)}">{escape(lab)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
