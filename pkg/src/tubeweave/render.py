"""Standalone SVG views of maps, roadmaps, plans and rolled-out tubes.

The y axis points up, as in a plotted map.  CCW-family plans are drawn
black and CW-family plans red; waypoints are numbered in visiting order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .geometry import EnvironmentMap
from .roadmap import RoadmapGraph
from .weave import Direction, WeavePlan


@dataclass(frozen=True)
class RenderStyle:
    scale: float = 0.5  # px per mm
    padding: float = 20.0  # px
    boundary_stroke: str = "#444444"
    obstacle_fill: str = "#9aa5b1"
    obstacle_stroke: str = "#3e4c59"
    node_color: str = "#000000"
    node_radius: float = 2.0
    edge_color: str = "#1f77b4"
    edge_width: float = 0.4
    ccw_color: str = "#000000"
    cw_color: str = "#d62728"
    path_width: float = 2.0
    tube_color: str = "#2ca02c"
    tube_width: float = 1.5
    font_size: float = 12.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(
    env: EnvironmentMap | None = None,
    roadmap: RoadmapGraph | None = None,
    plans: Sequence[WeavePlan] = (),
    tubes: Sequence[Sequence] = (),
    style: RenderStyle = RenderStyle(),
    title: str | None = None,
) -> str:
    pts = []
    if env is not None:
        pts.append(env.boundary.array)
    if roadmap is not None and len(roadmap):
        pts.append(roadmap.positions)
    pts += [np.asarray(p.polyline, float) for p in plans]
    pts += [np.asarray(t, float).reshape(-1, 2) for t in tubes]
    pad = style.padding
    if not pts:
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(2 * pad)}" height="{_fmt(2 * pad)}"/>\n'
        )
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    k = style.scale
    width = (hi[0] - lo[0]) * k + 2 * pad
    height = (hi[1] - lo[1]) * k + 2 * pad

    def X(x):
        return _fmt((x - lo[0]) * k + pad)

    def Y(y):
        return _fmt((hi[1] - y) * k + pad)

    def points(seq):
        return " ".join(f"{X(x)},{Y(y)}" for x, y in seq)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    if env is not None:
        out.append(
            f'<polygon class="boundary" points="{points(env.boundary.vertices)}" fill="none" '
            f'stroke="{style.boundary_stroke}" stroke-width="1"/>'
        )
        for i, o in enumerate(env.obstacles):
            out.append(
                f'<polygon class="obstacle" id="obstacle-{i}" points="{points(o.vertices)}" '
                f'fill="{style.obstacle_fill}" stroke="{style.obstacle_stroke}" stroke-width="1"/>'
            )
    if roadmap is not None:
        out.append('<g class="roadmap">')
        P = roadmap.positions
        for i, j in roadmap.edges():
            out.append(
                f'<line class="edge" x1="{X(P[i, 0])}" y1="{Y(P[i, 1])}" x2="{X(P[j, 0])}" y2="{Y(P[j, 1])}" '
                f'stroke="{style.edge_color}" stroke-width="{style.edge_width}"/>'
            )
        for x, y in P:
            out.append(f'<circle class="node" cx="{X(x)}" cy="{Y(y)}" r="{style.node_radius}" fill="{style.node_color}"/>')
        out.append("</g>")
    for p in plans:
        cw = p.family is Direction.CW
        color = style.cw_color if cw else style.ccw_color
        out.append(
            f'<polyline class="path {"cw" if cw else "ccw"}" points="{points(p.polyline)}" fill="none" '
            f'stroke="{color}" stroke-width="{style.path_width}"/>'
        )
        for n, w in enumerate(p.waypoints, start=1):
            if w.position is None:
                continue
            out.append(
                f'<text class="waypoint" x="{X(w.position[0])}" y="{Y(w.position[1])}" '
                f'font-size="{style.font_size}" fill="{color}">{n}</text>'
            )
    for t in tubes:
        out.append(
            f'<polyline class="tube" points="{points(t)}" fill="none" stroke="{style.tube_color}" '
            f'stroke-width="{style.tube_width}" stroke-dasharray="4 2"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
