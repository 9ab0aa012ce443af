"""Static SVG frames: environment outline, Voronoi cells, generators, optional circles and trails."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .centers import circumcenter, incenter_set
from .geometry import ConvexPolygon, project_onto_segment
from .voronoi import VoronoiPartition, compute_partition

PANEL_PX = 420
MARGIN_PX = 20
TITLE_PX = 24


class _Frame:
    """Maps environment coordinates into one panel (y axis flipped)."""

    def __init__(self, Q: ConvexPolygon, x0: float = 0.0):
        lo, hi = Q.bounds
        span = float(max(hi - lo))
        self.scale = (PANEL_PX - 2 * MARGIN_PX) / span
        self.lo, self.hi = lo, hi
        self.x0 = x0

    def xy(self, p) -> tuple:
        x = self.x0 + MARGIN_PX + (p[0] - self.lo[0]) * self.scale
        y = TITLE_PX + MARGIN_PX + (self.hi[1] - p[1]) * self.scale
        return x, y

    def points(self, pts) -> str:
        return " ".join("{:.3f},{:.3f}".format(*self.xy(p)) for p in pts)


def _panel(Q: ConvexPolygon, part: VoronoiPartition, x0: float, title: str,
           circles: str | None, trails: np.ndarray | None) -> list:
    fr = _Frame(Q, x0)
    out = [f'<g class="panel">',
           f'<text x="{x0 + PANEL_PX / 2:.1f}" y="{TITLE_PX - 6}" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{escape(title)}</text>']
    for i, cell in enumerate(part.cells):
        out.append(f'<polygon class="cell" data-generator="{i}" points="{fr.points(cell.vertices)}" '
                   'fill="#eef3fb" stroke="#5577aa" stroke-width="1"/>')
    out.append(f'<polygon class="environment" points="{fr.points(Q.vertices)}" '
               'fill="none" stroke="black" stroke-width="2"/>')
    if circles in ("cc", "ic"):
        for i, cell in enumerate(part.cells):
            if circles == "cc":
                c = circumcenter(cell)
                center, r = c.center, c.radius
            else:
                sol = incenter_set(cell)
                center, r = project_onto_segment(part.points[i], sol.segment), sol.inradius
            cx, cy = fr.xy(center)
            out.append(f'<circle class="{circles}" cx="{cx:.3f}" cy="{cy:.3f}" r="{r * fr.scale:.3f}" '
                       'fill="none" stroke="#cc7733" stroke-width="0.8"/>')
    if trails is not None:
        for i in range(trails.shape[1]):
            out.append(f'<polyline class="trail" points="{fr.points(trails[:, i])}" '
                       'fill="none" stroke="#aa3333" stroke-width="1"/>')
        for p in trails[0]:
            cx, cy = fr.xy(p)
            out.append(f'<circle class="start" cx="{cx:.3f}" cy="{cy:.3f}" r="2.5" fill="#999999"/>')
    for p in part.points:
        cx, cy = fr.xy(p)
        out.append(f'<circle class="generator" cx="{cx:.3f}" cy="{cy:.3f}" r="3" fill="black"/>')
    out.append("</g>")
    return out


def _document(width: float, body: list) -> str:
    height = TITLE_PX + PANEL_PX
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
            f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">')
    return "\n".join(['<?xml version="1.0" encoding="UTF-8"?>', head,
                      f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>', *body, "</svg>\n"])


def partition_svg(Q: ConvexPolygon, P, title: str = "", circles: str | None = None,
                  partition: VoronoiPartition | None = None) -> str:
    """One frame of the partition of ``Q`` generated by ``P``.

    ``circles`` is ``None``, ``"cc"`` (circumcircles of the cells) or ``"ic"``
    (incircles centered at the point of the incenter set nearest each generator).
    """
    part = compute_partition(Q, P) if partition is None else partition
    return _document(PANEL_PX, _panel(Q, part, 0.0, title, circles, None))


def overlay_svg(Q: ConvexPolygon, configs: np.ndarray, title: str = "", circles: str | None = None) -> str:
    """Final partition with every generator's path drawn as a polyline."""
    configs = np.asarray(configs, dtype=float)
    part = compute_partition(Q, configs[-1])
    return _document(PANEL_PX, _panel(Q, part, 0.0, title, circles, configs))


def three_panel_svg(Q: ConvexPolygon, configs: np.ndarray, circles: str | None = None,
                    titles=("initial", "final", "trajectories")) -> str:
    """Initial partition, final partition and trajectory overlay side by side."""
    configs = np.asarray(configs, dtype=float)
    first, last = compute_partition(Q, configs[0]), compute_partition(Q, configs[-1])
    body = (_panel(Q, first, 0.0, titles[0], circles, None)
            + _panel(Q, last, PANEL_PX, titles[1], circles, None)
            + _panel(Q, last, 2 * PANEL_PX, titles[2], None, configs))
    return _document(3 * PANEL_PX, body)
