"""Circumcenter (minimum enclosing circle) and incenter set (Chebyshev centers) of convex polygons."""
from __future__ import annotations

import math
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .geometry import ConvexPolygon, Segment, as_points, distance_to_segment

EXHAUSTIVE_LIMIT = 12


class Circumcircle(NamedTuple):
    center: np.ndarray
    radius: float


class IncenterSolution(NamedTuple):
    segment: Segment
    inradius: float

    @property
    def is_point(self) -> bool:
        return bool(np.array_equal(self.segment.start, self.segment.end))


# -- minimum enclosing circle -------------------------------------------------

def circle_through(a, b, c):
    """Circle through three points, or ``None`` when they are collinear."""
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    scale = max(bx * bx + by * by, cx * cx + cy * cy)
    if abs(d) <= 1e-14 * scale:
        return None
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = np.array([a[0] + ux, a[1] + uy])
    return Circumcircle(center, math.hypot(ux, uy))


def _circle_two(a, b) -> Circumcircle:
    center = 0.5 * (np.asarray(a, dtype=float) + np.asarray(b, dtype=float))
    return Circumcircle(center, 0.5 * math.hypot(b[0] - a[0], b[1] - a[1]))


def _covers(circle: Circumcircle, p, slack: float) -> bool:
    return math.hypot(p[0] - circle.center[0], p[1] - circle.center[1]) <= circle.radius + slack


def enclosing_circle_exhaustive(points, slack: float | None = None) -> Circumcircle:
    """Smallest circle covering ``points`` by checking every pair and triple.

    A candidate covers a point when it lies within ``radius + slack``
    (default ``1e-12`` times the extent of the points) to absorb round-off.
    """
    pts = as_points(points)
    if len(pts) == 1:
        return Circumcircle(pts[0].copy(), 0.0)
    if slack is None:
        slack = 1e-12 * (float(np.ptp(pts, axis=0).max()) or 1.0)
    best = None
    cands = [_circle_two(pts[a], pts[b]) for a, b in combinations(range(len(pts)), 2)]
    for a, b, c in combinations(range(len(pts)), 3):
        circ = circle_through(pts[a], pts[b], pts[c])
        if circ is not None:
            cands.append(circ)
    centers = np.array([c.center for c in cands])
    radii = np.array([c.radius for c in cands])
    reach = np.linalg.norm(pts[None, :, :] - centers[:, None, :], axis=2).max(axis=1)
    ok = reach <= radii + slack
    ok_idx = np.flatnonzero(ok)
    best = ok_idx[np.argmin(radii[ok_idx])]
    # report the radius actually needed at the chosen center
    return Circumcircle(centers[best], float(reach[best]))


def enclosing_circle_welzl(points, seed: int = 0) -> Circumcircle:
    """Randomized incremental minimum enclosing circle (expected linear time)."""
    pts = as_points(points)
    rng = np.random.default_rng(seed)
    pts = pts[rng.permutation(len(pts))]
    scale = float(np.ptp(pts, axis=0).max()) or 1.0
    slack = 1e-12 * scale
    circ = Circumcircle(pts[0].copy(), 0.0)
    for i in range(1, len(pts)):
        if _covers(circ, pts[i], slack):
            continue
        circ = Circumcircle(pts[i].copy(), 0.0)
        for j in range(i):
            if _covers(circ, pts[j], slack):
                continue
            circ = _circle_two(pts[i], pts[j])
            for k in range(j):
                if _covers(circ, pts[k], slack):
                    continue
                through = circle_through(pts[i], pts[j], pts[k])
                if through is None:
                    # collinear: the widest pair spans the other point
                    trio = [pts[i], pts[j], pts[k]]
                    through = max((_circle_two(trio[a], trio[b]) for a, b in ((0, 1), (0, 2), (1, 2))),
                                  key=lambda c: c.radius)
                circ = through
    reach = float(np.linalg.norm(pts - circ.center, axis=1).max())
    return Circumcircle(circ.center, reach)


def circumcenter(W: ConvexPolygon, method: str = "auto") -> Circumcircle:
    """Minimum enclosing circle of the vertices of ``W``.

    ``method`` is ``"exhaustive"``, ``"welzl"`` or ``"auto"`` (exhaustive for
    at most 12 vertices).
    """
    verts = W.vertices if isinstance(W, ConvexPolygon) else as_points(W)
    if method == "auto":
        method = "exhaustive" if len(verts) <= EXHAUSTIVE_LIMIT else "welzl"
    if method == "exhaustive":
        return enclosing_circle_exhaustive(verts)
    if method == "welzl":
        return enclosing_circle_welzl(verts)
    raise ValueError(f"unknown method {method!r}")


# -- Chebyshev center -----------------------------------------------------------

class LPResult(NamedTuple):
    x: np.ndarray
    value: float
    status: str


def simplex_max(c, A, b, max_iter: int = 500) -> LPResult:
    """Maximize ``c @ z`` subject to ``A @ z <= b``, ``z >= 0``, with ``b >= 0``.

    Dense tableau simplex started from the slack basis, Bland's pivoting rule.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, nv = A.shape
    if np.any(b < 0):
        raise ValueError("slack basis requires b >= 0")
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :nv] = -c
    basis = list(range(nv, nv + m))
    for _ in range(max_iter):
        reduced = T[m, :-1]
        entering = np.flatnonzero(reduced < -1e-12)
        if len(entering) == 0:
            z = np.zeros(nv + m)
            z[basis] = T[:m, -1]
            return LPResult(z[:nv], float(T[m, -1]), "optimal")
        col = int(entering[0])
        column = T[:m, col]
        pos = column > 1e-12
        if not np.any(pos):
            return LPResult(np.full(nv, np.nan), math.inf, "unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / column[pos]
        best = ratios.min()
        tied = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        row = int(min(tied, key=lambda r: basis[r]))
        T[row] /= T[row, col]
        for r in range(m + 1):
            if r != row and T[r, col] != 0.0:
                T[r] -= T[r, col] * T[row]
        basis[row] = col
    raise RuntimeError("simplex iteration limit reached")


def _edge_lines(W: ConvexPolygon):
    normals = W.inward_normals()
    offsets = np.einsum("ij,ij->i", normals, W.vertices)
    return normals, offsets


def _chebyshev_lp(W: ConvexPolygon):
    normals, offsets = _edge_lines(W)
    x0 = W.vertices.mean(axis=0)
    slack0 = normals @ x0 - offsets
    # variables (u+, u-, r) with x = x0 + u+ - u-; constraint r - n.(x - x0) <= D_e(x0)
    A = np.column_stack([-normals, normals, np.ones(len(normals))])
    res = simplex_max(np.array([0.0, 0.0, 0.0, 0.0, 1.0]), A, slack0)
    if res.status != "optimal":
        raise RuntimeError(f"Chebyshev LP ended with status {res.status}")
    x = x0 + res.x[0:2] - res.x[2:4]
    r = float(np.min(normals @ x - offsets))
    return x, r, normals, offsets


def incenter_set(W: ConvexPolygon, tol: float | None = None) -> IncenterSolution:
    """All centers of maximum inscribed circles of ``W``, as a (possibly degenerate) segment."""
    tol = 1e-9 * W.diameter if tol is None else tol
    x, r, normals, offsets = _chebyshev_lp(W)
    slack = np.maximum(normals @ x - offsets - r, 0.0)
    active = np.flatnonzero(slack <= tol)
    best = (0.0, 0.0, np.zeros(2))
    for e in active:
        d = np.array([-normals[e, 1], normals[e, 0]])
        nd = normals @ d
        lo, hi = -math.inf, math.inf
        for f in range(len(normals)):
            if abs(nd[f]) <= 1e-9:
                continue
            bound = -slack[f] / nd[f]
            if nd[f] > 0:
                lo = max(lo, bound)
            else:
                hi = min(hi, bound)
        lo, hi = min(lo, 0.0), max(hi, 0.0)
        if hi - lo > best[1] - best[0]:
            best = (lo, hi, d)
    lo, hi, d = best
    if hi - lo <= tol:
        return IncenterSolution(Segment(x, x.copy()), r)
    a, b = x + lo * d, x + hi * d
    if (b[0], b[1]) < (a[0], a[1]):
        a, b = b, a
    return IncenterSolution(Segment(a, b), r)


def inradius(W: ConvexPolygon) -> float:
    return incenter_set(W).inradius


def distance_to_incenter_set(W: ConvexPolygon, p) -> float:
    return distance_to_segment(p, incenter_set(W).segment)
