"""Generalized gradients of lg, sm, G_i, F_i and the multi-center objectives.

A generalized gradient is represented by a finite :class:`GradientSet` whose
convex hull it is.  The least-norm element of that hull is found with Wolfe's
minimum-norm-point method (:func:`min_norm_point`); its negative is a descent
direction.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .centers import circle_through, circumcenter, incenter_set
from .geometry import ConvexPolygon, HullPosition, distance_to_segment, zero_in_hull
from .objective import (
    _check_inside,
    edge_clearances,
    hdc_from_partition,
    hsp_from_partition,
    vertex_distances,
)
from .voronoi import (
    EdgeA,
    EdgeRecord,
    Gen,
    Side,
    VertexA,
    VertexB,
    VertexC,
    VertexRecord,
    VoronoiPartition,
    compute_partition,
)

VECTOR_EPS = 1e-9


class Problem(enum.Enum):
    DC = "DC"
    SP = "SP"


class DegenerateConstructionError(ValueError):
    """Parallel bisector/side or collinear generator triple."""


@dataclass(frozen=True)
class GradientSet:
    dimension: int
    candidates: np.ndarray
    provenance: tuple = field(default=())

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.candidates, dtype=float))
        if c.size == 0 or c.shape[1] != self.dimension:
            raise ValueError(f"need a nonempty (k, {self.dimension}) candidate array, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("gradient candidates must be finite")
        object.__setattr__(self, "candidates", c)
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple(range(len(c))))

    def __len__(self) -> int:
        return len(self.candidates)

    def deduplicated(self, eps: float = 1e-12) -> "GradientSet":
        keep, tags = [], []
        for vec, tag in zip(self.candidates, self.provenance):
            if all(np.linalg.norm(vec - k) > eps for k in keep):
                keep.append(vec)
                tags.append(tag)
        return GradientSet(self.dimension, np.array(keep), tuple(tags))

    def block(self, i: int) -> np.ndarray:
        """The ``i``-th 2-vector block of every candidate (projection ``pi_i``)."""
        return self.candidates[:, 2 * i:2 * i + 2]


@dataclass(frozen=True)
class CriticalityReport:
    contains_zero: HullPosition
    least_norm_vector: np.ndarray
    least_norm_magnitude: float


# -- 1-center gradients ---------------------------------------------------------

def _unit_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def grad_lg(Q: ConvexPolygon, p, act: float | None = None) -> GradientSet:
    """``co{unit(p - v)}`` over the vertices ``v`` of ``Q`` furthest from ``p``."""
    p = _check_inside(Q, p)
    act = Q.tolerances().act if act is None else act
    d = np.linalg.norm(Q.vertices - p, axis=1)
    idx = np.flatnonzero(d >= d.max() - act)
    if np.any(d[idx] <= Q.tolerances().geo):
        raise ValueError("point coincides with an achieving vertex")
    return GradientSet(2, _unit_rows(p - Q.vertices[idx]), tuple(("vertex", int(k)) for k in idx))


def grad_sm(Q: ConvexPolygon, p, act: float | None = None) -> GradientSet:
    """``co{n_e}`` over the inward normals of the sides of ``Q`` closest to ``p``."""
    p = _check_inside(Q, p)
    act = Q.tolerances().act if act is None else act
    d = Q.edge_distances(p)
    idx = np.flatnonzero(d <= d.min() + act)
    return GradientSet(2, Q.inward_normals()[idx], tuple(("side", int(k)) for k in idx))


# -- lambda and mu ------------------------------------------------------------------

def lam(line, p_i, p_j) -> float:
    """``lambda(e, i, j)`` for the line ``a x + b y + c = 0`` given as ``(a, b, c)``."""
    a, b, c = line
    s = math.hypot(a, b)
    a, b, c = a / s, b / s, c / s
    dx, dy = p_j[0] - p_i[0], p_j[1] - p_i[1]
    den = a * dy - b * dx
    if abs(den) <= 1e-12 * math.hypot(dx, dy):
        raise DegenerateConstructionError("bisector is parallel to the side")
    xm, ym = 0.5 * (p_i[0] + p_j[0]), 0.5 * (p_i[1] + p_j[1])
    return 0.5 - (a * dx + b * dy) * (a * xm + b * ym + c) / den ** 2


def bisector_line_intersection(line, p_i, p_j) -> np.ndarray:
    """Point of the line ``(a, b, c)`` equidistant from ``p_i`` and ``p_j``."""
    a, b, c = line
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    d = p_j - p_i
    m = 0.5 * (p_i + p_j)
    # solve a x + b y = -c and d . x = d . m
    A = np.array([[a, b], [d[0], d[1]]])
    if abs(np.linalg.det(A)) <= 1e-12 * math.hypot(a, b) * np.linalg.norm(d):
        raise DegenerateConstructionError("bisector is parallel to the side")
    return np.linalg.solve(A, np.array([-c, d @ m]))


def lam_from_construction(line, p_i, p_j) -> float:
    """``lambda`` from its defining relation ``P_e(p_j - v) = lambda P_e(p_j - p_i)``."""
    a, b, _ = line
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    v = bisector_line_intersection(line, p_i, p_j)
    t = np.array([-b, a])
    return float(t @ (p_j - v)) / float(t @ (p_j - p_i))


def mu(p_i, p_j, p_k) -> float:
    """``mu(i, j, k)`` in closed form."""
    xi, yi = p_i[0], p_i[1]
    xj, yj = p_j[0], p_j[1]
    xk, yk = p_k[0], p_k[1]
    dxij, dyij = xj - xi, yj - yi
    dxik, dyik = xk - xi, yk - yi
    dxjk, dyjk = xk - xj, yk - yj
    den = xk * dyij - xj * dyik + xi * dyjk
    scale = max(abs(dxij), abs(dyij), abs(dxik), abs(dyik)) ** 2
    if abs(den) <= 1e-12 * scale:
        raise DegenerateConstructionError("generators are collinear")
    return 0.5 + (dxij * dxjk + dyij * dyjk) * (dxik * dxjk + dyik * dyjk) / (2.0 * den ** 2)


def mu_from_construction(p_i, p_j, p_k) -> float:
    """``mu`` from ``t . (p_j - v) = mu t . (p_j - p_i)`` with ``v`` the circumcenter, ``t`` normal to ``p_k - p_j``."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    circ = circle_through(p_i, p_j, p_k)
    if circ is None:
        raise DegenerateConstructionError("generators are collinear")
    w = p_k - p_j
    t = np.array([-w[1], w[0]])
    return float(t @ (p_j - circ.center)) / float(t @ (p_j - p_i))


# -- per-generator gradients -----------------------------------------------------

def _side_line(Q: ConvexPolygon, side: int) -> tuple[float, float, float]:
    n = Q.inward_normals()[side]
    return float(n[0]), float(n[1]), float(-(n @ Q.vertices[side]))


def _place(n: int, blocks: dict) -> np.ndarray:
    out = np.zeros(2 * n)
    for idx, vec in blocks.items():
        out[2 * idx:2 * idx + 2] += vec
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _vertex_candidate(partition: VoronoiPartition, v: np.ndarray, kind) -> np.ndarray:
    P = partition.points
    n = partition.n
    if isinstance(kind, VertexA):
        i, j, k = kind.i, kind.j, kind.k
        return _place(n, {
            i: mu(P[i], P[j], P[k]) * _unit(P[i] - v),
            j: mu(P[j], P[k], P[i]) * _unit(P[j] - v),
            k: mu(P[k], P[i], P[j]) * _unit(P[k] - v),
        })
    if isinstance(kind, VertexB):
        line = _side_line(partition.environment, kind.side)
        i, j = kind.i, kind.j
        return _place(n, {
            i: lam(line, P[i], P[j]) * _unit(P[i] - v),
            j: lam(line, P[j], P[i]) * _unit(P[j] - v),
        })
    return _place(n, {kind.i: _unit(P[kind.i] - v)})


def vertex_gradient_candidates(partition: VoronoiPartition, i: int, rec: VertexRecord) -> list:
    """``d_v G_i``: one candidate, or one per admissible pair of other defining elements."""
    if not rec.degenerate:
        return [(_vertex_candidate(partition, rec.position, rec.kind), rec.kind)]
    others = [el for el in rec.defining_elements if el != Gen(i)]
    out = []
    for x, y in combinations(others, 2):
        if isinstance(x, Gen) and isinstance(y, Gen):
            kind = VertexA(i, x.index, y.index)
        elif isinstance(x, Side) and isinstance(y, Side):
            kind = VertexC(x.index, y.index, i)
        else:
            side, gen = (x, y) if isinstance(x, Side) else (y, x)
            kind = VertexB(side.index, i, gen.index)
        try:
            out.append((_vertex_candidate(partition, rec.position, kind), kind))
        except DegenerateConstructionError:
            continue
    if not out:
        raise DegenerateConstructionError(f"no constructible element pair at degenerate vertex {rec.position}")
    return out


def edge_gradient_candidate(partition: VoronoiPartition, i: int, rec: EdgeRecord) -> np.ndarray:
    """``d_e F_i`` for a cell edge."""
    n = partition.n
    if isinstance(rec.kind, EdgeA):
        return _place(n, {i: 0.5 * rec.inward_normal, rec.kind.j: -0.5 * rec.inward_normal})
    return _place(n, {i: rec.inward_normal})


def _achieving_vertices(partition: VoronoiPartition, i: int, act: float):
    d = vertex_distances(partition, i)
    return [partition.vertex_records[i][k] for k in np.flatnonzero(d >= d.max() - act)]


def _achieving_edges(partition: VoronoiPartition, i: int, act: float):
    c = edge_clearances(partition, i)
    return [partition.edge_records[i][k] for k in np.flatnonzero(c <= c.min() + act)]


def grad_G(partition: VoronoiPartition, i: int, act: float | None = None) -> GradientSet:
    """Generalized gradient of ``G_i`` (dimension ``2n``)."""
    act = partition.tol.act if act is None else act
    cands, tags = [], []
    for rec in _achieving_vertices(partition, i, act):
        for vec, kind in vertex_gradient_candidates(partition, i, rec):
            cands.append(vec)
            tags.append((i, kind))
    return GradientSet(2 * partition.n, np.array(cands), tuple(tags))


def grad_F(partition: VoronoiPartition, i: int, act: float | None = None) -> GradientSet:
    """Generalized gradient of ``F_i`` (dimension ``2n``)."""
    act = partition.tol.act if act is None else act
    recs = _achieving_edges(partition, i, act)
    cands = [edge_gradient_candidate(partition, i, rec) for rec in recs]
    return GradientSet(2 * partition.n, np.array(cands), tuple((i, rec.kind) for rec in recs))


def _union(sets: list, dim: int) -> GradientSet:
    cands = np.vstack([g.candidates for g in sets])
    tags = tuple(t for g in sets for t in g.provenance)
    return GradientSet(dim, cands, tags).deduplicated()


def grad_HDC_partition(partition: VoronoiPartition, act: float | None = None) -> GradientSet:
    act = partition.tol.act if act is None else act
    _, active = hdc_from_partition(partition, act)
    return _union([grad_G(partition, i, act) for i in active.generators], 2 * partition.n)


def grad_HSP_partition(partition: VoronoiPartition, act: float | None = None) -> GradientSet:
    act = partition.tol.act if act is None else act
    _, active = hsp_from_partition(partition, act)
    return _union([grad_F(partition, i, act) for i in active.generators], 2 * partition.n)


def grad_HDC(Q: ConvexPolygon, P) -> GradientSet:
    return grad_HDC_partition(compute_partition(Q, P))


def grad_HSP(Q: ConvexPolygon, P) -> GradientSet:
    return grad_HSP_partition(compute_partition(Q, P))


def cell_grad_lg(partition: VoronoiPartition, i: int, act: float | None = None) -> GradientSet:
    """``d lg_{V_i}`` at ``p_i`` (dimension 2), from the cell's furthest vertices."""
    act = partition.tol.act if act is None else act
    recs = _achieving_vertices(partition, i, act)
    vecs = np.array([partition.points[i] - r.position for r in recs])
    return GradientSet(2, _unit_rows(vecs), tuple(r.kind for r in recs))


def cell_grad_sm(partition: VoronoiPartition, i: int, act: float | None = None) -> GradientSet:
    """``d sm_{V_i}`` at ``p_i`` (dimension 2), from the cell's closest edges."""
    act = partition.tol.act if act is None else act
    recs = _achieving_edges(partition, i, act)
    return GradientSet(2, np.array([r.inward_normal for r in recs]), tuple(r.kind for r in recs))


# -- least-norm element -------------------------------------------------------------

def _affine_minimizer(X: np.ndarray) -> np.ndarray:
    """Weights (summing to 1) of the min-norm point of the affine hull of the rows of ``X``."""
    k = len(X)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = X @ X.T
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    w = sol[:k]
    return w / w.sum()


def min_norm_point(X, tol: float = 1e-12, max_iter: int = 1000) -> tuple[np.ndarray, np.ndarray]:
    """Wolfe's method: the point of ``co(rows of X)`` nearest the origin, and its weights."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m = len(X)
    scale = max(float((X * X).sum(axis=1).max()), 1e-300)
    start = int(np.argmin((X * X).sum(axis=1)))
    corral = [start]
    weights = np.array([1.0])
    x = X[start].copy()
    for _ in range(max_iter):
        dots = X @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol * scale or j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)
        while True:
            alpha = _affine_minimizer(X[corral])
            if np.all(alpha > tol):
                weights = alpha
                break
            neg = alpha <= tol
            theta = min(1.0, float(np.min(weights[neg] / (weights[neg] - alpha[neg]))))
            weights = weights + theta * (alpha - weights)
            keep = weights > tol
            keep[np.argmax(weights)] = True
            corral = [c for c, k in zip(corral, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
        x = weights @ X[corral]
    full = np.zeros(m)
    full[corral] = weights
    return x, full


def min_norm_point_2d(X) -> np.ndarray:
    """Point of ``co(rows of X)`` nearest the origin, for 2-vectors, by enumeration.

    The nearest point of a planar hull not containing the origin lies on a
    segment between two of the points, so the best point over all pairs is
    optimal exactly when every point satisfies ``x . p >= |x|^2``; otherwise
    the origin is inside the hull.
    """
    pts = [(float(a), float(b)) for a, b in np.asarray(X, dtype=float)]
    best = min(pts, key=lambda p: p[0] * p[0] + p[1] * p[1])
    best_n = best[0] * best[0] + best[1] * best[1]
    m = len(pts)
    for a in range(m):
        ax, ay = pts[a]
        for b in range(a + 1, m):
            dx, dy = pts[b][0] - ax, pts[b][1] - ay
            dd = dx * dx + dy * dy
            if dd == 0.0:
                continue
            t = -(ax * dx + ay * dy) / dd
            if 0.0 < t < 1.0:
                qx, qy = ax + t * dx, ay + t * dy
                qn = qx * qx + qy * qy
                if qn < best_n:
                    best, best_n = (qx, qy), qn
    slack = 1e-12 * max(p[0] * p[0] + p[1] * p[1] for p in pts)
    if all(p[0] * best[0] + p[1] * best[1] >= best_n - slack for p in pts):
        return np.array(best)
    return np.zeros(2)


def least_norm(g: GradientSet, eps: float = VECTOR_EPS) -> CriticalityReport:
    """Least-norm element of ``co(g)`` and where the origin sits relative to ``co(g)``.

    The interior test is only done in dimension 2; in higher dimension the
    position is ``CONTAINED`` when the least-norm element vanishes.
    """
    cands = g.candidates
    if g.dimension == 2:
        x, _ = min_norm_point(cands)
        pos = zero_in_hull(cands, eps)
        if pos is not HullPosition.OUTSIDE:
            x = np.zeros(2)
    else:
        x, _ = min_norm_point(cands)
        pos = HullPosition.CONTAINED if np.linalg.norm(x) <= eps else HullPosition.OUTSIDE
    return CriticalityReport(pos, x, float(np.linalg.norm(x)))


# -- critical configurations --------------------------------------------------------

@dataclass(frozen=True)
class CenteringReport:
    problem: Problem
    criticality: CriticalityReport
    is_critical: bool
    active: tuple
    center_distance: dict
    centered: dict
    projection_position: dict


def center_distance(cell: ConvexPolygon, p, problem: Problem) -> float:
    if problem is Problem.DC:
        return float(np.linalg.norm(np.asarray(p) - circumcenter(cell).center))
    return distance_to_segment(p, incenter_set(cell).segment)


def classify_critical(Q: ConvexPolygon, P, problem: Problem, center_tol: float | None = None,
                      partition: VoronoiPartition | None = None) -> CenteringReport:
    """Least-norm element of the objective's generalized gradient plus per-generator centeredness.

    ``center_tol`` (default ``eps_crit``) decides the ``centered`` flags;
    ``projection_position`` records where the origin sits relative to
    ``pi_i`` of the gradient set for each active generator.
    """
    part = compute_partition(Q, P) if partition is None else partition
    tol = part.tol
    center_tol = tol.crit if center_tol is None else center_tol
    problem = Problem(problem)
    if problem is Problem.DC:
        _, act = hdc_from_partition(part)
        g = grad_HDC_partition(part)
    else:
        _, act = hsp_from_partition(part)
        g = grad_HSP_partition(part)
    report = least_norm(g)
    dist, centered, proj = {}, {}, {}
    for i in act.generators:
        dist[i] = center_distance(part.cells[i], part.points[i], problem)
        centered[i] = dist[i] <= center_tol
        proj[i] = zero_in_hull(g.block(i))
    return CenteringReport(problem, report, report.least_norm_magnitude <= tol.crit, act.generators,
                           dist, centered, proj)


# -- piecewise models ------------------------------------------------------------------

@dataclass(frozen=True)
class PieceModel:
    """A finite family of smooth pieces whose per-group maximum is being decreased.

    ``values[k]`` and ``grads[k]`` are the value and gradient (dimension ``2n``)
    of piece ``k``; ``groups[k]`` names the maximum it belongs to.  ``block[g]``
    is the generator whose coordinates group ``g`` moves, or ``-1`` when the
    group moves all of them.  Sphere-packing objectives enter negated, so that
    every model is a max to be decreased.
    """

    values: np.ndarray
    grads: np.ndarray
    groups: np.ndarray
    block: tuple


def pieces_HDC(partition: VoronoiPartition) -> PieceModel:
    """Every (cell, vertex) distance as a piece of ``H_DC``, with its vertex gradient."""
    vals, grads = [], []
    for i in range(partition.n):
        d = vertex_distances(partition, i)
        for rec, val in zip(partition.vertex_records[i], d):
            for vec, _ in vertex_gradient_candidates(partition, i, rec):
                vals.append(val)
                grads.append(vec)
    return PieceModel(np.array(vals), np.array(grads), np.zeros(len(vals), dtype=int), (-1,))


def pieces_HSP(partition: VoronoiPartition) -> PieceModel:
    """Every (cell, edge) clearance, negated, as a piece of ``-H_SP``."""
    vals, grads = [], []
    for i in range(partition.n):
        c = edge_clearances(partition, i)
        for rec, val in zip(partition.edge_records[i], c):
            vals.append(-val)
            grads.append(-edge_gradient_candidate(partition, i, rec))
    return PieceModel(np.array(vals), np.array(grads), np.zeros(len(vals), dtype=int), (-1,))


def pieces_cell_lg(partition: VoronoiPartition) -> PieceModel:
    """Per generator, the distances to its own cell's vertices (cells held fixed)."""
    n = partition.n
    vals, grads, groups = [], [], []
    for i in range(n):
        verts = partition.cells[i].vertices
        diff = partition.points[i] - verts
        d = np.linalg.norm(diff, axis=1)
        for k in range(len(verts)):
            g = np.zeros(2 * n)
            g[2 * i:2 * i + 2] = diff[k] / d[k]
            vals.append(d[k])
            grads.append(g)
            groups.append(i)
    return PieceModel(np.array(vals), np.array(grads), np.array(groups), tuple(range(n)))


def pieces_cell_sm(partition: VoronoiPartition) -> PieceModel:
    """Per generator, its negated clearances to its own cell's edges (edges held fixed)."""
    n = partition.n
    vals, grads, groups = [], [], []
    for i in range(n):
        c = edge_clearances(partition, i)
        for rec, val in zip(partition.edge_records[i], c):
            g = np.zeros(2 * n)
            g[2 * i:2 * i + 2] = -rec.inward_normal
            vals.append(-val)
            grads.append(g)
            groups.append(i)
    return PieceModel(np.array(vals), np.array(grads), np.array(groups), tuple(range(n)))
