"""The 1-center functions lg/sm, per-generator G_i/F_i, and the multi-center objectives.

``H_DC(P) = max_i G_i(P)`` is the disk-covering (multi-circumcenter) objective,
minimized; ``H_SP(P) = min_i F_i(P)`` is the sphere-packing (multi-incenter)
objective, maximized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolygon, Tolerances, point_in_polygon_grid
from .voronoi import EdgeA, EdgeRecord, VoronoiPartition, check_configuration, compute_partition


class OutsideEnvironmentError(ValueError):
    """The query point lies outside the polygon."""


def _check_inside(Q: ConvexPolygon, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not Q.contains(p, eps=1e-9 * Q.diameter):
        raise OutsideEnvironmentError(f"point {tuple(p)} lies outside the polygon")
    return p


def lg(Q: ConvexPolygon, p) -> float:
    """Largest distance from ``p`` to a vertex of ``Q``."""
    p = _check_inside(Q, p)
    return float(np.linalg.norm(Q.vertices - p, axis=1).max())


def sm(Q: ConvexPolygon, p) -> float:
    """Smallest distance from ``p`` to an edge of ``Q``."""
    p = _check_inside(Q, p)
    return float(Q.edge_distances(p).min())


@dataclass(frozen=True)
class ActiveSets:
    """Generators, Voronoi vertices and Voronoi edges attaining an extremal value.

    ``vertices``/``edges`` hold ``(i, record)`` pairs: the owning cell and the
    vertex or edge of that cell.
    """

    generators: tuple
    vertices: tuple
    edges: tuple
    tolerance: float


def vertex_distances(partition: VoronoiPartition, i: int) -> np.ndarray:
    return np.linalg.norm(partition.cells[i].vertices - partition.points[i], axis=1)


def edge_clearance(partition: VoronoiPartition, i: int, edge: EdgeRecord) -> float:
    """``D_e(p_i)`` for an edge of cell ``i``.

    Bisector edges give half the inter-generator distance; boundary edges give
    the distance to the whole environment side.
    """
    p = partition.points[i]
    if isinstance(edge.kind, EdgeA):
        return 0.5 * float(np.linalg.norm(p - partition.points[edge.kind.j]))
    side = edge.kind.side
    return float(partition.environment.edge_distances(p)[side])


def edge_clearances(partition: VoronoiPartition, i: int) -> np.ndarray:
    p = partition.points[i]
    side_d = partition.environment.edge_distances(p)
    out = np.empty(len(partition.edge_records[i]))
    for k, edge in enumerate(partition.edge_records[i]):
        if isinstance(edge.kind, EdgeA):
            out[k] = 0.5 * np.linalg.norm(p - partition.points[edge.kind.j])
        else:
            out[k] = side_d[edge.kind.side]
    return out


def evaluate_G(partition: VoronoiPartition, i: int) -> float:
    """``G_i``: largest distance from ``p_i`` to a point of its cell."""
    return float(vertex_distances(partition, i).max())


def evaluate_F(partition: VoronoiPartition, i: int) -> float:
    """``F_i``: clearance of ``p_i`` inside its cell (half-distance to neighbors, distance to sides)."""
    return float(edge_clearances(partition, i).min())


def G_values(partition: VoronoiPartition) -> np.ndarray:
    return np.array([evaluate_G(partition, i) for i in range(partition.n)])


def F_values(partition: VoronoiPartition) -> np.ndarray:
    return np.array([evaluate_F(partition, i) for i in range(partition.n)])


def hdc_from_partition(partition: VoronoiPartition, act: float | None = None) -> tuple[float, ActiveSets]:
    act = partition.tol.act if act is None else act
    dists = [vertex_distances(partition, i) for i in range(partition.n)]
    value = max(float(d.max()) for d in dists)
    gens, verts = [], []
    for i, d in enumerate(dists):
        if d.max() >= value - act:
            gens.append(i)
            verts.extend((i, partition.vertex_records[i][k]) for k in np.flatnonzero(d >= value - act))
    return value, ActiveSets(tuple(gens), tuple(verts), (), act)


def hsp_from_partition(partition: VoronoiPartition, act: float | None = None) -> tuple[float, ActiveSets]:
    act = partition.tol.act if act is None else act
    clear = [edge_clearances(partition, i) for i in range(partition.n)]
    value = min(float(c.min()) for c in clear)
    gens, edges = [], []
    for i, c in enumerate(clear):
        if c.min() <= value + act:
            gens.append(i)
            edges.extend((i, partition.edge_records[i][k]) for k in np.flatnonzero(c <= value + act))
    return value, ActiveSets(tuple(gens), (), tuple(edges), act)


def evaluate_HDC(Q: ConvexPolygon, P, tol: Tolerances | None = None) -> tuple[float, ActiveSets]:
    """Multi-circumcenter function and its active sets (partition recomputed)."""
    part = compute_partition(Q, P, tol)
    return hdc_from_partition(part)


def evaluate_HSP(Q: ConvexPolygon, P, tol: Tolerances | None = None) -> tuple[float, ActiveSets]:
    """Multi-incenter function and its active sets (partition recomputed)."""
    part = compute_partition(Q, P, tol)
    return hsp_from_partition(part)


def hdc_grid(Q: ConvexPolygon, P, grid: int = 300) -> float:
    """Brute force ``max_q min_i |q - p_i|`` over grid points of ``Q`` plus its vertices."""
    P = check_configuration(Q, P)
    pts, _ = point_in_polygon_grid(Q, grid)
    pts = np.vstack([pts, Q.vertices])
    best = np.full(len(pts), np.inf)
    for p in P:
        best = np.minimum(best, np.linalg.norm(pts - p, axis=1))
    return float(best.max())


def hsp_enumerated(Q: ConvexPolygon, P) -> float:
    """Brute force ``min`` over all generator pairs and all generator/side distances."""
    P = check_configuration(Q, P)
    side = min(float(Q.edge_distances(p).min()) for p in P)
    if len(P) == 1:
        return side
    d = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
    d[np.diag_indices(len(P))] = np.inf
    return min(side, 0.5 * float(d.min()))


__all__ = [
    "ActiveSets", "OutsideEnvironmentError", "lg", "sm", "evaluate_G", "evaluate_F", "G_values",
    "F_values", "evaluate_HDC", "evaluate_HSP", "hdc_from_partition", "hsp_from_partition",
    "hdc_grid", "hsp_enumerated", "vertex_distances", "edge_clearance", "edge_clearances",
]
