"""Voronoi partition of a convex polygon, with vertex and edge classification.

Every cell is built by clipping the environment against bisector half-planes.
Cell edges carry labels, :class:`Gen` for a bisector with another generator and
:class:`Side` for a piece of the environment boundary, and those labels drive
the vertex/edge taxonomy used by the gradient formulas:

* vertex kinds: :class:`VertexA` (three generators), :class:`VertexB`
  (environment side plus two generators), :class:`VertexC` (environment corner);
* edge kinds: :class:`EdgeA` (bisector), :class:`EdgeB` (environment boundary).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .geometry import ConvexPolygon, HalfPlane, Segment, Tolerances, as_points, clip_halfplane


class CoincidentGeneratorsError(ValueError):
    """Two generators closer than the geometric tolerance."""


class PointOutsideError(ValueError):
    """A generator lies outside the environment."""


@dataclass(frozen=True)
class Gen:
    index: int


@dataclass(frozen=True)
class Side:
    index: int


Element = Union[Gen, Side]


@dataclass(frozen=True)
class VertexA:
    i: int
    j: int
    k: int


@dataclass(frozen=True)
class VertexB:
    side: int
    i: int
    j: int


@dataclass(frozen=True)
class VertexC:
    side1: int
    side2: int
    i: int


@dataclass(frozen=True)
class EdgeA:
    i: int
    j: int


@dataclass(frozen=True)
class EdgeB:
    i: int
    side: int


@dataclass(frozen=True)
class VertexRecord:
    position: np.ndarray
    kind: Union[VertexA, VertexB, VertexC]
    defining_elements: tuple
    degenerate: bool

    @property
    def defining_generators(self) -> tuple[int, ...]:
        return tuple(el.index for el in self.defining_elements if isinstance(el, Gen))

    @property
    def defining_sides(self) -> tuple[int, ...]:
        return tuple(el.index for el in self.defining_elements if isinstance(el, Side))


@dataclass(frozen=True)
class EdgeRecord:
    segment: Segment
    kind: Union[EdgeA, EdgeB]
    inward_normal: np.ndarray


@dataclass(frozen=True, eq=False)
class VoronoiPartition:
    environment: ConvexPolygon
    points: np.ndarray
    cells: tuple
    vertex_records: tuple
    edge_records: tuple
    neighbor_sets: tuple
    tol: Tolerances

    @property
    def n(self) -> int:
        return len(self.points)

    def neighbors(self, i: int) -> frozenset:
        return self.neighbor_sets[i]


def check_configuration(Q: ConvexPolygon, points, tol: Tolerances | None = None) -> np.ndarray:
    """Validate generator positions and return them as an ``(n, 2)`` array."""
    P = as_points(points)
    tol = Q.tolerances() if tol is None else tol
    if len(P) == 0:
        raise ValueError("configuration must contain at least one generator")
    inside = Q.contains_many(P, eps=tol.geo)
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise PointOutsideError(f"generator {bad} at {tuple(P[bad])} lies outside the environment")
    if len(P) > 1:
        d = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
        d[np.diag_indices(len(P))] = np.inf
        if d.min() < tol.geo:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            raise CoincidentGeneratorsError(f"generators {min(i, j)} and {max(i, j)} coincide")
    return P


def voronoi_cell(Q: ConvexPolygon, P: np.ndarray, i: int, tol: Tolerances) -> ConvexPolygon:
    """Cell of generator ``i``: ``Q`` clipped by every bisector half-plane."""
    base = ConvexPolygon(Q.vertices, tuple(Side(k) for k in range(len(Q))))
    p = P[i]
    d = np.linalg.norm(P - p, axis=1)
    order = np.argsort(d, kind="stable")
    cell = base
    reach = np.linalg.norm(cell.vertices - p, axis=1).max()
    for j in order:
        if j == i:
            continue
        # bisectors farther than the current cell radius cannot cut the cell
        if 0.5 * d[j] > reach + tol.geo:
            break
        clipped = clip_halfplane(cell, HalfPlane.bisector(p, P[j], label=Gen(int(j))), eps=tol.geo)
        if clipped is None:
            raise CoincidentGeneratorsError(f"cell {i} vanished while clipping against generator {j}")
        if clipped is not cell:
            cell = clipped
            reach = np.linalg.norm(cell.vertices - p, axis=1).max()
    return cell


def _segment_distances(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``x`` (k, 2) to segments ``a[m]-b[m]``; shape (k, m)."""
    d = b - a
    rel = x[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("kmj,mj->km", rel, d) / np.einsum("mj,mj->m", d, d), 0.0, 1.0)
    foot = a[None, :, :] + t[:, :, None] * d[None, :, :]
    return np.linalg.norm(x[:, None, :] - foot, axis=2)


def _classify_vertex(i: int, incoming, outgoing):
    if isinstance(incoming, Side) and isinstance(outgoing, Side):
        return VertexC(incoming.index, outgoing.index, i)
    if isinstance(incoming, Side) or isinstance(outgoing, Side):
        side = incoming if isinstance(incoming, Side) else outgoing
        other = outgoing if isinstance(incoming, Side) else incoming
        return VertexB(side.index, i, other.index)
    return VertexA(i, incoming.index, outgoing.index)


def compute_partition(Q: ConvexPolygon, points, tol: Tolerances | None = None) -> VoronoiPartition:
    """Bounded Voronoi partition of ``Q`` generated by ``points``."""
    tol = Q.tolerances() if tol is None else tol
    P = check_configuration(Q, points, tol)
    n = len(P)
    q_start = Q.vertices
    q_end = np.roll(Q.vertices, -1, axis=0)
    q_normals = Q.inward_normals()
    cells, vrecs, erecs = [], [], []
    adjacency: list[set] = [set() for _ in range(n)]
    for i in range(n):
        cell = voronoi_cell(Q, P, i, tol)
        cells.append(cell)
        verts = cell.vertices
        labels = cell.edge_labels
        gen_d = np.linalg.norm(verts[:, None, :] - P[None, :, :], axis=2)
        own = gen_d[:, i:i + 1]
        gen_hit = np.abs(gen_d - own) <= tol.geo
        side_hit = _segment_distances(verts, q_start, q_end) <= tol.geo
        records = []
        for k in range(len(verts)):
            kind = _classify_vertex(i, labels[k - 1], labels[k])
            elements = tuple(Gen(int(j)) for j in np.flatnonzero(gen_hit[k])) + tuple(
                Side(int(e)) for e in np.flatnonzero(side_hit[k]))
            records.append(VertexRecord(verts[k], kind, elements, len(elements) > 3))
        vrecs.append(tuple(records))
        edges = []
        nxt = np.roll(verts, -1, axis=0)
        for k, lab in enumerate(labels):
            seg = Segment(verts[k], nxt[k])
            if isinstance(lab, Gen):
                normal = P[i] - P[lab.index]
                normal = normal / np.linalg.norm(normal)
                edges.append(EdgeRecord(seg, EdgeA(i, lab.index), normal))
                if seg.length > tol.geo:
                    adjacency[i].add(lab.index)
            else:
                edges.append(EdgeRecord(seg, EdgeB(i, lab.index), q_normals[lab.index].copy()))
        erecs.append(tuple(edges))
    for i in range(n):
        for j in adjacency[i]:
            adjacency[j].add(i)
    return VoronoiPartition(Q, P, tuple(cells), tuple(vrecs), tuple(erecs),
                            tuple(frozenset(s) for s in adjacency), tol)


def neighbors(partition: VoronoiPartition, i: int) -> frozenset:
    return partition.neighbor_sets[i]


def nearest_generator_labels(points: np.ndarray, generators: np.ndarray) -> np.ndarray:
    """Index of the nearest generator for each query point (ties to the lowest index)."""
    d = ((points[:, None, :] - generators[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d, axis=1)
