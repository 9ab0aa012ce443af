"""Planar primitives: convex polygons, half-planes, projections and hulls.

Points are plain ``numpy`` arrays of shape ``(2,)``; point lists are ``(k, 2)``
arrays.  All coincidence tests take an explicit tolerance; the default used by
the rest of the package is ``1e-9 * diameter`` of the environment polygon
(see :class:`Tolerances`).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

GEO_REL = 1e-9
ACT_REL = 1e-7
CRIT_REL = 1e-6


class InvalidPolygonError(ValueError):
    """Raised when a vertex chain is not a valid convex polygon."""


@dataclass(frozen=True)
class Tolerances:
    """Scale-aware tolerances derived from the environment diameter."""

    geo: float
    act: float
    crit: float

    @classmethod
    def for_diameter(cls, diameter: float) -> "Tolerances":
        return cls(GEO_REL * diameter, ACT_REL * diameter, CRIT_REL * diameter)


def as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected points of shape (k, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


def unit(v: np.ndarray) -> np.ndarray:
    norm = math.hypot(v[0], v[1]) if v.shape == (2,) else float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("unit vector of the zero vector is undefined")
    return v / norm


def cross2(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class HalfPlane:
    """The closed half-plane ``a*x + b*y + c >= 0`` with ``a**2 + b**2 == 1``.

    ``label`` is carried along by :func:`clip_halfplane` so that every edge of
    a clipped polygon remembers which constraint produced it.
    """

    a: float
    b: float
    c: float
    label: Hashable = None

    def __post_init__(self):
        norm = math.hypot(self.a, self.b)
        if norm == 0.0:
            raise ValueError("half-plane normal must be nonzero")
        if abs(norm - 1.0) > 1e-15:
            object.__setattr__(self, "a", self.a / norm)
            object.__setattr__(self, "b", self.b / norm)
            object.__setattr__(self, "c", self.c / norm)

    @classmethod
    def through(cls, point, inward_normal, label=None) -> "HalfPlane":
        n = unit(np.asarray(inward_normal, dtype=float))
        p = np.asarray(point, dtype=float)
        return cls(float(n[0]), float(n[1]), float(-(n @ p)), label)

    @classmethod
    def bisector(cls, p_i, p_j, label=None) -> "HalfPlane":
        """Points at least as close to ``p_i`` as to ``p_j``."""
        p_i = np.asarray(p_i, dtype=float)
        p_j = np.asarray(p_j, dtype=float)
        return cls.through(0.5 * (p_i + p_j), p_i - p_j, label)

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b])

    def signed_distance(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.normal + self.c


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.start + self.end)

    def is_point(self, eps: float = 0.0) -> bool:
        return self.length <= eps


def project_onto_segment(p, s: Segment) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    d = s.end - s.start
    dd = float(d @ d)
    if dd == 0.0:
        return s.start.copy()
    t = min(1.0, max(0.0, float((p - s.start) @ d) / dd))
    return s.start + t * d


def distance_to_segment(p, s: Segment) -> float:
    p = np.asarray(p, dtype=float)
    return float(np.linalg.norm(p - project_onto_segment(p, s)))


def _lexmin_rotation(vertices: np.ndarray) -> np.ndarray:
    order = np.lexsort((vertices[:, 1], vertices[:, 0]))
    return np.roll(vertices, -int(order[0]), axis=0)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counterclockwise convex vertex chain, lexicographically smallest vertex first.

    Use :meth:`from_points` for untrusted input; it validates convexity and
    canonicalizes orientation.  The raw constructor trusts its input and is
    what the clipping code uses internally.
    """

    vertices: np.ndarray
    edge_labels: tuple = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if self.edge_labels is None:
            object.__setattr__(self, "edge_labels", tuple(range(len(v))))

    @classmethod
    def from_points(cls, points, eps: float | None = None) -> "ConvexPolygon":
        v = as_points(points)
        if len(v) < 3:
            raise InvalidPolygonError(f"a polygon needs at least 3 vertices, got {len(v)}")
        diam = _diameter(v)
        if diam == 0.0:
            raise InvalidPolygonError("all vertices coincide")
        eps = GEO_REL * diam if eps is None else eps
        nxt = np.roll(v, -1, axis=0)
        if np.any(np.linalg.norm(nxt - v, axis=1) <= eps):
            raise InvalidPolygonError("duplicate consecutive vertices")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        k = len(v)
        for idx in range(k):
            a, b, c = v[idx - 1], v[idx], v[(idx + 1) % k]
            # distance of b beyond the chord a-c; must be a strict left turn
            turn = cross2(b - a, c - b) / np.linalg.norm(c - a)
            if turn <= eps:
                raise InvalidPolygonError(
                    f"vertex {idx} at {tuple(b)} is reflex or collinear (turn {turn:.3g})")
        # a simple convex chain winds exactly once
        angles = np.arctan2(*(np.roll(v, -1, axis=0) - v)[:, ::-1].T)
        winding = np.sum(np.mod(np.diff(np.append(angles, angles[0])), 2 * np.pi))
        if abs(winding - 2 * np.pi) > 1e-6:
            raise InvalidPolygonError("vertex chain is self-intersecting")
        return cls(_lexmin_rotation(v))

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices))

    __hash__ = object.__hash__

    def almost_equal(self, other: "ConvexPolygon", eps: float) -> bool:
        """Vertex-set equality within ``eps`` (independent of starting vertex)."""
        if len(self) != len(other):
            return False
        d = np.linalg.norm(self.vertices[:, None, :] - other.vertices[None, :, :], axis=2)
        return bool(np.all(d.min(axis=1) <= eps) and np.all(d.min(axis=0) <= eps))

    @property
    def edges(self) -> list[Segment]:
        nxt = np.roll(self.vertices, -1, axis=0)
        return [Segment(a, b) for a, b in zip(self.vertices, nxt)]

    def inward_normals(self) -> np.ndarray:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        n = np.column_stack([-d[:, 1], d[:, 0]])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def halfplanes(self) -> list[HalfPlane]:
        normals = self.inward_normals()
        return [HalfPlane.through(v, n, label=lab)
                for v, n, lab in zip(self.vertices, normals, self.edge_labels)]

    def edge_distances(self, p) -> np.ndarray:
        """Distance from ``p`` to each edge segment."""
        p = np.asarray(p, dtype=float)
        a = self.vertices
        d = np.roll(a, -1, axis=0) - a
        t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        foot = a + t[:, None] * d
        return np.linalg.norm(p - foot, axis=1)

    def signed_edge_distances(self, points) -> np.ndarray:
        """Signed distance to each edge's supporting line, positive inside; shape (k, m)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        normals = self.inward_normals()
        return (pts @ normals.T - np.einsum("ij,ij->i", self.vertices, normals)).T

    def contains(self, p, eps: float = 0.0) -> bool:
        return bool(np.all(self.signed_edge_distances(p) >= -eps))

    def contains_many(self, points, eps: float = 0.0) -> np.ndarray:
        return np.all(self.signed_edge_distances(points) >= -eps, axis=0)

    @property
    def area(self) -> float:
        return abs(_signed_area(self.vertices))

    @property
    def diameter(self) -> float:
        return _diameter(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        cr = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
        a = cr.sum() / 2.0
        return np.array([((v[:, 0] + nxt[:, 0]) * cr).sum(), ((v[:, 1] + nxt[:, 1]) * cr).sum()]) / (6 * a)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def tolerances(self) -> Tolerances:
        return Tolerances.for_diameter(self.diameter)

    def project(self, p) -> np.ndarray:
        """Nearest point of the polygon to ``p``."""
        p = np.asarray(p, dtype=float)
        if self.contains(p):
            return p.copy()
        best, best_d = None, math.inf
        for s in self.edges:
            q = project_onto_segment(p, s)
            d = float(np.linalg.norm(p - q))
            if d < best_d:
                best, best_d = q, d
        return best


def _signed_area(v: np.ndarray) -> float:
    nxt = np.roll(v, -1, axis=0)
    return 0.5 * float(np.sum(v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]))


def _diameter(v: np.ndarray) -> float:
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d ** 2).sum(axis=2).max()))


def clip_halfplane(poly: ConvexPolygon, h: HalfPlane, eps: float = 0.0) -> ConvexPolygon | None:
    """Intersect ``poly`` with ``h``; ``None`` when the result has empty interior.

    Vertices within ``eps`` of the clipping line count as inside.  Edge labels
    are propagated: surviving edges keep theirs, the new edge along the
    clipping line gets ``h.label``.
    """
    s = poly.vertices @ h.normal + h.c
    if s.min() >= -eps:
        return poly
    if s.max() <= eps:
        return None
    # plain floats: polygons here have a handful of vertices, where numpy
    # per-call overhead dominates
    v = poly.vertices.tolist()
    s = s.tolist()
    labels = poly.edge_labels
    k = len(v)
    out_v: list = []
    out_l: list = []
    for idx in range(k):
        jdx = idx + 1 if idx + 1 < k else 0
        sa, sb = s[idx], s[jdx]
        a_in, b_in = sa >= -eps, sb >= -eps
        if a_in:
            if b_in:
                out_v.append(v[idx]); out_l.append(labels[idx])
            elif sa <= eps:
                out_v.append(v[idx]); out_l.append(h.label)
            else:
                t = sa / (sa - sb)
                xa, ya = v[idx]
                xb, yb = v[jdx]
                out_v.append(v[idx]); out_l.append(labels[idx])
                out_v.append([xa + t * (xb - xa), ya + t * (yb - ya)]); out_l.append(h.label)
        elif b_in and sb > eps:
            t = sa / (sa - sb)
            xa, ya = v[idx]
            xb, yb = v[jdx]
            out_v.append([xa + t * (xb - xa), ya + t * (yb - ya)]); out_l.append(labels[idx])
    return _finish_clip(out_v, out_l, eps)


def _close(p, q, eps) -> bool:
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= eps


def _finish_clip(out_v, out_l, eps) -> ConvexPolygon | None:
    # merge coincident consecutive vertices; the merged vertex keeps the
    # incoming edge of the first and the outgoing edge of the second
    merged_v: list = []
    merged_l: list = []
    for p, lab in zip(out_v, out_l):
        if merged_v and _close(p, merged_v[-1], eps):
            merged_l[-1] = lab
            continue
        merged_v.append(p); merged_l.append(lab)
    while len(merged_v) > 1 and _close(merged_v[0], merged_v[-1], eps):
        merged_v.pop(); merged_l.pop()
    # drop vertices whose incoming and outgoing edges lie on the same line
    changed = True
    while changed and len(merged_v) >= 3:
        changed = False
        for idx in range(len(merged_v)):
            if merged_l[idx - 1] == merged_l[idx]:
                del merged_v[idx]; del merged_l[idx]
                changed = True
                break
    m = len(merged_v)
    if m < 3:
        return None
    area2 = 0.0
    for idx in range(m):
        x0, y0 = merged_v[idx - 1]
        x1, y1 = merged_v[idx]
        area2 += x0 * y1 - x1 * y0
    xs = [p[0] for p in merged_v]
    ys = [p[1] for p in merged_v]
    diam = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    if abs(0.5 * area2) <= eps * diam:
        return None
    shift = min(range(m), key=lambda idx: (merged_v[idx][0], merged_v[idx][1]))
    arr = np.array(merged_v[shift:] + merged_v[:shift])
    labs = tuple(merged_l[shift:] + merged_l[:shift])
    return ConvexPolygon(arr, labs)


def convex_hull2(points, eps: float = 0.0) -> np.ndarray:
    """Extreme points of ``co(points)`` in counterclockwise order.

    Collinear and duplicate points (within ``eps``) are dropped; the result
    may have 1 or 2 points when the hull is degenerate.
    """
    pts = as_points(points)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    uniq = [pts[0]]
    for p in pts[1:]:
        if np.linalg.norm(p - uniq[-1]) > eps:
            uniq.append(p)
    if len(uniq) <= 2:
        return np.array(uniq)

    def half(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2:
                a, b = chain[-2], chain[-1]
                base = np.linalg.norm(p - a)
                if cross2(b - a, p - a) > eps * max(base, 1.0):
                    break
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(uniq[::-1])
    hull = lower[:-1] + upper[:-1]
    return np.array(hull)


class HullPosition(enum.Enum):
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    INTERIOR = "interior"
    # zero lies in the hull; interior vs boundary not determined (high dimension)
    CONTAINED = "contained"


def zero_in_hull(vectors, eps: float = 1e-9) -> HullPosition:
    """Where the origin sits relative to the convex hull of 2-vectors."""
    pts = as_points(vectors)
    hull = convex_hull2(pts, eps=eps * 1e-3)
    if len(hull) == 1:
        return HullPosition.BOUNDARY if np.linalg.norm(hull[0]) <= eps else HullPosition.OUTSIDE
    if len(hull) == 2:
        d = distance_to_segment(np.zeros(2), Segment(hull[0], hull[1]))
        return HullPosition.BOUNDARY if d <= eps else HullPosition.OUTSIDE
    nxt = np.roll(hull, -1, axis=0)
    edge = nxt - hull
    # signed distance of the origin to each edge line, positive inside
    sd = (edge[:, 0] * (-hull[:, 1]) - edge[:, 1] * (-hull[:, 0])) / np.linalg.norm(edge, axis=1)
    if np.all(sd > eps):
        return HullPosition.INTERIOR
    if np.all(sd >= -eps):
        return HullPosition.BOUNDARY
    return HullPosition.OUTSIDE


def point_in_polygon_grid(poly: ConvexPolygon, n: int) -> tuple[np.ndarray, float]:
    """Points of an ``n x n`` grid over the bounding box that lie inside ``poly``.

    Returns the inside points and the grid spacing (the larger of the two axes).
    """
    lo, hi = poly.bounds
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = poly.contains_many(pts)
    h = float(max((hi[0] - lo[0]) / (n - 1), (hi[1] - lo[1]) / (n - 1)))
    return pts[inside], h


def polygon_from_labels(vertices: Sequence, labels: Sequence) -> ConvexPolygon:
    return ConvexPolygon(np.asarray(vertices, dtype=float), tuple(labels))
