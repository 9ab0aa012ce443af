import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import random_points, random_polygon
from multicenter.centers import circumcenter, incenter_set
from multicenter.geometry import ConvexPolygon, HullPosition, distance_to_segment
from multicenter.nonsmooth import (
    DegenerateConstructionError,
    GradientSet,
    Problem,
    classify_critical,
    grad_F,
    grad_G,
    grad_HDC,
    grad_HSP,
    grad_lg,
    grad_sm,
    lam,
    lam_from_construction,
    least_norm,
    min_norm_point,
    min_norm_point_2d,
    mu,
    mu_from_construction,
)
from multicenter.objective import edge_clearances, evaluate_F, evaluate_G, hdc_from_partition, lg, sm
from multicenter.voronoi import VertexA, VertexB, VertexC, compute_partition
from oracles import central_difference, exact_min_norm_by_enumeration, simplex_grid_min_norm

seeds = st.integers(0, 2**32 - 1)
TWO = [(0.25, 0.5), (0.75, 0.5)]


def gs(vectors):
    X = np.asarray(vectors, dtype=float)
    return GradientSet(X.shape[1], X, tuple(range(len(X))))


# -- 1-center gradients

def test_grad_lg_examples(unit_square):
    g = grad_lg(unit_square, (0.5, 0.5))
    assert len(g.candidates) == 4
    assert least_norm(g).contains_zero is HullPosition.INTERIOR
    g = grad_lg(unit_square, (0.25, 0.5))
    assert np.allclose(sorted(map(tuple, g.candidates)), [(-0.83205, -0.5547), (-0.83205, 0.5547)], atol=1e-5)
    assert np.allclose(least_norm(g).least_norm_vector, (-0.8320503, 0), atol=1e-7)
    g = grad_lg(unit_square, (0.2, 0.3))
    assert np.allclose(g.candidates, [(-0.8, -0.7) / np.hypot(0.8, 0.7)])


def test_grad_sm_examples(unit_square):
    g = grad_sm(unit_square, (0.5, 0.5))
    assert len(g.candidates) == 4 and least_norm(g).contains_zero is HullPosition.INTERIOR
    assert np.allclose(grad_sm(unit_square, (0.1, 0.3)).candidates, [(1, 0)])
    rect = ConvexPolygon.from_points([(0, 0), (2, 0), (2, 1), (0, 1)])
    g = grad_sm(rect, (1, 0.5))
    assert sorted(map(tuple, np.round(g.candidates, 12))) == [(0, -1), (0, 1)]
    assert least_norm(g).contains_zero is HullPosition.BOUNDARY


# -- lambda and mu

def test_lambda_mirror_symmetry():
    assert lam((0, 1, 0), (-1, 1), (1, 1)) == pytest.approx(0.5)
    assert lam((0, 1, 0), (1, 1), (-1, 1)) == pytest.approx(0.5)


def test_lambda_parallel_is_degenerate():
    with pytest.raises(DegenerateConstructionError):
        lam((0, 1, 0), (0, 1), (0, 2))


def test_mu_equilateral():
    a, b, c = (0, 0), (1, 0), (0.5, math.sqrt(3) / 2)
    for trio in ((a, b, c), (b, c, a), (c, a, b)):
        assert mu(*trio) == pytest.approx(1 / 3)
    with pytest.raises(DegenerateConstructionError):
        mu((0, 0), (1, 0), (2, 0))


@given(seeds)
def test_lambda_identities(seed):
    rng = np.random.default_rng(seed)
    line = rng.normal(size=3)
    p_i, p_j = rng.normal(size=(2, 2))
    assert lam(line, p_i, p_j) + lam(line, p_j, p_i) == pytest.approx(1, abs=1e-9)
    assert lam(line, p_i, p_j) == pytest.approx(lam_from_construction(line, p_i, p_j), rel=1e-8, abs=1e-8)


@given(seeds)
def test_mu_identities(seed):
    rng = np.random.default_rng(seed)
    p_i, p_j, p_k = rng.normal(size=(3, 2))
    total = mu(p_i, p_j, p_k) + mu(p_j, p_k, p_i) + mu(p_k, p_i, p_j)
    assert total == pytest.approx(1, abs=1e-9)
    assert mu(p_i, p_j, p_k) == pytest.approx(mu(p_i, p_k, p_j), abs=1e-9)
    assert mu(p_i, p_j, p_k) == pytest.approx(mu_from_construction(p_i, p_j, p_k), rel=1e-8, abs=1e-8)


# -- G_i and F_i gradients

def test_grad_G_two_generator_square(unit_square):
    part = compute_partition(unit_square, TWO)
    g = grad_G(part, 0)
    # all four corners of the left half are equally far from p_0
    kinds = [type(kind) for _, kind in g.provenance]
    assert sorted(k.__name__ for k in kinds) == ["VertexB", "VertexB", "VertexC", "VertexC"]
    for cand, (_, kind) in zip(g.candidates, g.provenance):
        if isinstance(kind, VertexB):
            # lambda = 1/2 at both places by symmetry
            assert np.linalg.norm(cand[0:2]) == pytest.approx(0.5)
            assert np.linalg.norm(cand[2:4]) == pytest.approx(0.5)
        else:
            assert np.linalg.norm(cand[0:2]) == pytest.approx(1.0) and not cand[2:].any()


def test_grad_F_two_generator_square(unit_square):
    part = compute_partition(unit_square, TWO)
    g = grad_F(part, 0)
    expected = sorted([(-0.5, 0, 0.5, 0), (1, 0, 0, 0)])
    assert np.allclose(sorted(map(tuple, g.candidates)), expected)


def test_single_generator_reduces_to_one_center(octagon):
    p = (1.1, 0.7)
    part = compute_partition(octagon, [p])
    assert np.allclose(grad_G(part, 0).candidates, grad_lg(octagon, p).candidates)
    assert np.allclose(grad_F(part, 0).candidates, grad_sm(octagon, p).candidates)
    assert np.allclose(grad_HDC(octagon, [p]).candidates, grad_lg(octagon, p).candidates)
    assert np.allclose(grad_HSP(octagon, [p]).candidates, grad_sm(octagon, p).candidates)


def test_symmetric_square_hdc_least_norm_is_mirror_symmetric(unit_square):
    v = least_norm(grad_HDC(unit_square, TWO)).least_norm_vector
    assert v[0] == pytest.approx(-v[2]) and abs(v[1]) < 1e-12 and abs(v[3]) < 1e-12


def _unique_achiever(values, margin):
    s = np.sort(values)
    return len(s) == 1 or s[-1] - s[-2] > margin


def _G_of(Q, i):
    return lambda x: evaluate_G(compute_partition(Q, x.reshape(-1, 2)), i)


def _F_of(Q, i):
    return lambda x: evaluate_F(compute_partition(Q, x.reshape(-1, 2)), i)


@given(seeds, st.integers(2, 6))
def test_grad_G_matches_finite_differences(seed, n):
    rng = np.random.default_rng(seed)
    Q = random_polygon(rng)
    P = random_points(rng, Q, n, min_sep=0.05)
    part = compute_partition(Q, P)
    i = int(rng.integers(n))
    d = np.linalg.norm(part.cells[i].vertices - P[i], axis=1)
    rec = part.vertex_records[i][int(np.argmax(d))]
    assume(_unique_achiever(d, 1e-3 * Q.diameter) and not rec.degenerate)
    g = grad_G(part, i)
    assert len(g.candidates) == 1
    fd = central_difference(_G_of(Q, i), P, 1e-6 * Q.diameter)
    assert np.linalg.norm(g.candidates[0] - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-12)


@given(seeds, st.integers(2, 6))
def test_grad_F_matches_finite_differences(seed, n):
    rng = np.random.default_rng(seed)
    Q = random_polygon(rng)
    P = random_points(rng, Q, n, min_sep=0.05)
    part = compute_partition(Q, P)
    i = int(rng.integers(n))
    c = edge_clearances(part, i)
    assume(_unique_achiever(-c, 1e-3 * Q.diameter))
    g = grad_F(part, i)
    assert len(g.candidates) == 1
    fd = central_difference(_F_of(Q, i), P, 1e-6 * Q.diameter)
    assert np.linalg.norm(g.candidates[0] - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-12)


def test_degenerate_vertex_candidates(unit_square):
    P = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
    part = compute_partition(unit_square, P)
    g = grad_G(part, 0)
    kinds = [kind for _, kind in g.provenance]
    # the corner (type c) plus the centre vertex split over the pairs of the other three generators
    assert sum(isinstance(k, VertexA) for k in kinds) == 3
    assert all(k.i == 0 for k in kinds if isinstance(k, VertexA))
    assert any(isinstance(k, VertexC) for k in kinds)


@given(seeds, st.integers(2, 8))
def test_active_vertices_have_positive_weights(seed, n):
    rng = np.random.default_rng(seed)
    Q = random_polygon(rng)
    P = random_points(rng, Q, n)
    part = compute_partition(Q, P)
    _, act = hdc_from_partition(part)
    for i, rec in act.vertices:
        if isinstance(rec.kind, VertexC) and not rec.degenerate:
            continue
        gens = rec.defining_generators
        found = False
        if rec.defining_sides:
            lines = [Q.inward_normals()[s] for s in rec.defining_sides]
            for s, nrm in zip(rec.defining_sides, lines):
                line = (nrm[0], nrm[1], -(nrm @ Q.vertices[s]))
                for a in gens:
                    for b in gens:
                        if a < b:
                            try:
                                if lam(line, P[a], P[b]) > 0 and lam(line, P[b], P[a]) > 0:
                                    found = True
                            except DegenerateConstructionError:
                                pass
        else:
            for a in gens:
                for b in gens:
                    for c in gens:
                        if a < b < c:
                            try:
                                if min(mu(P[a], P[b], P[c]), mu(P[b], P[c], P[a]), mu(P[c], P[a], P[b])) > 0:
                                    found = True
                            except DegenerateConstructionError:
                                pass
        if len(gens) >= 2:
            assert found, (rec.kind, rec.defining_elements)


# -- least-norm element

def test_least_norm_examples():
    r = least_norm(gs([(1, 0), (0, 1)]))
    assert np.allclose(r.least_norm_vector, (0.5, 0.5)) and r.least_norm_magnitude == pytest.approx(math.sqrt(0.5))
    r = least_norm(gs([(1, 0), (-1, 0)]))
    assert r.least_norm_magnitude == 0 and r.contains_zero is HullPosition.BOUNDARY
    r = least_norm(gs([(1, 0, 0, 0), (-1, 0, 0, 0)]))
    assert r.contains_zero is HullPosition.CONTAINED


@given(seeds, st.integers(1, 7), st.integers(2, 8))
def test_min_norm_point_matches_exact_enumeration(seed, k, dim):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(k, dim))
    x, w = min_norm_point(X)
    assert np.all(w >= 0) and w.sum() == pytest.approx(1)
    assert np.allclose(w @ X, x)
    assert np.linalg.norm(x - exact_min_norm_by_enumeration(X)) < 1e-9


@given(seeds, st.integers(1, 9))
def test_min_norm_point_2d_matches_wolfe(seed, k):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(k, 2))
    assert np.linalg.norm(min_norm_point_2d(X) - min_norm_point(X)[0]) < 1e-10


def test_min_norm_point_never_worse_than_grid():
    rng = np.random.default_rng(2)
    for _ in range(20):
        X = rng.normal(size=(int(rng.integers(2, 6)), int(rng.integers(2, 7))))
        assert np.linalg.norm(min_norm_point(X)[0]) <= np.linalg.norm(simplex_grid_min_norm(X, 30)) + 1e-12


# -- critical configurations

def test_classify_two_generator_square(unit_square):
    for problem, expected in ((Problem.DC, HullPosition.INTERIOR), (Problem.SP, HullPosition.BOUNDARY)):
        rep = classify_critical(unit_square, TWO, problem)
        assert rep.is_critical
        assert rep.active == (0, 1)
        assert all(rep.centered.values())
        assert set(rep.projection_position.values()) == {expected}


def test_classify_single_generator(octagon):
    cc = circumcenter(octagon).center
    assert classify_critical(octagon, [cc], Problem.DC).is_critical
    rep = classify_critical(octagon, [(1.0, 0.5)], Problem.DC)
    assert not rep.is_critical and rep.criticality.least_norm_magnitude > 0.1
    assert not rep.centered[0]


# -- one-center inequalities

@given(seeds)
def test_one_center_inequalities(seed):
    rng = np.random.default_rng(seed)
    Q = random_polygon(rng)
    q = random_points(rng, Q, 1)[0]
    cc = circumcenter(Q).center
    ic = incenter_set(Q)
    d = np.linalg.norm(Q.vertices - q, axis=1)
    v = Q.vertices[int(np.argmax(d))]
    ln_lg = least_norm(grad_lg(Q, q)).least_norm_vector
    far = np.linalg.norm(q - cc) > 1e-6
    assert ln_lg @ (q - v) >= -1e-10
    if far:
        assert ln_lg @ (q - v) > 0
    assert (q - cc) @ (q - v) >= np.linalg.norm(q - cc) ** 2 / 2 - 1e-10
    dist = Q.edge_distances(q)
    e = int(np.argmin(dist))
    n_e = Q.inward_normals()[e]
    ln_sm = least_norm(grad_sm(Q, q)).least_norm_vector
    outside_ic = distance_to_segment(q, ic.segment) > 1e-6
    assert ln_sm @ n_e >= -1e-10
    if outside_ic:
        assert ln_sm @ n_e > 0
    for t in (0.0, 0.5, 1.0):
        x = ic.segment.start + t * (ic.segment.end - ic.segment.start)
        assert (x - q) @ n_e >= ic.inradius - dist[e] - 1e-10
    assert ic.inradius - dist[e] >= -1e-10
    if outside_ic:
        assert ic.inradius - dist[e] > 0


@given(seeds)
def test_descent_direction_witness(seed):
    rng = np.random.default_rng(seed)
    Q = random_polygon(rng)
    q = random_points(rng, Q, 1)[0]
    ln = least_norm(grad_lg(Q, q)).least_norm_vector
    if np.linalg.norm(ln) < 1e-6:
        return
    f0 = lg(Q, q)

    def ok(t):
        x = q - t * ln
        return Q.contains(x) and lg(Q, x) <= f0 - 0.5 * t * (ln @ ln) + 1e-14

    witness = next((T for T in 0.5 ** np.arange(1, 14) if all(ok(T * 0.5 ** k) for k in range(20))), None)
    assert witness is not None and witness > 1e-4
    assert sm(Q, q) >= 0
