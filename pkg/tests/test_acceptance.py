"""Acceptance gate: one recorded PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section of the terminal summary.
"""
import time

import numpy as np
import pytest

from conftest import random_points, random_polygon, round_polygon
from multicenter.centers import circumcenter, incenter_set
from multicenter.flows import FlowKind, FlowSpec, integrate, velocity
from multicenter.geometry import HullPosition, distance_to_segment, point_in_polygon_grid, zero_in_hull
from multicenter.nonsmooth import (
    grad_F,
    grad_G,
    grad_lg,
    grad_sm,
    lam,
    lam_from_construction,
    least_norm,
    min_norm_point,
    mu,
    mu_from_construction,
)
from multicenter.objective import edge_clearances, evaluate_F, evaluate_G, evaluate_HDC, evaluate_HSP
from multicenter.runner import run
from multicenter.scenario import Scenario, load_bundled
from multicenter.voronoi import compute_partition
from oracles import (
    central_difference,
    enclosing_circle_by_enumeration,
    exact_min_norm_by_enumeration,
    grid_membership_mismatches,
    simplex_grid_min_norm,
)

OCTAGON_FLOWS = ["lloydcc", "lloydic", "graddc", "gradsp", "distgraddc", "distgradsp"]


# -- lambda and mu

def _lambda_mu_instances(rng, count):
    lines = rng.normal(size=(count, 3))
    pairs = rng.normal(size=(count, 2, 2))
    trios = rng.normal(size=(count, 3, 2))
    return lines, pairs, trios


def test_criterion_01_lambda_mu_identities(criterion):
    lines, pairs, trios = _lambda_mu_instances(np.random.default_rng(1), 1000)
    start = time.perf_counter()
    worst = 0.0
    for line, (pi, pj), (a, b, c) in zip(lines, pairs, trios):
        worst = max(worst,
                    abs(lam(line, pi, pj) + lam(line, pj, pi) - 1),
                    abs(mu(a, b, c) + mu(b, c, a) + mu(c, a, b) - 1),
                    abs(mu(a, b, c) - mu(a, c, b)))
    elapsed = time.perf_counter() - start
    criterion(1, worst < 1e-9 and elapsed < 1.0,
              f"1000 instances, max identity error {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_closed_forms_match_construction(criterion):
    lines, pairs, trios = _lambda_mu_instances(np.random.default_rng(2), 1000)
    worst = 0.0
    for line, (pi, pj), (a, b, c) in zip(lines, pairs, trios):
        for closed, built in ((lam(line, pi, pj), lam_from_construction(line, pi, pj)),
                              (mu(a, b, c), mu_from_construction(a, b, c))):
            worst = max(worst, abs(closed - built) / max(abs(closed), abs(built)))
    criterion(2, worst < 1e-8, f"1000 lambda + 1000 mu instances, max relative error {worst:.2e}")


# -- center solvers

def test_criterion_03_center_solvers(criterion):
    rng = np.random.default_rng(3)
    cc_err, ir_low, ir_high = 0.0, 0.0, 0.0
    for _ in range(100):
        W = random_polygon(rng, max_vertices=10)
        center, radius = enclosing_circle_by_enumeration(W.vertices)
        for c in (circumcenter(W), circumcenter(W, method="welzl")):
            cc_err = max(cc_err, np.linalg.norm(c.center - center), abs(c.radius - radius))
        ir = incenter_set(W).inradius
        pts, h = point_in_polygon_grid(W, 300)
        best = W.signed_edge_distances(pts).min(axis=0).max()
        # grid best can only undershoot, and by at most two grid cells
        ir_high = max(ir_high, best - ir)
        ir_low = max(ir_low, (ir - best) / h)
    ok = cc_err <= 1e-9 and ir_high <= 1e-12 and ir_low <= 2
    criterion(3, ok, f"100 polygons, circumcircle (default and Welzl) vs enumeration {cc_err:.1e}, "
                     f"grid inradius overshoot {ir_high:.1e}, undershoot {ir_low:.2f} cells")


# -- Voronoi partition

def test_criterion_04_voronoi_grid_oracle(criterion):
    rng = np.random.default_rng(4)
    bad_total, checked_total, area_err = 0, 0, 0.0
    for k in range(50):
        Q = random_polygon(rng)
        n = 2 + k % 7
        P = random_points(rng, Q, n)
        part = compute_partition(Q, P)
        bad, checked = grid_membership_mismatches(Q, P, part, grid=300, band_cells=2)
        bad_total += bad
        checked_total += checked
        area_err = max(area_err, abs(sum(c.area for c in part.cells) - Q.area) / Q.area)
    criterion(4, bad_total == 0 and area_err <= 1e-9,
              f"50 configurations, {bad_total} mismatches of {checked_total} grid points, "
              f"relative area error {area_err:.1e}")


# -- objectives

def test_criterion_05_lipschitz(criterion, octagon):
    rng = np.random.default_rng(5)
    Q = octagon
    worst = -np.inf
    for k in range(1000):
        P = random_points(rng, Q, 5)
        if k % 2:
            P2 = random_points(rng, Q, 5)
        else:
            P2 = np.array([Q.project(p) for p in P + rng.normal(scale=10 ** rng.uniform(-5, -1), size=P.shape)])
        step = np.linalg.norm(P - P2)
        for ev in (evaluate_HDC, evaluate_HSP):
            worst = max(worst, abs(ev(Q, P)[0] - ev(Q, P2)[0]) - step)
    criterion(5, worst <= 1e-12, f"1000 pairs, max |dH| - |dP| = {worst:.3e}")


def _unique_gap(values):
    s = np.sort(values)
    return np.inf if len(s) == 1 else s[-1] - s[-2]


def test_criterion_06_gradients_vs_finite_differences(criterion):
    rng = np.random.default_rng(6)
    worst = {"G": 0.0, "F": 0.0}
    done = {"G": 0, "F": 0}
    while min(done.values()) < 200:
        Q = random_polygon(rng)
        n = int(rng.integers(2, 7))
        P = random_points(rng, Q, n, min_sep=0.05)
        part = compute_partition(Q, P)
        i = int(rng.integers(n))
        h = 1e-6 * Q.diameter
        margin = 1e-3 * Q.diameter
        if done["G"] < 200:
            d = np.linalg.norm(part.cells[i].vertices - P[i], axis=1)
            rec = part.vertex_records[i][int(np.argmax(d))]
            if _unique_gap(d) > margin and not rec.degenerate:
                g = grad_G(part, i).candidates
                fd = central_difference(lambda x: evaluate_G(compute_partition(Q, x.reshape(-1, 2)), i), P, h)
                worst["G"] = max(worst["G"], np.linalg.norm(g[0] - fd) / np.linalg.norm(fd)) if len(g) == 1 else np.inf
                done["G"] += 1
        if done["F"] < 200:
            c = edge_clearances(part, i)
            if _unique_gap(-c) > margin:
                g = grad_F(part, i).candidates
                fd = central_difference(lambda x: evaluate_F(compute_partition(Q, x.reshape(-1, 2)), i), P, h)
                worst["F"] = max(worst["F"], np.linalg.norm(g[0] - fd) / np.linalg.norm(fd)) if len(g) == 1 else np.inf
                done["F"] += 1
    criterion(6, max(worst.values()) < 1e-4,
              f"200 configurations each, max relative error G {worst['G']:.1e}, F {worst['F']:.1e}")


# -- least-norm element

def _candidate_sets(seed, count=100):
    rng = np.random.default_rng(seed)
    return [rng.normal(size=(int(rng.integers(1, 9)), int(rng.integers(2, 11)))) for _ in range(count)]


def test_criterion_07_min_norm_vs_simplex_grid(criterion):
    worst = 0.0
    for X in _candidate_sets(7):
        worst = max(worst, np.linalg.norm(min_norm_point(X)[0] - simplex_grid_min_norm(X, 50)))
    criterion(7, worst < 1e-3, f"100 candidate sets, max distance to 1/50 simplex-grid point {worst:.2e}",
              known_gap="a 1/50 weight grid cannot resolve the minimizer to 1e-3; see the exact-oracle check")


def test_criterion_07_companion_exact_oracle():
    # the same sets against an exact support enumeration, and the grid point is never better
    for X in _candidate_sets(7):
        x = min_norm_point(X)[0]
        assert np.linalg.norm(x - exact_min_norm_by_enumeration(X)) < 1e-9
        assert np.linalg.norm(x) <= np.linalg.norm(simplex_grid_min_norm(X, 50)) + 1e-12


# -- one-center inequalities

def test_criterion_08_one_center_inequalities(criterion):
    rng = np.random.default_rng(8)
    slack = np.inf
    strict_ok = True
    for _ in range(1000):
        Q = random_polygon(rng)
        q = random_points(rng, Q, 1)[0]
        cc, ic = circumcenter(Q).center, incenter_set(Q)
        v = Q.vertices[int(np.argmax(np.linalg.norm(Q.vertices - q, axis=1)))]
        dist = Q.edge_distances(q)
        e = int(np.argmin(dist))
        n_e = Q.inward_normals()[e]
        ln_lg = least_norm(grad_lg(Q, q)).least_norm_vector
        ln_sm = least_norm(grad_sm(Q, q)).least_norm_vector
        ends = (ic.segment.start, ic.segment.end)
        values = [
            ln_lg @ (q - v),
            (q - cc) @ (q - v) - np.linalg.norm(q - cc) ** 2 / 2,
            ln_sm @ n_e,
            min((x - q) @ n_e for x in ends) - (ic.inradius - dist[e]),
        ]
        slack = min(slack, *values)
        if np.linalg.norm(q - cc) > 1e-6:
            strict_ok &= bool(values[0] > 0)
        if distance_to_segment(q, ic.segment) > 1e-6:
            strict_ok &= bool(values[2] > 0 and ic.inradius - dist[e] > 0)
    criterion(8, slack >= -1e-10 and strict_ok,
              f"1000 samples, min slack {slack:.2e}, strict cases {'hold' if strict_ok else 'violated'}")


# -- one-center flows

def _finite_time_polygons(rng, count):
    while count:
        Q = round_polygon(rng)
        cc, ic = circumcenter(Q).center, incenter_set(Q)
        if zero_in_hull(grad_lg(Q, cc).candidates) is not HullPosition.INTERIOR:
            continue
        if ic.segment.length > 0 or zero_in_hull(grad_sm(Q, ic.segment.start).candidates) is not HullPosition.INTERIOR:
            continue
        count -= 1
        yield Q, cc, ic, random_points(rng, Q, 1)


def test_criterion_09_one_center_finite_time(criterion):
    start = time.perf_counter()
    misses = []
    for k, (Q, cc, ic, p0) in enumerate(_finite_time_polygons(np.random.default_rng(0), 20)):
        dc = integrate(FlowSpec(FlowKind.DIST_GRAD_DC, dt=0.005, t_max=5.0, stop_tol=1e-9), Q, p0)
        sp = integrate(FlowSpec(FlowKind.DIST_GRAD_SP, dt=0.005, t_max=5.0, stop_tol=1e-9), Q, p0)
        d_dc = np.linalg.norm(dc.final[0] - cc)
        d_sp = distance_to_segment(sp.final[0], ic.segment)
        if d_dc >= 1e-3:
            misses.append(f"polygon {k} DC {d_dc:.2e}")
        if d_sp >= 1e-3:
            misses.append(f"polygon {k} SP {d_sp:.2e}")
    elapsed = time.perf_counter() - start
    detail = f"20 polygons, {elapsed:.1f} s, misses: {', '.join(misses) or 'none'}"
    criterion(9, not misses and elapsed < 10, detail,
              known_gap="nearly parallel active edges make the sliding speed small, so some starts need t > 5")


# -- eight-vertex polygon runs

@pytest.fixture(scope="module")
def octagon_runs(tmp_path_factory):
    out = {}
    for name in OCTAGON_FLOWS:
        sc = load_bundled(f"paper_polygon_16_{name}")
        start = time.perf_counter()
        res = run(sc, tmp_path_factory.mktemp(name))
        out[name] = (res, time.perf_counter() - start)
    return out


def test_criterion_10a_monotone_within_time(octagon_runs):
    for name, (res, elapsed) in octagon_runs.items():
        s = res.summary
        assert s["terminated_by"] == "t_max" and s["final_time"] == pytest.approx(20.0)
        assert s["monotonicity_violation_fraction"] <= 1e-3, name
        assert elapsed < 60, name


def test_criterion_10_multicenter_convergence(criterion, octagon_runs):
    parts, ok = [], True
    for name, (res, elapsed) in octagon_runs.items():
        s = res.summary
        centered = sum(s["centered"].values())
        mono = s["monotonicity_violation_fraction"] <= 1e-3
        ok &= mono and s["all_active_centered"] and elapsed < 60
        parts.append(f"{name}: {s['monotonicity_violations']} violations, "
                     f"{centered}/{len(s['centered'])} active centered, {elapsed:.0f} s")
    criterion(10, ok, "; ".join(parts),
              known_gap="the centralized gradient flows are still moving at t = 20 with seed 0")


def test_criterion_11_equilibria(criterion, unit_square):
    two = np.array([(0.25, 0.5), (0.75, 0.5)])
    eps = unit_square.tolerances().crit
    worst = 0.0
    for kind in (FlowKind.LLOYD_CC, FlowKind.DIST_GRAD_DC, FlowKind.LLOYD_IC, FlowKind.DIST_GRAD_SP):
        worst = max(worst, np.abs(velocity(kind, unit_square, two)).max())
        traj = integrate(FlowSpec(kind, dt=0.01, t_max=0.5), unit_square, two)
        worst = max(worst, np.abs(traj.configs - two).max())
    criterion(11, worst <= eps, f"symmetric square, max speed or drift {worst:.1e} (limit {eps:.1e})")


def test_criterion_12_determinism(criterion, octagon_runs, tmp_path):
    same = []
    for name, (res, _) in octagon_runs.items():
        again = run(res.scenario, tmp_path / name)
        first = (res.files[0].parent / "trajectory.csv").read_bytes()
        same.append(first == (tmp_path / name / "trajectory.csv").read_bytes())
    criterion(12, all(same), f"{sum(same)}/{len(same)} bundled seeded scenarios byte-identical on rerun")


def test_criterion_13_sanity_bands(criterion, octagon_runs):
    values = {"lloydcc": [octagon_runs["lloydcc"][0].summary["H_DC"]],
              "lloydic": [octagon_runs["lloydic"][0].summary["H_SP"]]}
    for name, key in (("lloydcc", "H_DC"), ("lloydic", "H_SP")):
        base = load_bundled(f"paper_polygon_16_{name}")
        for seed in (1, 2):
            sc = Scenario(base.polygon, base.n, type(base.init)(random_seed=seed), base.flow, base.outputs)
            traj = integrate(sc.flow, sc.environment, sc.initial_configuration())
            values[name].append(float(traj.h_dc[-1] if key == "H_DC" else traj.h_sp[-1]))
    ok = all(0.35 <= v <= 0.55 for v in values["lloydcc"]) and all(0.18 <= v <= 0.32 for v in values["lloydic"])
    fmt = lambda vs: ", ".join(f"{v:.4f}" for v in vs)
    criterion(13, ok, f"seeds 0-2, LloydCC H_DC {fmt(values['lloydcc'])}; LloydIC H_SP {fmt(values['lloydic'])}")
