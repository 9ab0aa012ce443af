import numpy as np
import pytest
from hypothesis import settings

from multicenter.geometry import ConvexPolygon, convex_hull2

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

OCTAGON_VERTICES = [(0, 0), (2.5, 0), (3.45, 1.5), (3.5, 1.6), (3.45, 1.7), (2.7, 2.1), (1, 2.4), (0.2, 1.2)]
UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def random_polygon(rng, max_vertices=10, min_vertices=3):
    """Convex hull of points at random angles on a jittered ellipse."""
    while True:
        k = rng.integers(min_vertices, max_vertices + 1)
        ang = np.sort(rng.uniform(0, 2 * np.pi, k))
        rad = rng.uniform(0.7, 1.0, k)
        sx, sy = rng.uniform(0.5, 2.0, 2)
        pts = np.column_stack([sx * rad * np.cos(ang), sy * rad * np.sin(ang)]) + rng.uniform(-1, 1, 2)
        hull = convex_hull2(pts, eps=1e-6)
        if len(hull) < min_vertices:
            continue
        try:
            Q = ConvexPolygon.from_points(hull, eps=1e-6)
        except ValueError:
            continue
        if Q.area > 0.05:
            return Q


def round_polygon(rng, max_vertices=9, min_vertices=4):
    """Polygon with jittered angles and radii around the unit circle (no long thin channels)."""
    while True:
        k = int(rng.integers(min_vertices, max_vertices + 1))
        ang = (np.arange(k) + rng.uniform(-0.35, 0.35, k)) * 2 * np.pi / k
        rad = rng.uniform(0.8, 1.2, k)
        hull = convex_hull2(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]), eps=1e-6)
        if len(hull) >= 3:
            return ConvexPolygon.from_points(hull, eps=1e-6)


def random_points(rng, Q, n, min_sep=1e-3):
    lo, hi = Q.bounds
    pts = []
    while len(pts) < n:
        x = rng.uniform(lo, hi)
        if Q.contains(x) and all(np.linalg.norm(x - p) > min_sep for p in pts):
            pts.append(x)
    return np.array(pts)


@pytest.fixture
def octagon():
    return ConvexPolygon.from_points(OCTAGON_VERTICES)


@pytest.fixture
def unit_square():
    return ConvexPolygon.from_points(UNIT_SQUARE)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion.

    A failing criterion listed with ``known_gap`` is reported as an expected failure.
    """

    def record(number, ok, detail, known_gap=None):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        if not ok:
            if known_gap:
                pytest.xfail(known_gap)
            pytest.fail(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
