"""Disk-covering and sphere-packing multi-center flows on convex polygons."""
from .centers import circumcenter, incenter_set, inradius
from .flows import FlowKind, FlowSpec, Stepper, Termination, Trajectory, diagnostics, integrate, velocity
from .geometry import ConvexPolygon, HullPosition, Tolerances, zero_in_hull
from .nonsmooth import (
    Problem,
    classify_critical,
    grad_F,
    grad_G,
    grad_HDC,
    grad_HSP,
    grad_lg,
    grad_sm,
    lam,
    least_norm,
    mu,
)
from .objective import evaluate_F, evaluate_G, evaluate_HDC, evaluate_HSP, lg, sm
from .runner import run
from .scenario import Scenario, load_bundled, load_scenario, parse_scenario, serialize_scenario
from .voronoi import VoronoiPartition, compute_partition

__all__ = [
    "ConvexPolygon", "Tolerances", "HullPosition", "zero_in_hull",
    "VoronoiPartition", "compute_partition",
    "circumcenter", "incenter_set", "inradius",
    "lg", "sm", "evaluate_G", "evaluate_F", "evaluate_HDC", "evaluate_HSP",
    "Problem", "grad_lg", "grad_sm", "lam", "mu", "grad_G", "grad_F", "grad_HDC", "grad_HSP",
    "least_norm", "classify_critical",
    "FlowKind", "FlowSpec", "Stepper", "Termination", "Trajectory", "integrate", "velocity", "diagnostics",
    "Scenario", "parse_scenario", "serialize_scenario", "load_scenario", "load_bundled", "run",
]
