"""The six multi-center dynamical systems and their numerical integration."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .centers import circumcenter, incenter_set
from .geometry import ConvexPolygon, project_onto_segment
from .nonsmooth import (
    Problem,
    cell_grad_lg,
    cell_grad_sm,
    classify_critical,
    grad_HDC_partition,
    grad_HSP_partition,
    PieceModel,
    least_norm,
    min_norm_point,
    min_norm_point_2d,
    pieces_cell_lg,
    pieces_cell_sm,
    pieces_HDC,
    pieces_HSP,
)
from .objective import hdc_from_partition, hsp_from_partition
from .voronoi import VoronoiPartition, compute_partition


class FlowKind(enum.Enum):
    GRAD_DC = "GradDC"
    GRAD_SP = "GradSP"
    DIST_GRAD_DC = "DistGradDC"
    DIST_GRAD_SP = "DistGradSP"
    LLOYD_CC = "LloydCC"
    LLOYD_IC = "LloydIC"

    @property
    def problem(self) -> Problem:
        return Problem.DC if self in (FlowKind.GRAD_DC, FlowKind.DIST_GRAD_DC, FlowKind.LLOYD_CC) else Problem.SP


class Stepper(enum.Enum):
    EULER = "euler"
    SLIDING = "sliding"


@dataclass(frozen=True)
class FlowSpec:
    """Integration settings.

    ``stepper`` picks how one step of length ``dt`` is taken: ``euler`` is
    ``p + dt * velocity``; ``sliding`` (default for the four gradient flows)
    follows the exact sliding motion of the piecewise-linear model of the
    objective built at the start of the step.  Lloyd flows always use Euler.
    """

    kind: FlowKind
    dt: float = 0.01
    t_max: float = 20.0
    stop_tol: float = 0.0
    stepper: Stepper = Stepper.SLIDING

    def __post_init__(self):
        object.__setattr__(self, "kind", FlowKind(self.kind))
        object.__setattr__(self, "stepper", Stepper(self.stepper))
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max >= self.dt:
            raise ValueError("t_max must be at least dt")
        if not self.stop_tol >= 0:
            raise ValueError("stop_tol must be nonnegative")


def velocity_from_partition(kind: FlowKind, part: VoronoiPartition) -> np.ndarray:
    kind = FlowKind(kind)
    n = part.n
    P = part.points
    if kind is FlowKind.GRAD_DC:
        return -least_norm(grad_HDC_partition(part)).least_norm_vector.reshape(n, 2)
    if kind is FlowKind.GRAD_SP:
        return least_norm(grad_HSP_partition(part)).least_norm_vector.reshape(n, 2)
    out = np.zeros((n, 2))
    for i in range(n):
        if kind is FlowKind.DIST_GRAD_DC:
            out[i] = -least_norm(cell_grad_lg(part, i)).least_norm_vector
        elif kind is FlowKind.DIST_GRAD_SP:
            out[i] = least_norm(cell_grad_sm(part, i)).least_norm_vector
        elif kind is FlowKind.LLOYD_CC:
            out[i] = circumcenter(part.cells[i]).center - P[i]
        else:
            out[i] = project_onto_segment(P[i], incenter_set(part.cells[i]).segment) - P[i]
    return out


def velocity(kind: FlowKind, Q: ConvexPolygon, P) -> np.ndarray:
    """Instantaneous velocity of every generator, shape ``(n, 2)``."""
    return velocity_from_partition(kind, compute_partition(Q, P))


PIECE_MODELS = {
    FlowKind.GRAD_DC: pieces_HDC,
    FlowKind.GRAD_SP: pieces_HSP,
    FlowKind.DIST_GRAD_DC: pieces_cell_lg,
    FlowKind.DIST_GRAD_SP: pieces_cell_sm,
}


def _slide(values: np.ndarray, grads: np.ndarray, dt: float, band: float,
           max_events: int) -> tuple[np.ndarray, int]:
    """Sliding motion over time ``dt`` decreasing ``max_k values[k] + grads[k] . x``."""
    f = values.astype(float).copy()
    top = f.max()
    f[f >= top - band] = top
    tie = 1e-12 * max(1.0, float(np.abs(f).max()))
    lnp = min_norm_point_2d if grads.shape[1] == 2 else (lambda X: min_norm_point(X)[0])
    x = np.zeros(grads.shape[1])
    t = 0.0
    for event in range(max_events + 1):
        top = f.max()
        act = f >= top - tie
        v = -lnp(grads[act])
        if not np.any(np.abs(v) > 1e-14):
            return x, event
        r = grads @ v
        rho = r[act].max()
        faster = ~act & (r > rho + 1e-15)
        h = dt - t
        if faster.any():
            s = (top - f[faster]) / (r[faster] - rho)
            h = max(0.0, min(h, float(s.min())))
        f += h * r
        x += h * v
        t += h
        if t >= dt * (1 - 1e-12):
            return x, event
        if faster.any():
            idx = np.flatnonzero(faster)[s <= h * (1 + 1e-9) + 1e-15]
            f[idx] = f[act].max()
    return x, max_events


def sliding_displacement(model: PieceModel, dt: float, band: float,
                         max_events: int = 200) -> tuple[np.ndarray, int]:
    """Displacement after time ``dt`` of the sliding flow of maxima of affine pieces.

    Each group's maximum is decreased along minus the least-norm element of
    its active gradients; the motion is cut whenever an inactive piece catches
    up with its group maximum, which then joins the active set.  Pieces within
    ``band`` of their maximum at the start count as tied.  Groups tied to one
    generator evolve independently.  Returns the displacement and the total
    number of events.
    """
    x = np.zeros(model.grads.shape[1])
    events = 0
    for g, b in enumerate(model.block):
        members = model.groups == g
        if b < 0:
            step, k = _slide(model.values[members], model.grads[members], dt, band, max_events)
            x += step
        else:
            step, k = _slide(model.values[members], model.grads[members, 2 * b:2 * b + 2],
                             dt, band, max_events)
            x[2 * b:2 * b + 2] += step
        events += k
    return x, events


class Termination(enum.Enum):
    CONVERGED = "converged"
    T_MAX = "t_max"
    ERROR = "error"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution: ``configs[k]`` is the configuration at ``times[k]``.

    ``velocities[k]`` is the velocity evaluated at ``configs[k]``;
    ``clamp`` records, per step, how far the Euler update left the
    environment before being projected back.
    """

    spec: FlowSpec
    environment: ConvexPolygon
    times: np.ndarray
    configs: np.ndarray
    h_dc: np.ndarray
    h_sp: np.ndarray
    velocities: np.ndarray
    clamp: np.ndarray
    terminated_by: Termination
    message: str = ""

    @property
    def final(self) -> np.ndarray:
        return self.configs[-1]

    @property
    def speeds(self) -> np.ndarray:
        return np.linalg.norm(self.velocities, axis=2)


def _clamp(Q: ConvexPolygon, P: np.ndarray) -> tuple[np.ndarray, float]:
    out = P.copy()
    worst = 0.0
    for i, p in enumerate(P):
        if not Q.contains(p):
            out[i] = Q.project(p)
            worst = max(worst, float(np.linalg.norm(out[i] - p)))
    return out, worst


def integrate(spec: FlowSpec, Q: ConvexPolygon, P0) -> Trajectory:
    """Fixed-step integration with projection onto ``Q`` after each step.

    Stops at ``t_max`` or once the largest per-generator displacement over the
    last 10 steps falls below ``stop_tol * dt * 10``.
    """
    P = np.array(P0, dtype=float)
    steps = int(round(spec.t_max / spec.dt))
    times, configs, hdc, hsp, vels, clamps = [], [], [], [], [], []
    status, message = Termination.T_MAX, ""
    for k in range(steps + 1):
        try:
            part = compute_partition(Q, P)
            v = velocity_from_partition(spec.kind, part)
        except (ValueError, RuntimeError) as exc:
            status, message = Termination.ERROR, f"{type(exc).__name__}: {exc}"
            break
        times.append(k * spec.dt)
        configs.append(P.copy())
        hdc.append(hdc_from_partition(part)[0])
        hsp.append(hsp_from_partition(part)[0])
        vels.append(v)
        if k == steps:
            break
        if spec.stop_tol > 0 and k >= 10:
            disp = np.linalg.norm(P - configs[k - 10], axis=1).max()
            if disp < spec.stop_tol * spec.dt * 10:
                status = Termination.CONVERGED
                break
        if spec.stepper is Stepper.SLIDING and spec.kind in PIECE_MODELS:
            band = spec.dt ** 2 + part.tol.act
            step, _ = sliding_displacement(PIECE_MODELS[spec.kind](part), spec.dt, band)
            step = step.reshape(-1, 2)
        else:
            step = spec.dt * v
        P, worst = _clamp(Q, P + step)
        clamps.append(worst)
    n = len(P)
    return Trajectory(spec, Q, np.array(times, dtype=float), np.array(configs, dtype=float).reshape(-1, n, 2),
                      np.array(hdc, dtype=float), np.array(hsp, dtype=float),
                      np.array(vels, dtype=float).reshape(-1, n, 2), np.array(clamps, dtype=float), status, message)


@dataclass(frozen=True)
class FlowDiagnostics:
    problem: Problem
    monotonicity_tol: float
    violations: np.ndarray
    violation_fraction: float
    max_violation: float
    center_distance: dict
    centered: dict
    least_norm_magnitude: float
    chattering: float
    max_clamp: float
    extra: dict = field(default_factory=dict)


def monotonicity_violations(traj: Trajectory, problem: Problem, tol: float) -> np.ndarray:
    """Step indices where the objective moved the wrong way by more than ``tol``."""
    if problem is Problem.DC:
        change = np.diff(traj.h_dc)
    else:
        change = -np.diff(traj.h_sp)
    return np.flatnonzero(change > tol)


def chattering_indicator(traj: Trajectory) -> float:
    """Fraction of consecutive velocity pairs pointing in opposing directions."""
    v = traj.velocities
    if len(v) < 2:
        return 0.0
    dots = np.einsum("kij,kij->ki", v[1:], v[:-1])
    moving = (np.linalg.norm(v[1:], axis=2) > 0) & (np.linalg.norm(v[:-1], axis=2) > 0)
    if not moving.any():
        return 0.0
    return float(np.mean(dots[moving] < 0))


def diagnostics(traj: Trajectory, problem: Problem | str | None = None,
                center_tol: float | None = None) -> FlowDiagnostics:
    """Monotonicity, final centeredness, least-norm magnitude and chattering of a run."""
    problem = traj.spec.kind.problem if problem is None else Problem(problem)
    Q = traj.environment
    tol = Q.tolerances()
    mono_tol = 10 * traj.spec.dt ** 2 + tol.act
    bad = monotonicity_violations(traj, problem, mono_tol)
    h = traj.h_dc if problem is Problem.DC else -traj.h_sp
    worst = float(np.max(np.diff(h), initial=0.0))
    center_tol = 5e-3 * Q.diameter if center_tol is None else center_tol
    report = classify_critical(Q, traj.final, problem, center_tol=center_tol)
    steps = max(len(traj.times) - 1, 1)
    return FlowDiagnostics(
        problem=problem,
        monotonicity_tol=mono_tol,
        violations=bad,
        violation_fraction=len(bad) / steps,
        max_violation=worst,
        center_distance=report.center_distance,
        centered=report.centered,
        least_norm_magnitude=report.criticality.least_norm_magnitude,
        chattering=chattering_indicator(traj),
        max_clamp=float(np.max(traj.clamp, initial=0.0)),
    )
