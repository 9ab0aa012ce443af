"""Scenario files: a polygon, a generator count, an initial configuration and a flow.

Scenarios are YAML documents with the top-level fields ``polygon``, ``n``,
``init`` (``points`` or ``random_seed``), ``flow`` (``kind``, ``dt``,
``t_max``, ``stop_tol`` and optionally ``stepper``) and ``outputs`` (``csv``,
``svg_every_k_steps``); ``name`` and ``description`` are optional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np
import yaml

from .flows import FlowKind, FlowSpec, Stepper
from .geometry import ConvexPolygon, InvalidPolygonError

TOP_LEVEL = ("name", "description", "polygon", "n", "init", "flow", "outputs")


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    line: Optional[int] = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.field}: {self.message}"


class ScenarioError(ValueError):
    """Base class; ``violations`` lists every problem found."""

    def __init__(self, violations: list):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class MalformedFieldError(ScenarioError):
    """A field is missing, has the wrong type, or an unusable value."""


class NonConvexPolygonError(ScenarioError):
    """The polygon is not a valid convex polygon."""


class PointOutsidePolygonError(ScenarioError):
    """An explicit initial point lies outside the polygon."""


@dataclass(frozen=True)
class InitSpec:
    points: Optional[tuple] = None
    random_seed: Optional[int] = None


@dataclass(frozen=True)
class OutputSpec:
    csv: bool = True
    svg_every_k_steps: int = 0


@dataclass(frozen=True)
class Scenario:
    polygon: tuple
    n: int
    init: InitSpec
    flow: FlowSpec
    outputs: OutputSpec = field(default_factory=OutputSpec)
    name: str = "scenario"
    description: str = ""

    @property
    def environment(self) -> ConvexPolygon:
        return ConvexPolygon.from_points(self.polygon)

    def initial_configuration(self) -> np.ndarray:
        if self.init.points is not None:
            return np.array(self.init.points, dtype=float)
        return random_configuration(self.environment, self.n, self.init.random_seed)


def random_configuration(Q: ConvexPolygon, n: int, seed: int) -> np.ndarray:
    """``n`` distinct points uniform in ``Q`` by rejection from its bounding box.

    Uses numpy's PCG64 bit generator seeded with ``seed``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = Q.bounds
    eps = Q.tolerances().geo
    pts: list = []
    while len(pts) < n:
        x = rng.uniform(lo, hi)
        if Q.contains(x) and all(np.linalg.norm(x - p) > eps for p in pts):
            pts.append(x)
    return np.array(pts)


def _line_map(text: str) -> dict:
    """Map dotted field paths to 1-based source lines."""
    out: dict = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return out

    def walk(node, path):
        out[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for key, val in node.value:
                sub = f"{path}.{key.value}" if path else str(key.value)
                out[sub] = key.start_mark.line + 1
                walk(val, sub)
        elif isinstance(node, yaml.SequenceNode):
            for idx, val in enumerate(node.value):
                walk(val, f"{path}[{idx}]")

    if root is not None:
        walk(root, "")
    return out


class _Checker:
    def __init__(self, lines: dict):
        self.lines = lines
        self.found: list = []

    def fail(self, cls, path: str, message: str):
        self.found.append((cls, Violation(path, message, self.lines.get(path))))

    def number(self, value, path: str, positive: bool = False, nonneg: bool = False):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.fail(MalformedFieldError, path, f"expected a finite number, got {value!r}")
            return None
        if positive and not value > 0:
            self.fail(MalformedFieldError, path, "must be positive")
            return None
        if nonneg and value < 0:
            self.fail(MalformedFieldError, path, "must be nonnegative")
            return None
        return float(value)

    def point(self, value, path: str):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            self.fail(MalformedFieldError, path, f"expected [x, y], got {value!r}")
            return None
        x = self.number(value[0], f"{path}[0]")
        y = self.number(value[1], f"{path}[1]")
        return None if x is None or y is None else (x, y)

    def raise_if_any(self):
        if self.found:
            raise self.found[0][0]([v for _, v in self.found])


def parse_scenario(text: str) -> Scenario:
    """Validate a scenario document; raises a :class:`ScenarioError` subclass listing all violations."""
    lines = _line_map(text)
    chk = _Checker(lines)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise MalformedFieldError([Violation("<document>", f"not valid YAML: {exc}",
                                             mark.line + 1 if mark else None)]) from None
    if not isinstance(doc, dict):
        raise MalformedFieldError([Violation("<document>", "expected a mapping at top level", 1)])
    for key in doc:
        if key not in TOP_LEVEL:
            chk.fail(MalformedFieldError, str(key), "unknown field")
    for key in ("polygon", "n", "init", "flow"):
        if key not in doc:
            chk.fail(MalformedFieldError, key, "missing required field")
    chk.raise_if_any()

    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        chk.fail(MalformedFieldError, "name", "expected a nonempty string")
    description = doc.get("description", "")
    if not isinstance(description, str):
        chk.fail(MalformedFieldError, "description", "expected a string")

    poly = doc["polygon"]
    vertices = None
    if not isinstance(poly, list):
        chk.fail(MalformedFieldError, "polygon", "expected a list of [x, y] vertices")
    else:
        pts = [chk.point(v, f"polygon[{k}]") for k, v in enumerate(poly)]
        if all(p is not None for p in pts):
            vertices = tuple(pts)

    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        chk.fail(MalformedFieldError, "n", f"expected a positive integer, got {n!r}")
        n = None

    init = doc["init"]
    init_spec = None
    if not isinstance(init, dict) or len(set(init) & {"points", "random_seed"}) != 1 or set(init) - {
            "points", "random_seed"}:
        chk.fail(MalformedFieldError, "init", "expected exactly one of 'points' or 'random_seed'")
    elif "points" in init:
        raw = init["points"]
        if not isinstance(raw, list) or not raw:
            chk.fail(MalformedFieldError, "init.points", "expected a nonempty list of [x, y]")
        else:
            pts = [chk.point(v, f"init.points[{k}]") for k, v in enumerate(raw)]
            if all(p is not None for p in pts):
                init_spec = InitSpec(points=tuple(pts))
                if n is not None and len(pts) != n:
                    chk.fail(MalformedFieldError, "init.points", f"has {len(pts)} points but n = {n}")
    else:
        seed = init["random_seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            chk.fail(MalformedFieldError, "init.random_seed", f"expected a nonnegative integer, got {seed!r}")
        else:
            init_spec = InitSpec(random_seed=seed)

    flow = doc["flow"]
    flow_spec = None
    if not isinstance(flow, dict):
        chk.fail(MalformedFieldError, "flow", "expected a mapping")
    else:
        for key in flow:
            if key not in ("kind", "dt", "t_max", "stop_tol", "stepper"):
                chk.fail(MalformedFieldError, f"flow.{key}", "unknown field")
        kind = flow.get("kind")
        try:
            kind = FlowKind(kind)
        except ValueError:
            chk.fail(MalformedFieldError, "flow.kind",
                     f"expected one of {[k.value for k in FlowKind]}, got {kind!r}")
            kind = None
        dt = chk.number(flow.get("dt", 0.01), "flow.dt", positive=True)
        t_max = chk.number(flow.get("t_max", 20.0), "flow.t_max", positive=True)
        stop_tol = chk.number(flow.get("stop_tol", 0.0), "flow.stop_tol", nonneg=True)
        stepper = flow.get("stepper", Stepper.SLIDING.value)
        try:
            stepper = Stepper(stepper)
        except ValueError:
            chk.fail(MalformedFieldError, "flow.stepper", f"expected 'euler' or 'sliding', got {stepper!r}")
            stepper = None
        if dt is not None and t_max is not None and t_max < dt:
            chk.fail(MalformedFieldError, "flow.t_max", "must be at least dt")
        elif None not in (kind, dt, t_max, stop_tol, stepper):
            flow_spec = FlowSpec(kind, dt, t_max, stop_tol, stepper)

    out = doc.get("outputs", {}) or {}
    out_spec = None
    if not isinstance(out, dict):
        chk.fail(MalformedFieldError, "outputs", "expected a mapping")
    else:
        for key in out:
            if key not in ("csv", "svg_every_k_steps"):
                chk.fail(MalformedFieldError, f"outputs.{key}", "unknown field")
        csv = out.get("csv", True)
        every = out.get("svg_every_k_steps", 0)
        if not isinstance(csv, bool):
            chk.fail(MalformedFieldError, "outputs.csv", "expected true or false")
        if isinstance(every, bool) or not isinstance(every, int) or every < 0:
            chk.fail(MalformedFieldError, "outputs.svg_every_k_steps", "expected a nonnegative integer")
        else:
            out_spec = OutputSpec(bool(csv), every)
    chk.raise_if_any()

    try:
        Q = ConvexPolygon.from_points(vertices)
    except InvalidPolygonError as exc:
        raise NonConvexPolygonError([Violation("polygon", str(exc), lines.get("polygon"))]) from None
    if init_spec.points is not None:
        eps = Q.tolerances().geo
        for k, p in enumerate(init_spec.points):
            if not Q.contains(p, eps=eps):
                chk.fail(PointOutsidePolygonError, f"init.points[{k}]", f"{p} lies outside the polygon")
        P = np.array(init_spec.points)
        d = np.linalg.norm(P[:, None] - P[None], axis=2)
        np.fill_diagonal(d, np.inf)
        if len(P) > 1 and d.min() < eps:
            chk.fail(MalformedFieldError, "init.points", "contains coincident points")
    chk.raise_if_any()
    return Scenario(vertices, n, init_spec, flow_spec, out_spec, name, description)


def scenario_to_dict(s: Scenario) -> dict:
    init = ({"points": [list(p) for p in s.init.points]} if s.init.points is not None
            else {"random_seed": s.init.random_seed})
    return {
        "name": s.name,
        "description": s.description,
        "polygon": [list(p) for p in s.polygon],
        "n": s.n,
        "init": init,
        "flow": {"kind": s.flow.kind.value, "dt": s.flow.dt, "t_max": s.flow.t_max,
                 "stop_tol": s.flow.stop_tol, "stepper": s.flow.stepper.value},
        "outputs": {"csv": s.outputs.csv, "svg_every_k_steps": s.outputs.svg_every_k_steps},
    }


def serialize_scenario(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False, default_flow_style=None)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _bundled_dir():
    return resources.files("multicenter").joinpath("scenarios")


def bundled_names() -> list:
    return sorted(p.name[:-5] for p in _bundled_dir().iterdir() if p.name.endswith(".yaml"))


def bundled_scenario_text(name: str) -> str:
    return _bundled_dir().joinpath(f"{name}.yaml").read_text(encoding="utf-8")


def load_bundled(name: str) -> Scenario:
    return parse_scenario(bundled_scenario_text(name))
