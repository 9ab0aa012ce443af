"""Run a scenario and write its artifacts: trajectory table, summary and SVG frames."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .flows import Termination, Trajectory, diagnostics, integrate
from .nonsmooth import Problem
from .render import overlay_svg, partition_svg, three_panel_svg
from .scenario import Scenario, scenario_to_dict

CSV_HEADER = "t,i,x,y,H_DC,H_SP,speed"


def _fmt(x: float) -> str:
    return "{:.12g}".format(float(x))


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(traj: Trajectory) -> str:
    """One row per sample and generator, numbers printed with 12 significant digits."""
    rows = [CSV_HEADER]
    speeds = traj.speeds
    for k, t in enumerate(traj.times):
        head = _fmt(t)
        tail = f"{_fmt(traj.h_dc[k])},{_fmt(traj.h_sp[k])}"
        for i, (x, y) in enumerate(traj.configs[k]):
            rows.append(f"{head},{i},{_fmt(x)},{_fmt(y)},{tail},{_fmt(speeds[k, i])}")
    return "\n".join(rows) + "\n"


def summarize(scenario: Scenario, traj: Trajectory) -> dict:
    """Final objective values, centeredness of active generators and least-norm magnitude."""
    out = {
        "scenario": scenario_to_dict(scenario),
        "seed": scenario.init.random_seed,
        "terminated_by": traj.terminated_by.value,
        "message": traj.message,
        "steps": max(len(traj.times) - 1, 0),
    }
    if len(traj.times) == 0:
        return out
    problem = scenario.flow.kind.problem
    diag = diagnostics(traj)
    out.update({
        "final_time": float(traj.times[-1]),
        "initial_configuration": traj.configs[0].tolist(),
        "final_configuration": traj.final.tolist(),
        "H_DC": float(traj.h_dc[-1]),
        "H_SP": float(traj.h_sp[-1]),
        "objective": "H_DC" if problem is Problem.DC else "H_SP",
        "least_norm_magnitude": diag.least_norm_magnitude,
        "active_generators": sorted(int(i) for i in diag.center_distance),
        "center_distance": {str(i): float(d) for i, d in sorted(diag.center_distance.items())},
        "centered": {str(i): bool(c) for i, c in sorted(diag.centered.items())},
        "all_active_centered": bool(all(diag.centered.values())),
        "monotonicity_tolerance": diag.monotonicity_tol,
        "monotonicity_violations": int(len(diag.violations)),
        "monotonicity_violation_fraction": diag.violation_fraction,
        "chattering": diag.chattering,
        "max_clamp": diag.max_clamp,
    })
    return out


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: Trajectory
    summary: dict
    files: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.trajectory.terminated_by is Termination.ERROR


def run(scenario: Scenario, out_dir, svg: bool = False) -> RunResult:
    """Integrate ``scenario`` and write its artifacts into ``out_dir``.

    Always writes ``summary.json``; ``trajectory.csv`` when requested by the
    scenario; ``initial.svg``, ``final.svg``, ``overlay.svg`` and
    ``panels.svg`` when ``svg`` is set; ``frame_<step>.svg`` every
    ``svg_every_k_steps`` steps.  A flow error ends the run early and the
    outputs for the steps already taken are still written.
    """
    out_dir = Path(out_dir)
    Q = scenario.environment
    traj = integrate(scenario.flow, Q, scenario.initial_configuration())
    summary = summarize(scenario, traj)
    files = []

    def emit(name: str, text: str):
        atomic_write(out_dir / name, text)
        files.append(out_dir / name)

    if scenario.outputs.csv:
        emit("trajectory.csv", trajectory_csv(traj))
    circles = "cc" if scenario.flow.kind.problem is Problem.DC else "ic"
    if len(traj.times) > 0:
        every = scenario.outputs.svg_every_k_steps
        if every > 0:
            for k in range(0, len(traj.times), every):
                emit(f"frame_{k:06d}.svg", partition_svg(Q, traj.configs[k], f"t = {traj.times[k]:.3f}", circles))
        if svg:
            emit("initial.svg", partition_svg(Q, traj.configs[0], "initial", circles))
            emit("final.svg", partition_svg(Q, traj.final, "final", circles))
            emit("overlay.svg", overlay_svg(Q, traj.configs, "trajectories"))
            emit("panels.svg", three_panel_svg(Q, traj.configs, circles))
    emit("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunResult(scenario, traj, summary, files)
