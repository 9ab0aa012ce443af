"""Command line: ``run``, ``eval`` and ``oracle`` on scenario files.

Exit codes: 0 success, 1 scenario error, 2 runtime flow error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .nonsmooth import Problem, classify_critical
from .objective import hdc_from_partition, hdc_grid, hsp_enumerated, hsp_from_partition
from .runner import run
from .scenario import Scenario, ScenarioError, bundled_names, load_bundled, load_scenario
from .voronoi import compute_partition

EXIT_OK, EXIT_SCENARIO, EXIT_FLOW = 0, 1, 2


def _load(ref: str) -> Scenario:
    """A scenario file path, or the name of a bundled scenario."""
    if not os.path.exists(ref) and ref in bundled_names():
        return load_bundled(ref)
    return load_scenario(ref)


def _criticality(Q, P, part, problem: Problem) -> dict:
    rep = classify_critical(Q, P, problem, partition=part)
    return {
        "least_norm_magnitude": rep.criticality.least_norm_magnitude,
        "zero_position": rep.criticality.contains_zero.value,
        "is_critical": rep.is_critical,
        "active_generators": [int(i) for i in rep.active],
        "center_distance": {str(i): float(d) for i, d in rep.center_distance.items()},
    }


def cmd_eval(args) -> dict:
    sc = _load(args.scenario)
    Q, P = sc.environment, sc.initial_configuration()
    part = compute_partition(Q, P)
    hdc, hsp = hdc_from_partition(part)[0], hsp_from_partition(part)[0]
    return {
        "name": sc.name,
        "n": sc.n,
        "H_DC": hdc,
        "H_SP": hsp,
        "DC": _criticality(Q, P, part, Problem.DC),
        "SP": _criticality(Q, P, part, Problem.SP),
    }


def cmd_oracle(args) -> dict:
    sc = _load(args.scenario)
    Q, P = sc.environment, sc.initial_configuration()
    part = compute_partition(Q, P)
    hdc, hsp = hdc_from_partition(part)[0], hsp_from_partition(part)[0]
    hdc_bf, hsp_bf = hdc_grid(Q, P, args.grid), hsp_enumerated(Q, P)
    return {
        "name": sc.name,
        "grid": args.grid,
        "H_DC": {"partition": hdc, "grid": hdc_bf, "difference": hdc - hdc_bf},
        "H_SP": {"partition": hsp, "enumerated": hsp_bf, "difference": hsp - hsp_bf},
    }


def _grid_size(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("grid must be at least 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multicenter", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="integrate a scenario and write its artifacts")
    p.add_argument("--scenario", required=True, help="scenario file or bundled scenario name")
    p.add_argument("--out", default=None, help="output directory (default: runs/<name>)")
    p.add_argument("--svg", action="store_true", help="also write initial/final/overlay/three-panel SVGs")
    p = sub.add_parser("eval", help="objectives and criticality of the initial configuration")
    p.add_argument("--scenario", required=True)
    p = sub.add_parser("oracle", help="brute-force objective values for cross-checking")
    p.add_argument("--scenario", required=True)
    p.add_argument("--grid", type=_grid_size, default=300, help="grid resolution per axis for H_DC")
    sub.add_parser("list", help="names of bundled scenarios")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(bundled_names()))
            return EXIT_OK
        if args.command == "eval":
            print(json.dumps(cmd_eval(args), indent=2))
            return EXIT_OK
        if args.command == "oracle":
            print(json.dumps(cmd_oracle(args), indent=2))
            return EXIT_OK
        sc = _load(args.scenario)
        out = args.out or os.path.join("runs", sc.name)
        result = run(sc, out, svg=args.svg)
    except ScenarioError as exc:
        print(f"scenario error ({type(exc).__name__}):", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (ValueError, RuntimeError) as exc:
        print(f"flow error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FLOW
    s = result.summary
    for path in result.files:
        print(path)
    if result.failed:
        print(f"flow error after {s['steps']} steps: {s['message']}", file=sys.stderr)
        return EXIT_FLOW
    print(f"{sc.name}: t = {s['final_time']:g}, H_DC = {s['H_DC']:.6g}, H_SP = {s['H_SP']:.6g}, "
          f"active centered = {s['all_active_centered']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
