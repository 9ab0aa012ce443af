"""Run the six 16-generator scenarios on the eight-vertex polygon and write their artifacts.

    python3 scripts/reproduce_simulations.py [--out runs] [--seed 0] [--t-max 20]

Each run writes trajectory.csv, summary.json and the initial/final/overlay/panels
SVGs under <out>/<scenario name>.  A table of final values is printed at the end.
"""
import argparse
import dataclasses
import time
from pathlib import Path

from multicenter.runner import run
from multicenter.scenario import load_bundled

FLOWS = ["lloydcc", "lloydic", "graddc", "gradsp", "distgraddc", "distgradsp"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int, default=None, help="override the bundled random seed")
    ap.add_argument("--t-max", type=float, default=None, help="override the bundled horizon")
    args = ap.parse_args()

    rows = []
    for flow in FLOWS:
        sc = load_bundled(f"paper_polygon_16_{flow}")
        if args.seed is not None:
            sc = dataclasses.replace(sc, init=dataclasses.replace(sc.init, random_seed=args.seed),
                                     name=f"{sc.name}_seed{args.seed}")
        if args.t_max is not None:
            sc = dataclasses.replace(sc, flow=dataclasses.replace(sc.flow, t_max=args.t_max))
        start = time.perf_counter()
        res = run(sc, Path(args.out) / sc.name, svg=True)
        s = res.summary
        centered = sum(s["centered"].values())
        rows.append((sc.flow.kind.value, s["H_DC"], s["H_SP"], f"{centered}/{len(s['centered'])}",
                     s["monotonicity_violations"], time.perf_counter() - start))
        print(f"wrote {Path(args.out) / sc.name}")

    print(f"\n{'flow':<11}{'H_DC':>10}{'H_SP':>10}{'centered':>10}{'viol.':>7}{'sec':>7}")
    for kind, hdc, hsp, cen, viol, sec in rows:
        print(f"{kind:<11}{hdc:>10.5f}{hsp:>10.5f}{cen:>10}{viol:>7}{sec:>7.1f}")


if __name__ == "__main__":
    main()
