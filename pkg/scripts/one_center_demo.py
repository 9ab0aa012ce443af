"""Single-generator flows: distance to the circumcenter / incenter set over time.

    python3 scripts/one_center_demo.py [--scenario one_center_distgraddc] [--every 100]

Also contrasts the pentagon of the bundled scenario with the eight-vertex polygon,
whose circumcircle is fixed by one diametral pair, so convergence there is slow.
"""
import argparse
import dataclasses

import numpy as np

from multicenter.centers import circumcenter, distance_to_incenter_set
from multicenter.flows import integrate
from multicenter.geometry import ConvexPolygon
from multicenter.nonsmooth import Problem, grad_lg, least_norm
from multicenter.scenario import load_bundled

OCTAGON = [(0, 0), (2.5, 0), (3.45, 1.5), (3.5, 1.6), (3.45, 1.7), (2.7, 2.1), (1, 2.4), (0.2, 1.2)]


def report(title, sc, every):
    Q = sc.environment
    traj = integrate(sc.flow, Q, sc.initial_configuration())
    if sc.flow.kind.problem is Problem.DC:
        cc = circumcenter(Q).center
        dist = np.linalg.norm(traj.configs[:, 0] - cc, axis=1)
        target = f"CC = ({cc[0]:.4f}, {cc[1]:.4f}), 0 in grad: {least_norm(grad_lg(Q, cc)).contains_zero.value}"
    else:
        dist = np.array([distance_to_incenter_set(Q, c[0]) for c in traj.configs])
        target = "incenter set"
    print(f"{title}: {sc.flow.kind.value}, {target}")
    for k in range(0, len(traj.times), every):
        print(f"  t = {traj.times[k]:6.3f}   distance = {dist[k]:.3e}")
    hit = np.flatnonzero(dist < 1e-3)
    print(f"  within 1e-3 at t = {traj.times[hit[0]]:.3f}" if len(hit) else "  not within 1e-3 by t_max")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="one_center_distgraddc")
    ap.add_argument("--every", type=int, default=100)
    args = ap.parse_args()
    sc = load_bundled(args.scenario)
    report("pentagon", sc, args.every)
    octagon = dataclasses.replace(sc, polygon=tuple(map(tuple, ConvexPolygon.from_points(OCTAGON).vertices)),
                                init=dataclasses.replace(sc.init, points=((0.6, 0.4),)))
    report("eight-vertex polygon", octagon, args.every)


if __name__ == "__main__":
    main()
