"""Laminates of the six-gradient set for every forced initial direction.

Solves the six-gradient obstacle once (81^3, d7) and, for the off-plane
barycenter (-0.4, -0.2, -0.1), grows one laminate per initial split
direction.  Prints the well weights and their total for each.
"""

import argparse
import json

import numpy as np

from r1ce import laminates as L
from r1ce.problems import build_problem
from r1ce.solvers import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=81)
    ap.add_argument("--barycenter", type=float, nargs=3, default=[-0.4, -0.2, -0.1])
    ap.add_argument("--json", help="also write the weights here")
    args = ap.parse_args()

    p = build_problem("six_gradient", n=args.n)
    res = solve(p, SolverConfig(strategy="line", tol=1e-10))
    K, _ = L.extract_level_set(res, p)
    root = p.grid.index_of(args.barycenter)
    rows = {}
    for k, v in enumerate(p.directions.vectors):
        try:
            tree = L.extract_laminate(K, root, p.directions, initial_direction=k)
        except L.NoAdmissibleDirection:
            print(f"direction {k + 1} {tuple(v)}: K is not connected this way at the root")
            continue
        ups, bar = L.support_weights(tree, p.grid, p.well_indices())
        rows[k + 1] = {"direction": v.tolist(), "upsilon": ups.round(6).tolist(), "bar": bar}
        print(f"direction {k + 1} {tuple(int(c) for c in v)}: "
              f"{np.array2string(ups, precision=6)}  bar {bar:.6f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
