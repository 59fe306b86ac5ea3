"""Value at the origin of the D24 envelope of xyz on the cube, for a few grid sizes."""

import argparse

import numpy as np

from r1ce.problems import build_problem
from r1ce.solvers import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[11, 21, 31])
    ap.add_argument("--open-cube", action="store_true",
                    help="pin the faces of the cube to the floor instead")
    args = ap.parse_args()
    for n in args.sizes:
        p = build_problem("xyz", n=n, xyz_closed=not args.open_cube)
        res = solve(p, SolverConfig(strategy="line", tol=1e-10))
        u0 = res.solution.values[p.grid.index_of(np.zeros(3))]
        print(f"{n:3d}^3  h={p.h:.4f}  u(0)={u0:+.6f}  cycles={res.iterations}  "
              f"{res.wall_time:.1f}s")


if __name__ == "__main__":
    main()
