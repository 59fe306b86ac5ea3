"""Zero-level-set volume of the eight-gradient problem against direction set.

Each solve is dumped as GFD1 next to a JSON line of its statistics, so an
interrupted sweep can be resumed by skipping sets whose dump exists.
"""

import argparse
import json
import time
from pathlib import Path

from r1ce import laminates as L
from r1ce.grid import write_gfd1
from r1ce.problems import build_problem
from r1ce.solvers import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=45)
    ap.add_argument("--sets", nargs="+", default=["rc16", "rc64", "rc144", "rc256"])
    ap.add_argument("--kappa", type=float, default=L.DEFAULT_KAPPA)
    ap.add_argument("--out", default="results/eight_gradient")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for ds in args.sets:
        dump = out / f"n{args.n}_{ds}.gfd1"
        if dump.exists():
            print(f"{ds}: {dump} exists, skipping")
            continue
        t0 = time.perf_counter()
        p = build_problem("eight_gradient", n=args.n, directions=ds)
        res = solve(p, SolverConfig(strategy="line", tol=1e-8))
        K, P = L.extract_level_set(res, p, args.kappa)
        stats = {"set": ds, "n": args.n, "h": p.h, "volume": K.volume(), "points": len(K),
                 "supporting_points": len(P), "cycles": res.iterations,
                 "seconds": time.perf_counter() - t0}
        write_gfd1(dump, res.solution, ds, "eight_gradient",
                   {"config": {"problem": "eight_gradient", "n": args.n, "directions": ds,
                               "bounds": None, "custom": None}})
        with open(out / "volumes.jsonl", "a") as fh:
            fh.write(json.dumps(stats) + "\n")
        print(json.dumps(stats))


if __name__ == "__main__":
    main()
