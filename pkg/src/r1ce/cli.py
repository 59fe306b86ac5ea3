"""Command-line front end: ``r1ce solve``, ``r1ce laminate`` and ``r1ce table``.

Exit codes: 0 success, 1 usage error, 2 solver hit the iteration cap,
3 empty minimal level set.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import laminates as lam
from .directions import DirectionError, canonicalize, devectorize, parse_directions
from .grid import GridError, read_gfd1, write_gfd1
from .problems import ProblemError, build_problem, load_custom
from .solvers import MaxIterationsExceeded, SolverConfig, set_threads, solve
from .tables import DEFAULTS, SUITES, TableConfig, level_set_measure, max_error, run_suite, to_csv

EXIT_OK, EXIT_USAGE, EXIT_MAXITER, EXIT_EMPTY = 0, 1, 2, 3

log = logging.getLogger("r1ce")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    config: dict
    artifacts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    residual: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _bounds(text):
    vals = _floats(text)
    if vals is None:
        return None
    if len(vals) == 2:
        return tuple(vals)
    if len(vals) % 2:
        raise UsageError("--bounds needs lo,hi or one lo,hi pair per axis")
    return [tuple(vals[i:i + 2]) for i in range(0, len(vals), 2)]


def _threads(args):
    n = args.threads or os.environ.get("R1CE_THREADS")
    if n:
        try:
            set_threads(int(n))
        except ValueError as exc:
            raise UsageError(f"bad thread count {n!r}") from exc


# -- problem assembly -------------------------------------------------------------

def _grid_point(grid, point) -> int:
    try:
        flat = grid.index_of(point)
    except IndexError as exc:
        raise UsageError(f"{[float(c) for c in point]} lies outside the grid") from exc
    if not np.allclose(grid.coords(flat), point, atol=1e-9 * grid.spacing):
        raise UsageError(f"{[float(c) for c in point]} is not a grid point")
    return flat


def _problem_config(args) -> dict:
    return {"problem": args.problem.replace("-", "_"), "n": args.n, "bounds": args.bounds,
            "directions": args.directions, "custom": args.custom}


def _build(config: dict):
    custom = load_custom(config["custom"]) if config.get("custom") else None
    return build_problem(config["problem"], n=config["n"], directions=config.get("directions"),
                         bounds=_bounds(config.get("bounds")), custom=custom)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(strategy=args.solver, tol=args.tol, max_iterations=args.max_iter)


def _summary(result, problem, kappa) -> dict:
    out = {"min_u": float(result.solution.values[problem.interior].min())}
    try:
        origin = _grid_point(problem.grid, np.zeros(problem.grid.dim))
        out["origin_value"] = float(result.solution.values[origin])
    except UsageError:
        pass
    if problem.analytic_envelope is not None:
        out["max_error_vs_analytic"] = max_error(result, problem)
    if problem.wells:
        try:
            out["level_set_measure"] = level_set_measure(result, problem, kappa)
        except lam.EmptyLevelSet:
            out["level_set_measure"] = 0.0
    return out


# -- commands ---------------------------------------------------------------------

def cmd_solve(args) -> int:
    if args.from_manifest:
        config = json.loads(Path(args.from_manifest).read_text())["config"]
    else:
        config = {**_problem_config(args), "solver": asdict(_solver_config(args)),
                  "kappa": args.kappa}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    problem = _build(config)
    config["directions"] = problem.directions.id
    t_build = time.perf_counter() - t0
    manifest = RunManifest(config, timings={"build": t_build})
    code = EXIT_OK
    try:
        result = solve(problem, SolverConfig(**config["solver"]))
    except MaxIterationsExceeded as exc:
        result, code = exc.result, EXIT_MAXITER
        print(f"error: {exc}", file=sys.stderr)
    dump = out / "solution.gfd1"
    write_gfd1(dump, result.solution, problem.directions.id, problem.problem_id,
               {"config": config})
    manifest.artifacts = {"solution": dump.name}
    manifest.timings["solve"] = result.wall_time
    manifest.residual = result.final_residual.to_dict()
    manifest.results = {**result.to_dict(), **_summary(result, problem, config["kappa"]),
                        "problem": problem.manifest()}
    manifest.results.pop("residual", None)
    manifest.write(out / "manifest.json")
    print(json.dumps(manifest.results, default=_jsonable, indent=1))
    return code


def _load_solution(args):
    """Either read a dump (rebuilding its problem from the stored config) or solve afresh."""
    if args.input:
        u, header = read_gfd1(args.input)
        config = header.get("config")
        if config is None:
            raise UsageError(f"{args.input} carries no problem config; re-run solve")
        problem = _build(config)
        if problem.grid.size != u.grid.size:
            raise UsageError("dump grid does not match the rebuilt problem")
        return u, problem
    problem = _build(_problem_config(args))
    result = solve(problem, _solver_config(args))
    return result.solution, problem


def _initial_direction(text, dset):
    if text is None:
        return None
    vals = [int(float(t)) for t in text.split(",")]
    if len(vals) == 1:
        return vals[0]
    target = canonicalize(vals)
    for k, v in enumerate(dset.vectors):
        if tuple(int(c) for c in v) == target:
            return k
    raise UsageError(f"direction {tuple(vals)} is not in set {dset.id}")


def cmd_laminate(args) -> int:
    u, problem = _load_solution(args)
    if args.directions and args.input:
        problem = problem.with_directions(parse_directions(args.directions))
    dset = problem.directions
    try:
        K, _ = lam.extract_level_set(u, problem, args.kappa)
    except lam.EmptyLevelSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    bary = _floats(args.barycenter) or [0.0] * problem.grid.dim
    root = _grid_point(problem.grid, np.array(bary))
    tree = lam.extract_laminate(K, root, dset, args.max_depth,
                                _initial_direction(args.initial_direction, dset))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = problem.grid
    (out / "laminate.json").write_text(lam.to_json(tree, grid, dset))
    (out / "laminate.dot").write_text(lam.to_dot(tree, grid, dset))
    (out / "leaves.csv").write_text(lam.leaves_csv(tree, grid))
    summary = {"level_set_points": len(K), "level_set_measure": K.volume(),
               "nodes": sum(1 for _ in tree.nodes()), "leaves": sum(1 for _ in tree.leaves()),
               "depth": tree.depth()}
    if problem.wells:
        ups, bar = lam.support_weights(tree, grid, problem.well_indices())
        summary["upsilon"] = ups.tolist()
        summary["bar_upsilon"] = bar
        (out / "upsilon.csv").write_text(
            "well,weight\n" + "".join(f"{i + 1},{w:.12g}\n" for i, w in enumerate(ups)))
    if dset.dim == 4:
        dets = [float(np.linalg.det(devectorize(dset.vectors[n.direction]).astype(float)))
                for n in tree.nodes() if n.direction is not None]
        summary["split_directions_rank_one"] = all(d == 0.0 for d in dets)
    if grid.dim >= 3:
        for axis in range(grid.dim - 1):
            name = f"projection_{axis}_{grid.dim - 1}.csv"
            rows = ["a,b,weight"]
            for leaf in tree.leaves():
                c = grid.coords(leaf.point)
                rows.append(f"{c[axis]:.10g},{c[-1]:.10g},{float(leaf.weight):.12g}")
            (out / name).write_text("\n".join(rows) + "\n")
    (out / "laminate_summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    print(json.dumps(summary, indent=1))
    return EXIT_OK


def cmd_table(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    base = DEFAULTS[args.suite]
    cfg = TableConfig(
        args.suite,
        tuple(int(s) for s in args.sizes.split(",")) if args.sizes else base.sizes,
        tuple(args.directions.split(",")) if args.directions else base.direction_sets,
        tuple(args.solver.split(",")) if args.solver else base.solvers,
        args.tol, args.kappa)
    text = to_csv(run_suite(cfg, log=lambda m: print(m, file=sys.stderr)))
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def _add_problem_flags(p, required=True):
    p.add_argument("--problem", required=required,
                   help="kohn-strang, kohn-strang-smoothed, four-gradient, synthetic-four, "
                        "six-gradient, eight-gradient, xyz or custom")
    p.add_argument("--custom", help="JSON file describing a custom problem")
    p.add_argument("--n", type=int, default=29, help="grid points per axis (default 29)")
    p.add_argument("--bounds", help="lo,hi for every axis, or one lo,hi pair per axis")
    p.add_argument("--directions", help="rc16|rc64|rc144|rc256|d2|d4|d7|d24|v8|@file.json")


def _add_solver_flags(p):
    p.add_argument("--solver", default="line",
                   choices=["jacobi", "gauss-seidel", "line", "hybrid"])
    p.add_argument("--tol", type=float, default=1e-8, help="stop when the sup-norm update "
                   "falls below this (default 1e-8)")
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--threads", type=int, help="cap on worker threads (env R1CE_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="r1ce", description="Rank-one convex envelopes on grids.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one obstacle problem and dump the result")
    _add_problem_flags(p, required=False)
    _add_solver_flags(p)
    p.add_argument("--kappa", type=float, default=lam.DEFAULT_KAPPA,
                   help="level-set threshold in units of h")
    p.add_argument("--from-manifest", help="re-run the configuration stored in a manifest")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("laminate", help="extract a laminate from a solved problem")
    p.add_argument("--input", help="GFD1 dump written by 'solve' (else solve afresh)")
    _add_problem_flags(p, required=False)
    _add_solver_flags(p)
    p.add_argument("--barycenter", help="comma-separated grid point, default origin "
                   "(write --barycenter=-1,2 when the first value is negative)")
    p.add_argument("--kappa", type=float, default=lam.DEFAULT_KAPPA)
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--initial-direction", help="index into the set, or a vector a,b,...")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_laminate)

    p = sub.add_parser("table", help="regenerate a benchmark table as CSV")
    p.add_argument("suite", help=", ".join(SUITES))
    p.add_argument("--sizes", help="comma-separated grid sizes")
    p.add_argument("--directions", help="comma-separated direction sets")
    p.add_argument("--solver", help="comma-separated strategies")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--kappa", type=float, default=lam.DEFAULT_KAPPA)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="CSV path (also printed to stdout)")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        _threads(args)
        if args.command == "solve" and not (args.problem or args.from_manifest):
            raise UsageError("solve needs --problem or --from-manifest")
        if args.command == "laminate" and not (args.problem or args.input):
            raise UsageError("laminate needs --input or --problem")
        return args.func(args)
    except MaxIterationsExceeded as exc:
        print(f"r1ce: error: {exc}", file=sys.stderr)
        return EXIT_MAXITER
    except lam.EmptyLevelSet as exc:
        print(f"r1ce: error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (UsageError, ProblemError, DirectionError, GridError, lam.LaminateError) as exc:
        print(f"r1ce: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
