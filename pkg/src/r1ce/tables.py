"""Benchmark suites that regenerate the published tables as CSV rows."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .laminates import DEFAULT_KAPPA, extract_level_set
from .problems import build_problem
from .solvers import SolverConfig, solve


class UnknownSuite(ValueError):
    pass


@dataclass
class TableConfig:
    suite: str
    sizes: tuple[int, ...]
    direction_sets: tuple[str, ...] = ()
    solvers: tuple[str, ...] = ("line",)
    tol: float = 1e-8
    kappa: float = DEFAULT_KAPPA


DEFAULTS = {
    "ks-error": TableConfig("ks-error", (25, 45), ("rc16", "rc64")),
    "area-2d": TableConfig("area-2d", (28, 42, 56, 70), ("d2", "d4")),
    "times-2d": TableConfig("times-2d", (43, 71, 127), ("d2", "d4"),
                            ("line", "gauss_seidel", "jacobi", "hybrid")),
    "volume-4d": TableConfig("volume-4d", (45,), ("rc16", "rc64", "rc144", "rc256")),
}
SUITES = tuple(DEFAULTS)


def level_set_measure(result, problem, kappa: float = DEFAULT_KAPPA) -> float:
    K, _ = extract_level_set(result, problem, kappa)
    return K.volume()


def max_error(result, problem) -> float:
    x = problem.grid.coords(problem.interior)
    exact = problem.analytic_envelope(x)
    return float(np.abs(result.solution.values[problem.interior] - exact).max())


def _timed_solve(problem, strategy, tol):
    t0 = time.perf_counter()
    res = solve(problem, SolverConfig(strategy=strategy, tol=tol))
    return res, time.perf_counter() - t0


def run_suite(cfg: TableConfig, log=None) -> list[dict]:
    if cfg.suite not in DEFAULTS:
        raise UnknownSuite(f"unknown suite {cfg.suite!r}; choose from {SUITES}")
    rows = []
    for n in cfg.sizes:
        row: dict = {"gridsize": n}
        for ds in cfg.direction_sets:
            tag = {"ks-error": "kohn_strang", "volume-4d": "eight_gradient"}.get(cfg.suite,
                                                                                 "four_gradient")
            problem = build_problem(tag, n=n, directions=ds)
            row["dx"] = problem.h
            if cfg.suite == "times-2d":
                for strategy in cfg.solvers:
                    res, secs = _timed_solve(problem, strategy, cfg.tol)
                    row[f"{ds}_{strategy}_iterations"] = res.iterations
                    row[f"{ds}_{strategy}_seconds"] = round(secs, 4)
                continue
            res, secs = _timed_solve(problem, cfg.solvers[0], cfg.tol)
            if cfg.suite == "ks-error":
                row[ds] = max_error(res, problem)
            else:
                row[ds] = level_set_measure(res, problem, cfg.kappa)
            row[f"{ds}_seconds"] = round(secs, 4)
            if log:
                log(f"{cfg.suite} n={n} {ds}: {row[ds]:.6g} ({secs:.1f}s)")
        rows.append(row)
    return rows


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, fieldnames=fields)
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()

