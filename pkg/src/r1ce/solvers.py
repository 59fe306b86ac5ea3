"""Solvers for the discrete obstacle problem: Jacobi/Gauss-Seidel fixed point, line and hybrid."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import GridFunction
from .operators import ResidualReport, residual, stencil_offsets
from .problems import EnvelopeProblem

logger = logging.getLogger(__name__)

STRATEGIES = ("jacobi", "gauss_seidel", "line", "hybrid")


class MaxIterationsExceeded(RuntimeError):
    def __init__(self, result: "SolveResult"):
        super().__init__(f"{result.strategy}: no convergence after {result.iterations} "
                         f"iterations (last change {result.final_change:.3g})")
        self.result = result


@dataclass
class SolverConfig:
    strategy: str = "line"
    tol: float = 1e-8
    max_iterations: int = 1_000_000
    hybrid_outer: int = 10
    hybrid_inner: int | None = None
    raise_on_failure: bool = True

    def __post_init__(self):
        self.strategy = self.strategy.replace("-", "_")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.hybrid_outer < 1 or (self.hybrid_inner is not None and self.hybrid_inner < 1):
            raise ValueError("hybrid iteration counts must be >= 1")


@dataclass
class SolveResult:
    solution: GridFunction
    iterations: int
    final_change: float
    final_residual: ResidualReport
    wall_time: float
    strategy: str
    converged: bool = True
    sweeps: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "iterations": self.iterations,
                "final_change": self.final_change, "converged": self.converged,
                "wall_time": self.wall_time, "sweeps": self.sweeps,
                "residual": self.final_residual.to_dict()}


def apply_T(u: GridFunction, problem: EnvelopeProblem) -> GridFunction:
    """One simultaneous (Jacobi) application of the fixed-point map."""
    out = problem.obstacle.values.copy()
    _kernels.jacobi_sweep(u.values, out, problem.obstacle.values, problem.interior,
                          stencil_offsets(problem.grid, problem.directions))
    return GridFunction(problem.grid, out)


def convex_envelope_1d(values) -> np.ndarray:
    """Lower convex hull of the sequence (i, values[i]) evaluated at every index."""
    y = np.ascontiguousarray(values, dtype=np.float64)
    if y.size < 2:
        raise ValueError("need at least two values")
    out = np.empty_like(y)
    _kernels.lower_hull(y, y.size, out, np.empty(y.size, dtype=np.int64))
    return out


class _LineData:
    """Run starts per direction, cached while they fit in ``cache_bytes``."""

    def __init__(self, problem: EnvelopeProblem, cache_bytes: int = 512 * 2 ** 20):
        grid = problem.grid
        self.problem = problem
        self.offsets = stencil_offsets(grid, problem.directions)
        self.maxlen = max(grid.shape)
        self.cached = {}
        used = 0
        for k, o in enumerate(self.offsets):
            starts = _kernels.run_starts(problem.classes, o, problem.interior)
            used += starts.nbytes
            if used > cache_bytes:
                break
            self.cached[k] = starts

    def starts(self, k):
        s = self.cached.get(k)
        if s is None:
            s = _kernels.run_starts(self.problem.classes, self.offsets[k], self.problem.interior)
        return s


def line_sweep(u: GridFunction, problem: EnvelopeProblem, v) -> GridFunction:
    """Convexify along every line in direction ``v``; returns a new grid function."""
    out = u.copy()
    o = problem.grid.flat_offset(v)
    starts = _kernels.run_starts(problem.classes, o, problem.interior)
    _kernels.line_sweep(out.values, problem.classes, starts, o, max(problem.grid.shape))
    return out


def _line_cycle(u, problem, data: _LineData) -> float:
    change = 0.0
    for k, o in enumerate(data.offsets):
        change = max(change, _kernels.line_sweep(u, problem.classes, data.starts(k), o,
                                                  data.maxlen))
    return change


def _finish(problem, u, it, change, t0, strategy, converged, config, sweeps):
    sol = GridFunction(problem.grid, u)
    res = SolveResult(sol, it, float(change), residual(sol, problem), time.perf_counter() - t0,
                      strategy, converged, sweeps)
    logger.info("%s: %d iterations, change %.3g, residual %.3g, %.2fs", strategy, it, change,
                res.final_residual.max_residual, res.wall_time)
    if not converged and config.raise_on_failure:
        raise MaxIterationsExceeded(res)
    return res


def _fixed_point_loop(u, problem, config, budget, gauss_seidel):
    g = problem.obstacle.values
    interior = problem.interior
    offsets = stencil_offsets(problem.grid, problem.directions)
    other = u.copy()
    change = math.inf
    it = 0
    while it < budget:
        it += 1
        if gauss_seidel:
            change = _kernels.gauss_seidel_sweep(u, g, interior, offsets)
        else:
            change = _kernels.jacobi_sweep(u, other, g, interior, offsets)
            u, other = other, u
        if change <= config.tol:
            break
    return u, it, change


def solve_fixed_point(problem: EnvelopeProblem, config: SolverConfig | None = None,
                      initial: GridFunction | None = None) -> SolveResult:
    config = config or SolverConfig(strategy="jacobi")
    t0 = time.perf_counter()
    u = (initial or problem.initial_iterate()).values.copy()
    gs = config.strategy == "gauss_seidel"
    u, it, change = _fixed_point_loop(u, problem, config, config.max_iterations, gs)
    strategy = "gauss_seidel" if gs else "jacobi"
    return _finish(problem, u, it, change, t0, strategy, change <= config.tol, config,
                   {strategy: it})


def solve_line(problem: EnvelopeProblem, config: SolverConfig | None = None,
               initial: GridFunction | None = None) -> SolveResult:
    config = config or SolverConfig(strategy="line")
    t0 = time.perf_counter()
    u = (initial or problem.initial_iterate()).values.copy()
    data = _LineData(problem)
    change = math.inf
    it = 0
    while it < config.max_iterations:
        it += 1
        change = _line_cycle(u, problem, data)
        if change <= config.tol:
            break
    return _finish(problem, u, it, change, t0, "line", change <= config.tol, config,
                   {"line_cycles": it})


def solve_hybrid(problem: EnvelopeProblem, config: SolverConfig | None = None,
                 initial: GridFunction | None = None) -> SolveResult:
    """Alternate full line cycles with ~1/h Jacobi sweeps, then polish by fixed-point iteration."""
    config = config or SolverConfig(strategy="hybrid")
    t0 = time.perf_counter()
    inner = config.hybrid_inner or math.ceil(1.0 / problem.h)
    u = (initial or problem.initial_iterate()).values.copy()
    data = _LineData(problem)
    g = problem.obstacle.values
    offsets = stencil_offsets(problem.grid, problem.directions)
    other = u.copy()
    cycles = jac = 0
    change = math.inf
    for _ in range(config.hybrid_outer):
        cycles += 1
        change = _line_cycle(u, problem, data)
        for _ in range(inner):
            jac += 1
            change = _kernels.jacobi_sweep(u, other, g, problem.interior, offsets)
            u, other = other, u
            if change <= config.tol:
                break
        if change <= config.tol:
            break
    budget = max(config.max_iterations - cycles - jac, 0)
    polish = 0
    if change > config.tol:
        u, polish, change = _fixed_point_loop(u, problem, config, budget, gauss_seidel=True)
    return _finish(problem, u, cycles + jac + polish, change, t0, "hybrid",
                   change <= config.tol, config,
                   {"line_cycles": cycles, "jacobi": jac, "gauss_seidel": polish})


def solve(problem: EnvelopeProblem, config: SolverConfig | None = None,
          initial: GridFunction | None = None) -> SolveResult:
    config = config or SolverConfig()
    if config.strategy in ("jacobi", "gauss_seidel"):
        return solve_fixed_point(problem, config, initial)
    if config.strategy == "line":
        return solve_line(problem, config, initial)
    return solve_hybrid(problem, config, initial)


def set_threads(n: int | None) -> None:
    import numba
    if n:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
