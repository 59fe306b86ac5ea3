"""Directional second differences, the wide-stencil minimum and the obstacle-scheme residual."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .directions import DirectionSet
from .grid import GridFunction, UniformGrid, shift, OUT_OF_GRID


class StencilOutOfGrid(IndexError):
    pass


@dataclass
class ResidualReport:
    max_residual: float
    max_convexity_violation: float
    argmin_direction: np.ndarray

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual,
                "max_convexity_violation": self.max_convexity_violation}


def stencil_offsets(grid: UniformGrid, dset: DirectionSet) -> np.ndarray:
    if dset.dim != grid.dim:
        raise ValueError(f"direction set is {dset.dim}-D, grid is {grid.dim}-D")
    return np.array([grid.flat_offset(v) for v in dset.vectors], dtype=np.int64)


def second_difference(u: GridFunction, point: int, v) -> float:
    grid = u.grid
    plus = shift(grid, point, v, 1)
    minus = shift(grid, point, v, -1)
    if plus == OUT_OF_GRID or minus == OUT_OF_GRID:
        raise StencilOutOfGrid(f"stencil {tuple(v)} leaves the grid at {grid.multi_index(point)}")
    vals = u.values
    n2 = float(np.dot(v, v))
    return (vals[plus] + vals[minus] - 2.0 * vals[point]) / (grid.spacing ** 2 * n2)


def lambda_h(u: GridFunction, point: int, dset: DirectionSet) -> tuple[float, int]:
    """Minimum second difference over the set and the first direction attaining it."""
    best, arg = np.inf, 0
    for k, v in enumerate(dset.vectors):
        s = second_difference(u, point, v)
        if s < best:
            best, arg = s, k
    return best, arg


def lambda_h_field(u: GridFunction, dset: DirectionSet, interior: np.ndarray):
    grid = u.grid
    offsets = stencil_offsets(grid, dset)
    norms2 = (dset.vectors.astype(float) ** 2).sum(axis=1)
    return _kernels.lambda_field(u.values, np.asarray(interior, dtype=np.int64), offsets,
                                 norms2, grid.spacing ** 2)


def residual(u: GridFunction, problem) -> ResidualReport:
    """Max-norm of F^{W,h}[u]: max{u-g, -lambda^h} inside, u-g elsewhere."""
    g = problem.obstacle.values
    interior = problem.interior
    lam, arg = lambda_h_field(u, problem.directions, interior)
    inner = np.maximum(u.values[interior] - g[interior], -lam)
    rest = np.flatnonzero(problem.classes != 0)
    outer = u.values[rest] - g[rest]
    max_res = max(np.abs(inner).max(initial=0.0), np.abs(outer).max(initial=0.0))
    violation = np.maximum(0.0, -lam).max(initial=0.0)
    return ResidualReport(float(max_res), float(violation), arg)


def complementarity(u: GridFunction, problem) -> np.ndarray:
    """min(g - u, lambda^h(u)) at every interior point; zero at an exact solution."""
    lam, _ = lambda_h_field(u, problem.directions, problem.interior)
    g = problem.obstacle.values[problem.interior]
    return np.minimum(g - u.values[problem.interior], lam)


def translation_check(u: GridFunction, c: float, dset: DirectionSet, interior,
                      atol: float = 1e-12) -> bool:
    """Check lambda^h(u + c|x|^2/2) = lambda^h(u) + c at every interior point."""
    x = u.grid.all_coords()
    q = 0.5 * (x ** 2).sum(axis=1)
    shifted = GridFunction(u.grid, u.values + c * q)
    base, _ = lambda_h_field(u, dset, interior)
    moved, _ = lambda_h_field(shifted, dset, interior)
    return bool(np.all(np.abs(moved - (base + c)) <= atol))
