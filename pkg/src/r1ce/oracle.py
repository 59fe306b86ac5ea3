"""Brute-force reference computations, for tests only.

Nothing here shares code with the production kernels; everything is plain
Python/numpy and deliberately slow.  Keep grids at or below ~21 points per axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .directions import DirectionSet
from .grid import GridFunction


@dataclass
class OracleResult:
    values: GridFunction
    sweeps: int


def hull_1d_bruteforce(values) -> np.ndarray:
    """min of v_i and every chord (j, k) with j < i < k, evaluated at i."""
    y = [float(v) for v in values]
    n = len(y)
    if n < 2:
        raise ValueError("need at least two values")
    out = list(y)
    for i in range(n):
        for j in range(i):
            for k in range(i + 1, n):
                c = y[j] + (y[k] - y[j]) * (i - j) / (k - j)
                if c < out[i]:
                    out[i] = c
    return np.array(out)


def _line_points(shape, start, v):
    """All stored multi-indices start + k v (k any integer) in storage order along v."""
    pts = []
    p = np.array(start)
    while np.all(p - v >= 0) and np.all(p - v < shape):
        p = p - v
    while np.all(p >= 0) and np.all(p < shape):
        pts.append(tuple(p))
        p = p + v
    return pts


def ks_step(u: GridFunction, dset: DirectionSet, interior) -> GridFunction:
    """One Kohn-Strang step on grid lines: best two-point split of each interior value."""
    grid = u.grid
    vals = u.as_array()
    new = vals.copy()
    shape = np.array(grid.shape)
    for flat in interior:
        x = np.array(grid.multi_index(int(flat)))
        best = vals[tuple(x)]
        for v in dset.vectors:
            line = _line_points(shape, x, np.asarray(v))
            pos = line.index(tuple(x))
            for a in range(pos):
                for b in range(pos + 1, len(line)):
                    lam = (b - pos) / (b - a)
                    c = lam * vals[line[a]] + (1.0 - lam) * vals[line[b]]
                    if c < best:
                        best = c
        new[tuple(x)] = best
    return GridFunction(grid, new)


def ks_fixed_point(u0: GridFunction, dset: DirectionSet, interior, tol: float = 1e-13,
                   max_sweeps: int = 10_000) -> OracleResult:
    u = u0
    for sweep in range(1, max_sweeps + 1):
        nxt = ks_step(u, dset, interior)
        change = np.abs(nxt.values - u.values).max()
        u = nxt
        if change <= tol:
            return OracleResult(u, sweep)
    raise RuntimeError(f"Kohn-Strang oracle did not settle in {max_sweeps} sweeps")


def lambda_bruteforce(u: GridFunction, x: int, dset: DirectionSet) -> float:
    """Naive min of D_vv u(x) over both members of every +/- pair."""
    grid = u.grid
    vals = u.as_array()
    xm = np.array(grid.multi_index(int(x)))
    h = grid.spacing
    best = np.inf
    for v in dset.vectors:
        for w in (np.asarray(v), -np.asarray(v)):
            n2 = float(w @ w)
            d = (vals[tuple(xm + w)] + vals[tuple(xm - w)] - 2.0 * vals[tuple(xm)]) / (h ** 2 * n2)
            best = min(best, d)
    return best
