"""Compiled inner loops.  All arrays are flat row-major over the padded grid."""

import warnings

import numpy as np
from numba import njit, prange

# numba falls back to another threading layer when the system TBB is too old
warnings.filterwarnings("ignore", message="The TBB threading layer")

INTERIOR = 0


@njit(cache=True, parallel=True)
def jacobi_sweep(u, out, g, interior, offsets):
    """out[x] = min(g[x], min_v (u[x+v] + u[x-v]) / 2) on interior points; returns max change."""
    n = interior.shape[0]
    nd = offsets.shape[0]
    change = np.zeros(n)
    for k in prange(n):
        i = interior[k]
        m = g[i]
        for d in range(nd):
            o = offsets[d]
            s = 0.5 * (u[i + o] + u[i - o])
            if s < m:
                m = s
        out[i] = m
        change[k] = abs(m - u[i])
    return change.max() if n > 0 else 0.0


@njit(cache=True)
def gauss_seidel_sweep(u, g, interior, offsets):
    change = 0.0
    nd = offsets.shape[0]
    for k in range(interior.shape[0]):
        i = interior[k]
        m = g[i]
        for d in range(nd):
            o = offsets[d]
            s = 0.5 * (u[i + o] + u[i - o])
            if s < m:
                m = s
        c = abs(m - u[i])
        if c > change:
            change = c
        u[i] = m
    return change


@njit(cache=True)
def lower_hull(y, n, out, hull):
    """Lower convex hull of points (j, y[j]), j < n, evaluated at every j (monotone chain).

    ``hull`` is integer scratch space of length >= n.
    """
    top = 0
    for j in range(n):
        while top >= 2:
            a = hull[top - 2]
            b = hull[top - 1]
            # drop b unless it lies strictly below the chord a -> j
            if (y[b] - y[a]) * (j - a) >= (y[j] - y[a]) * (b - a):
                top -= 1
            else:
                break
        hull[top] = j
        top += 1
    for s in range(top - 1):
        a = hull[s]
        b = hull[s + 1]
        out[a] = y[a]
        for j in range(a + 1, b):
            c = y[a] + (y[b] - y[a]) * (j - a) / (b - a)
            out[j] = c if c < y[j] else y[j]
    out[hull[top - 1]] = y[hull[top - 1]]


@njit(cache=True)
def run_starts(classes, offset, interior):
    """Interior points whose predecessor along ``offset`` is not interior."""
    count = 0
    for k in range(interior.shape[0]):
        i = interior[k]
        if classes[i - offset] != INTERIOR:
            count += 1
    starts = np.empty(count, dtype=np.int64)
    count = 0
    for k in range(interior.shape[0]):
        i = interior[k]
        if classes[i - offset] != INTERIOR:
            starts[count] = i
            count += 1
    return starts


@njit(cache=True)
def _convexify_run(u, classes, first, offset, y, out, hull):
    n = 0
    i = first
    y[n] = u[i]
    n += 1
    i += offset
    while classes[i] == INTERIOR:
        y[n] = u[i]
        n += 1
        i += offset
    y[n] = u[i]
    n += 1
    lower_hull(y, n, out, hull)
    c = 0.0
    i = first + offset
    for j in range(1, n - 1):
        d = out[j] - y[j]
        if -d > c:
            c = -d
        u[i] = out[j]
        i += offset
    return c


@njit(cache=True, parallel=True)
def line_sweep(u, classes, starts, offset, maxlen):
    """Convexify ``u`` along every maximal run of interior points in one direction.

    The non-interior neighbours bracketing each run are held fixed.  Runs are
    disjoint, so chunks of runs are processed independently.  Returns the max change.
    """
    ns = starts.shape[0]
    nchunks = min(ns, 256)
    change = np.zeros(nchunks)
    for c in prange(nchunks):
        y = np.empty(maxlen + 2)
        out = np.empty(maxlen + 2)
        hull = np.empty(maxlen + 2, dtype=np.int64)
        lo = c * ns // nchunks
        hi = (c + 1) * ns // nchunks
        best = 0.0
        for r in range(lo, hi):
            d = _convexify_run(u, classes, starts[r] - offset, offset, y, out, hull)
            if d > best:
                best = d
        change[c] = best
    return change.max() if ns > 0 else 0.0


@njit(cache=True)
def lambda_field(u, interior, offsets, norms2, h2):
    """min_v D_vv u and its first argmin at every interior point."""
    n = interior.shape[0]
    val = np.empty(n)
    arg = np.empty(n, dtype=np.int64)
    for k in range(n):
        i = interior[k]
        best = np.inf
        bi = 0
        for d in range(offsets.shape[0]):
            o = offsets[d]
            s = (u[i + o] + u[i - o] - 2.0 * u[i]) / (h2 * norms2[d])
            if s < best:
                best = s
                bi = d
        val[k] = best
        arg[k] = bi
    return val, arg
