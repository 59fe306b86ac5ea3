import numpy as np
import pytest
from hypothesis import given, strategies as st

from r1ce.directions import from_vectors
from r1ce.grid import build_grid
from r1ce.oracle import hull_1d_bruteforce, ks_fixed_point
from r1ce.problems import assemble, build_problem
from r1ce.solvers import (MaxIterationsExceeded, SolverConfig, apply_T, convex_envelope_1d,
                          line_sweep, solve)

from _support import random_problem

STRATEGIES = ["jacobi", "gauss_seidel", "line", "hybrid"]


def line_problem(values, floor=0.0):
    """1-D problem with interior data ``values`` and both end points on the floor."""
    n = len(values) + 2
    grid = build_grid(1, (0.0, 1.0), n, 1)
    g = np.full(grid.size, floor, dtype=float)
    g[2:-2] = values
    return assemble(grid, from_vectors([(1,)], "e1"), g, np.full(grid.size, floor), "line")


def test_single_jacobi_sweep_on_hat():
    p = line_problem([1.0])
    assert apply_T(p.obstacle, p).values[2] == 0.0


def test_hat_iterates_decrease_to_hull():
    hat = 1.0 - np.abs(np.linspace(-1, 1, 7))
    p = line_problem(hat)
    u = p.obstacle
    for _ in range(500):
        nxt = apply_T(u, p)
        assert np.all(nxt.values <= u.values)
        u = nxt
    full = np.concatenate([[0.0], hat, [0.0]])
    np.testing.assert_allclose(u.values[1:-1], hull_1d_bruteforce(full), atol=1e-9)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_convex_obstacle_is_fixed(strategy):
    p = random_problem(0, 11, "d4", values=np.zeros(1))
    p.obstacle.values[:] = p.floor.values
    res = solve(p, SolverConfig(strategy=strategy))
    np.testing.assert_array_equal(res.solution.values, p.obstacle.values)
    if strategy in ("jacobi", "gauss_seidel"):
        assert res.iterations == 1


def test_convex_envelope_1d_examples():
    np.testing.assert_array_equal(convex_envelope_1d([0.0, 1.0, 0.0]), [0.0, 0.0, 0.0])
    convex = np.linspace(-2, 2, 9) ** 2
    np.testing.assert_array_equal(convex_envelope_1d(convex), convex)


@given(st.integers(0, 2 ** 32 - 1))
def test_convex_envelope_1d_matches_bruteforce(seed):
    y = np.random.default_rng(seed).normal(size=100)
    np.testing.assert_array_equal(convex_envelope_1d(y), hull_1d_bruteforce(y))


def test_line_sweep_on_hat_gives_chord():
    p = line_problem([0.5, 2.0, 0.5])
    out = line_sweep(p.obstacle, p, (1,))
    np.testing.assert_array_equal(out.values[2:5], [0.0, 0.0, 0.0])
    convex = line_problem([-0.5, -0.75, -0.5])
    np.testing.assert_array_equal(line_sweep(convex.obstacle, convex, (1,)).values,
                                  convex.obstacle.values)


def test_random_problem_matches_oracle():
    p = random_problem(11, 15, "d2")
    ref = ks_fixed_point(p.initial_iterate(), p.directions, p.interior).values.values
    for strategy in STRATEGIES:
        u = solve(p, SolverConfig(strategy=strategy, tol=1e-11)).solution.values
        assert np.abs(u - ref).max() <= 1e-8, strategy


def test_iteration_cap_raises_with_result():
    p = random_problem(3, 15, "d2")
    with pytest.raises(MaxIterationsExceeded) as err:
        solve(p, SolverConfig(strategy="jacobi", max_iterations=3))
    assert err.value.result.iterations == 3 and not err.value.result.converged
    res = solve(p, SolverConfig(strategy="jacobi", max_iterations=3, raise_on_failure=False))
    assert not res.converged


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(strategy="newton")
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    assert SolverConfig(strategy="gauss-seidel").strategy == "gauss_seidel"


def test_classic_example_line_cycles_and_residual():
    p = build_problem("four_gradient", n=43)
    res = solve(p, SolverConfig(strategy="line", tol=1e-8))
    assert res.iterations <= 50
    # lambda^h carries a 1/h^2, so an update below tol bounds the residual times h^2
    assert res.final_residual.max_residual * p.h ** 2 <= 10 * 1e-8


def test_thread_count_does_not_change_results():
    from r1ce.solvers import set_threads
    import numba
    p = random_problem(4, 21, "d4")
    set_threads(1)
    a = solve(p, SolverConfig(strategy="hybrid", tol=1e-10)).solution.values
    set_threads(numba.config.NUMBA_NUM_THREADS)
    b = solve(p, SolverConfig(strategy="hybrid", tol=1e-10)).solution.values
    np.testing.assert_array_equal(a, b)
