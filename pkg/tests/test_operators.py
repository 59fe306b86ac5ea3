import numpy as np
import pytest
from hypothesis import given, strategies as st

from r1ce.directions import parse_directions
from r1ce.grid import GridFunction, build_grid
from r1ce.operators import (StencilOutOfGrid, complementarity, lambda_h, lambda_h_field,
                            residual, second_difference, translation_check)
from r1ce.oracle import lambda_bruteforce

from _support import random_problem


@pytest.mark.parametrize("dim,tag", [(2, "v16"), (3, "d24"), (4, "rc64")])
def test_quadratic_gives_two(dim, tag):
    dset = parse_directions(tag)
    g = build_grid(dim, (-1.0, 1.0), 5 if dim == 4 else 7, dset.width)
    u = GridFunction.from_function(g, lambda x: (x ** 2).sum(axis=-1))
    centre = g.index_of(np.zeros(dim))
    for v in dset.vectors:
        assert second_difference(u, centre, v) == pytest.approx(2.0, abs=1e-12)


def test_affine_gives_zero():
    g = build_grid(2, (-1.0, 1.0), 9, 2)
    u = GridFunction.from_function(g, lambda x: 3.0 * x[..., 0] - 0.5 * x[..., 1] + 1.0)
    for v in parse_directions("v8").vectors:
        assert second_difference(u, g.index_of([0.25, -0.5]), v) == pytest.approx(0.0, abs=1e-12)


def test_quartic_by_hand():
    g = build_grid(2, (0.0, 2.0), 5, 1)
    u = GridFunction.from_function(g, lambda x: x[..., 0] ** 4)
    by_hand = (1.5 ** 4 - 2.0 + 0.5 ** 4) / 0.25
    assert second_difference(u, g.index_of([1.0, 0.0]), (1, 0)) == by_hand


def test_stencil_out_of_grid():
    g = build_grid(2, (0.0, 1.0), 5, 0)
    u = GridFunction(g, np.zeros(g.size))
    with pytest.raises(StencilOutOfGrid):
        second_difference(u, 0, (1, 0))


def test_lambda_saddle_picks_second_axis():
    g = build_grid(2, (-1.0, 1.0), 9, 1)
    u = GridFunction.from_function(g, lambda x: x[..., 0] ** 2 - x[..., 1] ** 2)
    val, arg = lambda_h(u, g.index_of([0.0, 0.0]), parse_directions("d2"))
    assert val == pytest.approx(-2.0) and arg == 1
    val, arg = lambda_h(GridFunction.from_function(g, lambda x: (x ** 2).sum(-1)),
                        g.index_of([0.0, 0.0]), parse_directions("d4"))
    assert val == pytest.approx(2.0) and arg == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_lambda_field_matches_bruteforce_exactly(seed):
    dset = parse_directions("v8")
    g = build_grid(2, (-1.0, 1.0), 9, dset.width)
    u = GridFunction(g, np.random.default_rng(seed).normal(size=g.size))
    interior = np.array([g.flat_index((i, j)) for i in range(2, 11) for j in range(2, 11)])
    field, _ = lambda_h_field(u, dset, interior)
    for k, x in enumerate(interior):
        assert field[k] == lambda_bruteforce(u, x, dset)
        assert field[k] == lambda_h(u, x, dset)[0]


def test_residual_of_convex_obstacle_is_zero():
    p = random_problem(0, 11, "d4", values=np.zeros(1))
    p.obstacle.values[:] = p.floor.values
    rep = residual(p.obstacle, p)
    assert rep.max_residual <= 1e-12 and rep.max_convexity_violation <= 1e-12


def test_residual_of_constant_interior_is_positive():
    p = random_problem(0, 11, "d2", values=np.zeros(1))
    u = p.obstacle.copy()
    u.values[p.interior] = p.obstacle.values.min()
    assert residual(u, p).max_residual > 0.1


def test_translation_examples():
    dset = parse_directions("d4")
    g = build_grid(2, (-1.0, 1.0), 9, 1)
    interior = np.array([g.flat_index((i, j)) for i in range(1, 10) for j in range(1, 10)])
    zero = GridFunction(g, np.zeros(g.size))
    x = g.all_coords()
    lam, _ = lambda_h_field(GridFunction(g, 1.5 * (x ** 2).sum(-1)), dset, interior)
    np.testing.assert_allclose(lam, 3.0, atol=1e-12)
    assert translation_check(zero, 0.0, dset, interior)
    rnd = GridFunction(g, np.random.default_rng(3).normal(size=g.size))
    assert translation_check(rnd, -1.0, dset, interior)


@given(st.integers(0, 10 ** 6))
def test_complementarity_sign(seed):
    from r1ce.solvers import SolverConfig, solve
    p = random_problem(seed, 9, "d4")
    u = solve(p, SolverConfig(tol=1e-12)).solution
    c = complementarity(u, p)
    assert np.abs(c).max() <= 1e-9
