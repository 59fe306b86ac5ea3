import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from r1ce import laminates as L
from r1ce.directions import parse_directions
from r1ce.grid import build_grid
from r1ce.problems import build_problem
from r1ce.solvers import SolverConfig, solve

from _support import random_problem

GRID = build_grid(2, (-1.0, 1.0), 15, 1)
D2, D4 = parse_directions("d2"), parse_directions("d4")


def pset(cells):
    return L.PointSet(GRID, [GRID.flat_index(c) for c in cells])


def box(lo, hi):
    return [(i, j) for i in range(lo, hi + 1) for j in range(lo, hi + 1)]


CROSS = [(8, j) for j in range(4, 13)] + [(i, 8) for i in range(4, 13)]


def test_classify_examples():
    single = pset([(5, 5)])
    assert L.classify_in_K(single, GRID.flat_index((5, 5)), D2) is L.PointClassInK.EXTREME
    full = pset(box(3, 10))
    assert L.classify_in_K(full, GRID.flat_index((6, 6)), D4) is L.PointClassInK.INTERIOR
    cross = pset(CROSS)
    assert L.classify_in_K(cross, GRID.flat_index((8, 12)), D2) is L.PointClassInK.EXTREME
    assert L.classify_in_K(cross, GRID.flat_index((8, 10)), D2) is L.PointClassInK.BOUNDARY
    with pytest.raises(L.NotInK):
        L.classify_in_K(cross, GRID.flat_index((1, 1)), D2)


def test_extreme_path_examples():
    seg = pset([(4, j) for j in range(3, 10)])
    end = GRID.flat_index((4, 9))
    assert L.find_extreme_path(seg, end, D2) == [end]
    assert L.find_extreme_path(seg, GRID.flat_index((4, 5)), D2) == [GRID.flat_index((4, 5)), end]


@st.composite
def connected_sets(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    cells = {(8, 8)}
    cur = (8, 8)
    for _ in range(draw(st.integers(1, 60))):
        di, dj = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.integers(4)]
        cur = (min(max(cur[0] + di, 1), 15), min(max(cur[1] + dj, 1), 15))
        cells.add(cur)
    return sorted(cells)


@given(connected_sets(), st.data())
def test_extreme_path_terminates_at_extreme(cells, data):
    K = pset(cells)
    start = GRID.flat_index(data.draw(st.sampled_from(cells)))
    path = L.find_extreme_path(K, start, D4)
    assert L.classify_in_K(K, path[-1], D4) is L.PointClassInK.EXTREME


@given(connected_sets(), st.data())
def test_laminate_preserves_barycenter_exactly(cells, data):
    K = pset(cells)
    root = data.draw(st.sampled_from(cells))
    tree = L.extract_laminate(K, GRID.flat_index(root), D4, max_depth=12)
    assert sum(leaf.weight for leaf in tree.leaves()) == 1
    assert [Fraction(c) for c in L.leaf_barycenter(tree, GRID)] == [Fraction(c) for c in root]
    for node in tree.nodes():
        if node.children:
            a, b = node.children
            assert a.weight + b.weight == node.weight


def test_extreme_root_is_single_node():
    K = pset(CROSS)
    tree = L.extract_laminate(K, GRID.flat_index((4, 8)), D2)
    assert tree.children == [] and tree.weight == 1


def test_split_priority_prefers_extreme_endpoints():
    # along d2 from the centre of the cross both endpoints are arm tips
    tree = L.extract_laminate(pset(CROSS), GRID.flat_index((8, 8)), D2)
    assert tree.direction == 0 and (tree.k_plus, tree.k_minus) == (4, 4)
    assert all(c.weight == Fraction(1, 2) for c in tree.children)


def test_forced_initial_direction():
    K = pset(CROSS)
    tree = L.extract_laminate(K, GRID.flat_index((8, 8)), D2, initial_direction=1)
    assert tree.direction == 1
    with pytest.raises(L.NoAdmissibleDirection):
        L.extract_laminate(K, GRID.flat_index((8, 8)), D4, initial_direction=2)


def test_support_weights_examples():
    w = [GRID.flat_index((3, 3)), GRID.flat_index((10, 10))]
    ups, bar = L.support_weights(L.LaminateNode(w[0], Fraction(1)), GRID, w)
    assert ups.tolist() == [1.0, 0.0] and bar == 1.0
    ups, bar = L.support_weights(L.LaminateNode(GRID.flat_index((6, 6)), Fraction(1)), GRID, w)
    assert bar == 0.0


def test_strictly_convex_obstacle_has_singleton_level_set():
    p = random_problem(0, 11, "d4", values=np.zeros(1))
    p.obstacle.values[:] = p.floor.values
    p.obstacle.values[p.grid.index_of([0.0, 0.0])] -= 0.01
    K, P = L.extract_level_set(p.obstacle, p)
    assert K.members.tolist() == [p.grid.index_of([0.0, 0.0])]
    assert P.members.tolist() == K.members.tolist()


def test_empty_level_set():
    p = random_problem(0, 9, "d2")
    with pytest.raises(L.EmptyLevelSet):
        L.extract_level_set(p.obstacle, p, kappa=-1.0)


def test_four_gradient_origin_laminate_exports():
    p = build_problem("four_gradient", n=28)
    res = solve(p, SolverConfig(tol=1e-10))
    K, P = L.extract_level_set(res, p)
    tree = L.extract_laminate(K, p.grid.index_of([0.0, 0.0]), p.directions)
    data = json.loads(L.to_json(tree, p.grid, p.directions))
    assert data["weight"] == 1.0 and data["direction"] in ([1, 0], [0, 1])
    dot = L.to_dot(tree, p.grid, p.directions)
    assert dot.startswith("digraph") and dot.count("->") == 2 * sum(
        1 for n in tree.nodes() if n.children)
    rows = L.leaves_csv(tree, p.grid).splitlines()
    assert rows[0] == "x0,x1,weight" and len(rows) == 1 + sum(1 for _ in tree.leaves())
    # supporting points are wells (up to the threshold) and lie in K
    assert set(P.members.tolist()) <= set(K.members.tolist())
