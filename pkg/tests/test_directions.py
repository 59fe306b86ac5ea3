import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from r1ce.directions import (DirectionError, UnsupportedLevel, UnsupportedTag, canonicalize,
                             devectorize, directional_resolution, from_vectors, parse_directions,
                             rank_one_sampler)


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=4).filter(any), st.integers(1, 5),
       st.sampled_from([1, -1]))
def test_canonicalize_collapses_multiples(v, k, sign):
    assert canonicalize([sign * k * x for x in v]) == canonicalize(v)


def test_canonical_form():
    assert canonicalize((0, -2, 4)) == (0, 1, -2)
    with pytest.raises(DirectionError):
        canonicalize((0, 0))


def test_from_vectors_dedups_and_keeps_order():
    d = from_vectors([(0, 1), (2, 0), (0, -3), (1, 0)])
    assert d.vectors.tolist() == [[0, 1], [1, 0]]


def test_from_vectors_needs_span():
    with pytest.raises(DirectionError):
        from_vectors([(1, 1), (-2, -2)])


@pytest.mark.parametrize("tag,size,dim,width", [
    ("d2", 2, 2, 1), ("d4", 4, 2, 1), ("d7", 7, 3, 1), ("d24", 24, 3, 15),
    ("v4", 4, 2, 1), ("v8", 8, 2, 2), ("v16", 16, 2, 3),
    ("rc16", 16, 4, 1), ("rc64", 64, 4, 4), ("rc144", 144, 4, 9), ("rc256", 256, 4, 9)])
def test_set_sizes(tag, size, dim, width):
    d = parse_directions(tag)
    assert (len(d), d.dim, d.width) == (size, dim, width)
    assert len({tuple(v) for v in d.vectors}) == size


@pytest.mark.parametrize("tag", ["rc16", "rc64", "rc144", "rc256"])
def test_rank_one_sets_devectorize_singular(tag):
    for v in parse_directions(tag).vectors:
        m = devectorize(v)
        assert m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 0


def test_d24_vectors_have_integer_norms():
    # every D24 direction is a Pythagorean quadruple
    for v in parse_directions("d24").vectors:
        n = np.sqrt((v.astype(float) ** 2).sum())
        assert n == round(n)


def test_parse_errors():
    with pytest.raises(UnsupportedLevel):
        parse_directions("rc32")
    with pytest.raises(UnsupportedTag):
        parse_directions("d5")


def test_load_from_file(tmp_path):
    p = tmp_path / "mine.json"
    p.write_text('{"id": "mine", "vectors": [[1, 0], [0, 1], [1, 2]]}')
    d = parse_directions(f"@{p}")
    assert d.id == "mine" and len(d) == 3
    assert from_vectors(d.vectors.tolist(), "x").to_json().startswith('{"id": "x"')


def test_planar_resolution_halves_largest_gap():
    # V8 angles leave a largest gap of atan(1/2) between (1,0) and (2,1)
    assert directional_resolution(parse_directions("v8"), samples=4096) == pytest.approx(
        0.5 * np.arctan(0.5), abs=1e-3)


def test_rank_one_resolution_improves_with_level():
    sampler = rank_one_sampler()
    res = [directional_resolution(parse_directions(t), sampler, samples=2048)
           for t in ("rc16", "rc64", "rc256")]
    assert res[0] > res[1] > res[2] > 0


def test_planar_lists():
    assert parse_directions("v4").vectors.tolist() == [[1, 0], [0, 1], [1, -1], [1, 1]]
    v8 = {tuple(v) for v in parse_directions("v8").vectors}
    assert {(2, 1), (1, 2), (1, -2), (2, -1)} <= v8
    v16 = {tuple(v) for v in parse_directions("v16").vectors}
    assert {(3, 1), (3, -2)} <= v16 and len(v16) == 16
    assert parse_directions("d2").vectors.tolist() == [[1, 0], [0, 1]]


@pytest.mark.parametrize("tag,expected", [("d2", np.pi / 4), ("v4", np.pi / 8)])
def test_planar_resolution_against_dense_sweep(tag, expected):
    assert directional_resolution(parse_directions(tag), samples=20001) == pytest.approx(
        expected, abs=1e-3)


def test_resolution_on_own_directions_is_zero():
    d = parse_directions("rc64")
    assert directional_resolution(d, d.unit_vectors()) == pytest.approx(0.0, abs=1e-7)


def test_d24_lies_on_the_cone():
    vecs = parse_directions("d24").vectors
    x, y, z = vecs.T
    assert np.all(x * y + y * z + x * z == 0)
    assert canonicalize((3, 6, -2)) in {canonicalize(p) for v in vecs
                                          for p in itertools.permutations(v)}
