"""Grid direction sets: construction, canonical form and directional resolution."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import reduce
from math import gcd
from pathlib import Path

import numpy as np
from scipy.stats import qmc


class DirectionError(ValueError):
    pass


class UnsupportedLevel(DirectionError):
    pass


class UnsupportedTag(DirectionError):
    pass


class EmptySet(DirectionError):
    pass


def canonicalize(v) -> tuple[int, ...]:
    """Reduce an integer vector by its gcd and make its first nonzero entry positive."""
    v = [int(x) for x in v]
    g = reduce(gcd, (abs(x) for x in v), 0)
    if g == 0:
        raise DirectionError("zero vector is not a direction")
    v = [x // g for x in v]
    first = next(x for x in v if x != 0)
    if first < 0:
        v = [-x for x in v]
    return tuple(v)


@dataclass(frozen=True)
class DirectionSet:
    """One representative per +/- pair, in a fixed order that is part of the set's identity."""

    id: str
    vectors: np.ndarray
    resolution: float | None = None

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def width(self) -> int:
        return int(np.abs(self.vectors).max())

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def unit_vectors(self) -> np.ndarray:
        v = self.vectors.astype(float)
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def to_json(self) -> str:
        return json.dumps({"id": self.id, "vectors": self.vectors.tolist()})


def from_vectors(vectors, set_id: str = "custom", resolution=None) -> DirectionSet:
    """Canonicalize, drop collinear duplicates (keeping first occurrence) and check span."""
    seen: dict[tuple[int, ...], None] = {}
    for v in vectors:
        seen.setdefault(canonicalize(v), None)
    if not seen:
        raise EmptySet("direction set is empty")
    arr = np.array(list(seen), dtype=np.int64)
    if np.linalg.matrix_rank(arr.astype(float)) < arr.shape[1]:
        raise DirectionError(f"directions of {set_id!r} do not span R^{arr.shape[1]}")
    return DirectionSet(set_id, arr, resolution)


V4 = [(1, 0), (0, 1), (-1, 1), (1, 1)]
V8 = V4 + [(2, 1), (1, 2), (-1, 2), (-2, 1)]
V16 = V8 + [(3, 1), (3, 2), (2, 3), (1, 3), (-3, 1), (-3, 2), (-2, 3), (-1, 3)]
_PLANAR = {4: V4, 8: V8, 16: V16}

# V_8 plus the four width-3 vectors (3,1),(1,3),(-3,1),(-1,3); gives a 144-vector rank-one set.
V12 = V8 + [(3, 1), (1, 3), (-3, 1), (-1, 3)]


def build_planar_set(level: int) -> DirectionSet:
    if level not in _PLANAR:
        raise UnsupportedLevel(f"planar level must be 4, 8 or 16, got {level}")
    return from_vectors(_PLANAR[level], f"v{level}")


def outer_vec(a, b) -> tuple[int, ...]:
    """vec(a (x) b) in the layout (M11, M12, M21, M22)."""
    return tuple(int(x) for x in np.outer(a, b).ravel())


def rank_one_from_planar(planar, set_id: str) -> DirectionSet:
    return from_vectors([outer_vec(a, b) for a in planar for b in planar], set_id)


def build_rank_one_set(level: int) -> DirectionSet:
    k = {16: 4, 64: 8, 256: 16}.get(level)
    if k is None:
        raise UnsupportedLevel(f"rank-one level must be 16, 64 or 256, got {level}")
    return rank_one_from_planar(_PLANAR[k], f"rc{level}")


def build_rc144_guess() -> DirectionSet:
    return rank_one_from_planar(V12, "rc144")


# Upper-triangular embedding (x, y, z) <-> [[x, y], [0, z]].
_D7 = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, -1, 0), (0, 1, -1)]
_D24_SEEDS = [(1, 0, 0), (-1, 2, 2), (-2, 3, 6), (12, -3, 4), (-6, 10, 15)]


def _d24_vectors():
    out = []
    for seed in _D24_SEEDS:
        for perm in itertools.permutations(seed):
            out.append(perm)
    return out


def build_special_set(tag: str) -> DirectionSet:
    if tag == "d2":
        return from_vectors([(1, 0), (0, 1)], "d2")
    if tag == "d4":
        return from_vectors([(1, 0), (0, 1), (1, 1), (-1, 1)], "d4")
    if tag == "d7":
        return from_vectors(_D7, "d7")
    if tag == "d24":
        return from_vectors(_d24_vectors(), "d24")
    raise UnsupportedTag(f"unknown direction set tag {tag!r}")


def load_direction_set(path) -> DirectionSet:
    data = json.loads(Path(path).read_text())
    if isinstance(data, list):
        return from_vectors(data, Path(path).stem)
    return from_vectors(data["vectors"], data.get("id", "custom"))


def parse_directions(text: str) -> DirectionSet:
    """Resolve a CLI direction argument: a tag, ``rc144`` or ``@file.json``."""
    if text.startswith("@"):
        return load_direction_set(text[1:])
    if text.startswith("rc"):
        if text == "rc144":
            return build_rc144_guess()
        if not text[2:].isdigit():
            raise UnsupportedTag(f"unknown direction set tag {text!r}")
        return build_rank_one_set(int(text[2:]))
    if text.startswith("v") and text[1:].isdigit():
        return build_planar_set(int(text[1:]))
    return build_special_set(text)


# -- directional resolution ----------------------------------------------------

def sphere_sampler(dim: int):
    def sample(n, seed=0):
        from scipy.stats import norm
        q = qmc.Sobol(dim, scramble=True, seed=seed).random(n)
        z = norm.ppf(np.clip(q, 1e-12, 1 - 1e-12))
        return z / np.linalg.norm(z, axis=1, keepdims=True)
    return sample


def circle_sampler():
    def sample(n, seed=0):
        t = np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    return sample


def rank_one_sampler():
    """Unit rank-one 2x2 matrices vec(a (x) b) with |a| = |b| = 1."""
    def sample(n, seed=0):
        q = qmc.Sobol(2, scramble=True, seed=seed).random(n)
        a = np.pi * q[:, 0]
        b = 2 * np.pi * q[:, 1]
        ua = np.stack([np.cos(a), np.sin(a)], axis=1)
        ub = np.stack([np.cos(b), np.sin(b)], axis=1)
        return np.einsum("ni,nj->nij", ua, ub).reshape(n, 4)
    return sample


def directional_resolution(dset: DirectionSet, target_sampler=None, samples: int = 2 ** 14,
                           seed: int = 0) -> float:
    """Worst angle between a sampled target direction and its nearest set direction.

    Angles are taken modulo sign since stored sets are +/- collapsed.
    """
    if len(dset) == 0:
        raise EmptySet("empty direction set")
    if target_sampler is None:
        target_sampler = circle_sampler() if dset.dim == 2 else sphere_sampler(dset.dim)
    w = np.asarray(target_sampler(samples, seed) if callable(target_sampler) else target_sampler,
                   dtype=float)
    w = w / np.linalg.norm(w, axis=1, keepdims=True)
    cos = np.abs(w @ dset.unit_vectors().T).max(axis=1)
    return float(np.arccos(np.clip(cos, -1.0, 1.0)).max())


def devectorize(v) -> np.ndarray:
    return np.asarray(v).reshape(2, 2)
