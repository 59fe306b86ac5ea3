"""Laminate extraction from the minimal level set of a computed envelope.

A laminate is grown as a binary tree on grid points of the level set ``K``:
each non-extreme node is split along one direction of the set, extended as
far as possible inside ``K`` on both sides, and the children inherit the
weights forced by the barycenter identity.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .directions import DirectionSet
from .grid import UniformGrid


class LaminateError(ValueError):
    pass


class EmptyLevelSet(LaminateError):
    pass


class NotInK(LaminateError):
    pass


class NoAdmissibleDirection(LaminateError):
    pass


class PointClassInK(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTREME = "extreme"


@dataclass
class PointSet:
    """A finite set of grid points with O(1) membership."""

    grid: UniformGrid
    members: np.ndarray
    threshold: float | None = None

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=np.int64)
        self._set = set(int(i) for i in self.members)
        self._multi = {}

    def __contains__(self, flat) -> bool:
        return int(flat) in self._set

    def __len__(self):
        return len(self._set)

    def multi(self, flat: int) -> np.ndarray:
        m = self._multi.get(flat)
        if m is None:
            m = np.array(self.grid.multi_index(flat))
            self._multi[flat] = m
        return m

    def step(self, flat: int, d, k: int = 1) -> int | None:
        """Flat index of x + k d, or None if it is not a member."""
        p = self.multi(int(flat)) + k * np.asarray(d)
        if np.any(p < 0) or np.any(p >= self.grid.shape):
            return None
        q = int(np.dot(p, self.grid.strides))
        return q if q in self._set else None

    def volume(self) -> float:
        return len(self) * self.grid.spacing ** self.grid.dim


DEFAULT_KAPPA = 1e-6


def extract_level_set(u, problem, kappa: float = DEFAULT_KAPPA) -> tuple[PointSet, PointSet]:
    """Minimal level set K = {u <= m + kappa h} and supporting points P = {u >= g - kappa h}.

    ``kappa * h`` has to exceed the solver error but stay under the smallest
    genuine gap above the minimum; with a loose threshold, points that are
    still relaxing leak into K as spurious extremes with no support.
    """
    values = u.solution.values if hasattr(u, "solution") else np.asarray(getattr(u, "values", u))
    g = problem.obstacle.values
    m = g.min()
    tol = kappa * problem.h
    interior = problem.interior
    k_members = interior[values[interior] <= m + tol]
    if k_members.size == 0:
        raise EmptyLevelSet(f"no interior point within {tol:g} of min g = {m:g}")
    p_members = k_members[values[k_members] >= g[k_members] - tol]
    return PointSet(problem.grid, k_members, m + tol), PointSet(problem.grid, p_members)


def is_connected(K: PointSet, x: int, d) -> bool:
    return K.step(x, d, 1) is not None and K.step(x, d, -1) is not None


def classify_in_K(K: PointSet, x: int, dset: DirectionSet) -> PointClassInK:
    if x not in K:
        raise NotInK(f"point {x} is not in K")
    hits = sum(is_connected(K, x, d) for d in dset.vectors)
    if hits == len(dset):
        return PointClassInK.INTERIOR
    if hits:
        return PointClassInK.BOUNDARY
    return PointClassInK.EXTREME


def _extent(K: PointSet, x: int, d, sign: int) -> int:
    k = 0
    while K.step(x, d, sign * (k + 1)) is not None:
        k += 1
    return k


def find_extreme_path(K: PointSet, x: int, dset: DirectionSet) -> list[int]:
    """Walk maximally along the first available positive direction until an extreme point."""
    if x not in K:
        raise NotInK(f"point {x} is not in K")
    path = [int(x)]
    while classify_in_K(K, path[-1], dset) is not PointClassInK.EXTREME:
        cur = path[-1]
        for d in dset.vectors:
            k = _extent(K, cur, d, +1)
            if k:
                path.append(K.step(cur, d, k))
                break
        if len(path) > len(K):
            raise LaminateError("extreme-point path did not terminate")
    return path


@dataclass
class LaminateNode:
    point: int
    weight: Fraction
    direction: int | None = None
    k_plus: int = 0
    k_minus: int = 0
    children: list["LaminateNode"] = field(default_factory=list)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


def extract_laminate(K: PointSet, barycenter: int, dset: DirectionSet, max_depth: int = 20,
                     initial_direction: int | None = None) -> LaminateNode:
    """Decompose ``barycenter`` into a direction-labelled tree of points of ``K``.

    Split priority at each node, among directions in which K is connected at
    the node (set order breaks ties): both maximal endpoints extreme, then
    one extreme and one boundary, then the first connected direction.
    """
    if barycenter not in K:
        raise NotInK(f"barycenter {barycenter} is not in K")
    cls_cache: dict[int, PointClassInK] = {}

    def cls(x):
        c = cls_cache.get(x)
        if c is None:
            c = cls_cache[x] = classify_in_K(K, x, dset)
        return c

    def grow(x, weight, depth, forced):
        node = LaminateNode(int(x), weight)
        if cls(x) is PointClassInK.EXTREME or depth >= max_depth:
            return node
        candidates = [k for k, d in enumerate(dset.vectors) if is_connected(K, x, d)]
        if forced is not None:
            if forced not in candidates:
                raise NoAdmissibleDirection(f"K is not connected along direction {forced} at root")
            candidates = [forced]
        if not candidates:
            raise NoAdmissibleDirection(f"no admissible split at point {x}")
        splits = []
        for k in candidates:
            d = dset.vectors[k]
            kp, km = _extent(K, x, d, +1), _extent(K, x, d, -1)
            xp, xm = K.step(x, d, kp), K.step(x, d, -km)
            splits.append((k, kp, km, xp, xm, cls(xp), cls(xm)))
        ext, bnd = PointClassInK.EXTREME, PointClassInK.BOUNDARY
        chosen = next((s for s in splits if s[5] is ext and s[6] is ext), None)
        if chosen is None:
            chosen = next((s for s in splits if {s[5], s[6]} == {ext, bnd}), splits[0])
        k, kp, km, xp, xm, _, _ = chosen
        node.direction, node.k_plus, node.k_minus = k, kp, km
        total = kp + km
        node.children = [grow(xp, weight * Fraction(km, total), depth + 1, None),
                         grow(xm, weight * Fraction(kp, total), depth + 1, None)]
        return node

    return grow(int(barycenter), Fraction(1), 0, initial_direction)


def support_weights(tree: LaminateNode, grid: UniformGrid, wells: list[int],
                    radius: float = 1.0) -> tuple[np.ndarray, float]:
    """Leaf mass within ``radius`` grid steps of each well, and its total."""
    wm = np.array([grid.multi_index(w) for w in wells], dtype=float)
    ups = np.zeros(len(wells))
    for leaf in tree.leaves():
        p = np.array(grid.multi_index(leaf.point), dtype=float)
        dist = np.linalg.norm(wm - p, axis=1)
        i = int(dist.argmin())
        if dist[i] <= radius:
            ups[i] += float(leaf.weight)
    return ups, float(ups.sum())


def leaf_barycenter(tree: LaminateNode, grid: UniformGrid) -> np.ndarray:
    """Exact weighted sum of leaf multi-indices (as Fractions)."""
    acc = [Fraction(0)] * grid.dim
    for leaf in tree.leaves():
        m = grid.multi_index(leaf.point)
        acc = [a + leaf.weight * c for a, c in zip(acc, m)]
    return np.array(acc, dtype=object)


# -- exports ---------------------------------------------------------------------

def to_dict(tree: LaminateNode, grid: UniformGrid, dset: DirectionSet) -> dict:
    def conv(node):
        out = {"point": list(grid.multi_index(node.point)),
               "coords": [float(c) for c in grid.coords(node.point)],
               "weight": float(node.weight)}
        if node.direction is not None:
            out["direction"] = [int(c) for c in dset.vectors[node.direction]]
            out["k_plus"], out["k_minus"] = node.k_plus, node.k_minus
            out["children"] = [conv(c) for c in node.children]
        return out
    return conv(tree)


def to_json(tree, grid, dset) -> str:
    return json.dumps(to_dict(tree, grid, dset), indent=1)


def to_dot(tree: LaminateNode, grid: UniformGrid, dset: DirectionSet) -> str:
    lines = ["digraph laminate {"]
    counter = iter(range(10 ** 9))

    def emit(node):
        nid = next(counter)
        coords = ",".join(f"{c:g}" for c in grid.coords(node.point))
        shape = "box" if not node.children else "ellipse"
        lines.append(f'  n{nid} [label="({coords})\\n{float(node.weight):.6g}", shape={shape}];')
        for c in node.children:
            cid = emit(c)
            d = ",".join(str(int(v)) for v in dset.vectors[node.direction])
            lines.append(f'  n{nid} -> n{cid} [label="({d})"];')
        return nid

    emit(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"


def leaves_csv(tree: LaminateNode, grid: UniformGrid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"x{i}" for i in range(grid.dim)] + ["weight"])
    for leaf in tree.leaves():
        w.writerow([f"{c:.10g}" for c in grid.coords(leaf.point)] + [f"{float(leaf.weight):.12g}"])
    return buf.getvalue()
