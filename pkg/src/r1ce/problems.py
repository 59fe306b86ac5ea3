"""Example obstacle problems: energies, well sets, embeddings and problem assembly.

Every problem satisfies the standing assumption on the obstacle: a
D-convex floor ``g0`` lies below ``g`` inside and coincides with it on the
boundary and padding layers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .directions import DirectionSet, parse_directions
from .grid import (GridFunction, PointClass, UniformGrid, build_grid, classify_points,
                   closed_box)


class ProblemError(ValueError):
    pass


class UnknownTag(ProblemError):
    pass


class FloorNotBelow(ProblemError):
    pass


class EmptyWellSet(ProblemError):
    pass


# -- embeddings of 2x2 matrices as grid coordinates -----------------------------

@dataclass(frozen=True)
class Embedding:
    name: str
    dim: int

    def to_coords(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=float).reshape(-1, 2, 2)
        if self.name == "full":
            out = m.reshape(-1, 4)
        elif self.name == "upper":
            out = np.stack([m[:, 0, 0], m[:, 0, 1], m[:, 1, 1]], axis=1)
        elif self.name == "diagonal":
            out = np.stack([m[:, 0, 0], m[:, 1, 1]], axis=1)
        elif self.name == "symmetric":
            # [[x+z, z], [z, y+z]]
            z = m[:, 0, 1]
            out = np.stack([m[:, 0, 0] - z, m[:, 1, 1] - z, z], axis=1)
        else:
            raise ProblemError(self.name)
        return out

    def to_matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        m = np.zeros((len(x), 2, 2))
        if self.name == "full":
            m = x.reshape(-1, 2, 2).copy()
        elif self.name == "upper":
            m[:, 0, 0], m[:, 0, 1], m[:, 1, 1] = x[:, 0], x[:, 1], x[:, 2]
        elif self.name == "diagonal":
            m[:, 0, 0], m[:, 1, 1] = x[:, 0], x[:, 1]
        elif self.name == "symmetric":
            m[:, 0, 0] = x[:, 0] + x[:, 2]
            m[:, 0, 1] = m[:, 1, 0] = x[:, 2]
            m[:, 1, 1] = x[:, 1] + x[:, 2]
        return m


EMBEDDINGS = {"full": Embedding("full", 4), "upper": Embedding("upper", 3),
              "diagonal": Embedding("diagonal", 2), "symmetric": Embedding("symmetric", 3)}


# -- energies ------------------------------------------------------------------

def _frob2(m):
    m = np.asarray(m, dtype=float)
    return (m.reshape(*m.shape[:-2], 4) ** 2).sum(axis=-1)


def _det(m):
    m = np.asarray(m, dtype=float)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def kohn_strang_energy(m):
    n2 = _frob2(m)
    return np.where(n2 == 0.0, 0.0, 1.0 + n2)


def kohn_strang_exact(m):
    n2 = _frob2(m)
    d = np.abs(_det(m))
    rho = np.sqrt(n2 + 2.0 * d)
    return np.where(rho >= 1.0, 1.0 + n2, 2.0 * rho - 2.0 * d)


def kohn_strang_smoothed(m):
    n = np.sqrt(_frob2(m))
    return np.where(n >= np.sqrt(2.0) - 1.0, 1.0 + n ** 2, 2.0 * np.sqrt(2.0) * n)


def kohn_strang_floor(m):
    """Convex envelope of the Kohn-Strang energy: 2|M| inside the unit ball, 1+|M|^2 outside."""
    n = np.sqrt(_frob2(m))
    return np.where(n >= 1.0, 1.0 + n ** 2, 2.0 * n)


def multiwell_obstacle(wells, m):
    """Squared Frobenius distance from ``m`` to the nearest well."""
    wells = np.asarray(wells, dtype=float)
    if wells.size == 0:
        raise EmptyWellSet("well set is empty")
    m = np.asarray(m, dtype=float)
    # one well at a time keeps peak memory at a few copies of m
    best = np.array(_frob2(m - wells[0]))
    for w in wells[1:]:
        np.minimum(best, _frob2(m - w), out=best)
    return best[()]


def xyz_energy(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] * x[..., 1] * x[..., 2]


A1 = np.array([[-1.0, 0.0], [0.0, -3.0]])
A2 = np.array([[-3.0, 0.0], [0.0, 1.0]])
K4 = [A1, A2, -A1, -A2]
A5_SIX = np.array([[0.0, 3.0], [0.0, 0.0]])
K6 = K4 + [A5_SIX, -A5_SIX]
A5_EIGHT = np.array([[0.0, -2.0], [-1.0, 0.0]])
A6_EIGHT = np.array([[0.0, 1.0], [-2.0, 0.0]])
K8 = K4 + [A5_EIGHT, A6_EIGHT, -A5_EIGHT, -A6_EIGHT]


# -- problem ---------------------------------------------------------------------

@dataclass
class EnvelopeProblem:
    grid: UniformGrid
    directions: DirectionSet
    obstacle: GridFunction
    floor: GridFunction
    classes: np.ndarray
    problem_id: str
    embedding: Embedding | None = None
    wells: list | None = None
    analytic_envelope: Callable | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.interior = np.flatnonzero(self.classes == PointClass.INTERIOR).astype(np.int64)

    @property
    def h(self) -> float:
        return self.grid.spacing

    def initial_iterate(self) -> GridFunction:
        return GridFunction(self.grid, np.maximum(self.obstacle.values, self.floor.values))

    def well_indices(self) -> list[int]:
        if not self.wells:
            return []
        coords = self.embedding.to_coords(np.array(self.wells))
        return [self.grid.index_of(c) for c in coords]

    def with_directions(self, dset: DirectionSet) -> "EnvelopeProblem":
        """Same obstacle data on the same grid with a (narrower or equal) direction set."""
        if dset.width > self.grid.pad_cells:
            raise ProblemError("direction set is wider than the grid padding")
        return EnvelopeProblem(self.grid, dset, self.obstacle, self.floor, self.classes,
                               self.problem_id, self.embedding, self.wells,
                               self.analytic_envelope, {**self.params, "directions": dset.id})

    def manifest(self) -> dict:
        return {"problem_id": self.problem_id, **self.grid.header(), "spacing": self.h,
                "directions": self.directions.id, **self.params}


def assemble(grid: UniformGrid, dset: DirectionSet, g_raw: np.ndarray, g0: np.ndarray,
             problem_id: str, omega=None, **kw) -> EnvelopeProblem:
    """Clamp the obstacle onto the floor and pin boundary/padding rows to the floor."""
    if dset.width > grid.pad_cells:
        raise ProblemError(f"pad_cells={grid.pad_cells} < stencil width {dset.width}")
    classes = classify_points(grid, omega)
    g = np.maximum(g_raw, g0)
    outside = classes != PointClass.INTERIOR
    g[outside] = g0[outside]
    if not np.all(np.isfinite(g)):
        raise ProblemError("obstacle is not finite")
    return EnvelopeProblem(grid, dset, GridFunction(grid, g), GridFunction(grid, g0), classes,
                           problem_id, **kw)


def _centered_grid(dim, n, h, pad):
    half = 0.5 * h * (n - 1)
    return build_grid(dim, (-half, half), n, pad)


def _well_problem(tag, wells, embedding, dset, n, bounds, spacing, pad, floor, default_h):
    emb = EMBEDDINGS[embedding]
    pad = dset.width if pad is None else pad
    if bounds is not None:
        grid = build_grid(emb.dim, bounds, n, pad)
    else:
        grid = _centered_grid(emb.dim, n, spacing or default_h, pad)
    x = grid.all_coords()
    m = emb.to_matrix(x)
    g_raw = multiwell_obstacle(wells, m)
    wc = emb.to_coords(np.array(wells))
    lo, hi = grid.lower, np.array([b[1] for b in grid.bounds])
    if np.any(wc <= lo) or np.any(wc >= hi):
        raise ProblemError(f"wells of {tag} do not lie inside the grid bounds")
    a, b, center = _floor_params(floor, wc)
    g0 = a * ((x - center) ** 2).sum(axis=1) + b
    at_wells = a * ((wc - center) ** 2).sum(axis=1) + b
    if np.any(at_wells > 1e-12):
        raise FloorNotBelow(f"floor is positive at a well ({at_wells.max():.3g}); "
                            "it would lift the minimal level set")
    return assemble(grid, dset, g_raw, g0, tag, embedding=emb, wells=[np.array(w) for w in wells],
                    params={"floor": {"a": a, "b": b, "center": list(map(float, center))}})


def _floor_params(floor, well_coords):
    floor = floor or {}
    a = float(floor.get("a", 1.0))
    center = np.asarray(floor.get("center", np.zeros(well_coords.shape[1])), dtype=float)
    b = floor.get("b")
    if b is None:
        b = -a * ((well_coords - center) ** 2).sum(axis=1).max()
    return a, float(b), center


def four_gradient_bounds(n: int) -> tuple[float, float]:
    """n points of spacing 7/n starting at -3.5; keeps the wells on the grid for n % 14 == 0."""
    h = 7.0 / n
    return (-3.5, -3.5 + h * (n - 1))


PROBLEM_TAGS = ("kohn_strang", "kohn_strang_smoothed", "four_gradient", "synthetic_four",
                "six_gradient", "xyz", "eight_gradient", "custom")


def build_problem(tag: str, n: int = 29, directions: DirectionSet | str | None = None,
                  bounds=None, spacing: float | None = None, pad: int | None = None,
                  floor: dict | None = None, custom: dict | None = None,
                  xyz_closed: bool = True) -> EnvelopeProblem:
    """Assemble one of the built-in problems on an ``n``-points-per-axis grid.

    Default domains: four_gradient/synthetic_four use ``n`` points of spacing
    ``7/n`` from -3.5; Kohn-Strang and eight_gradient use spacing 0.25
    centred at 0; six_gradient uses spacing 0.1 centred at 0; xyz uses
    [-1, 1]^3.  ``bounds`` overrides the default.
    """
    tag = tag.replace("-", "_")
    if isinstance(directions, str):
        directions = parse_directions(directions)

    if tag in ("four_gradient", "synthetic_four"):
        dset = directions or parse_directions("d2" if tag == "four_gradient" else "d4")
        if bounds is None and spacing is None:
            bounds = four_gradient_bounds(n)
        return _well_problem(tag, K4, "diagonal", dset, n, bounds, spacing, pad, floor, None)
    if tag == "six_gradient":
        dset = directions or parse_directions("d7")
        return _well_problem(tag, K6, "upper", dset, n, bounds, spacing, pad, floor, 0.1)
    if tag == "eight_gradient":
        dset = directions or parse_directions("rc16")
        return _well_problem(tag, K8, "full", dset, n, bounds, spacing, pad, floor, 0.25)
    if tag == "custom":
        if custom is None:
            raise ProblemError("custom problem needs a JSON description")
        return build_custom(custom, n, directions, pad)
    if tag in ("kohn_strang", "kohn_strang_smoothed"):
        dset = directions or parse_directions("rc16")
        pad = dset.width if pad is None else pad
        grid = (build_grid(4, bounds, n, pad) if bounds is not None
                else _centered_grid(4, n, spacing or 0.25, pad))
        m = EMBEDDINGS["full"].to_matrix(grid.all_coords())
        energy = kohn_strang_energy if tag == "kohn_strang" else kohn_strang_smoothed
        exact = lambda x: kohn_strang_exact(EMBEDDINGS["full"].to_matrix(x))  # noqa: E731
        return assemble(grid, dset, energy(m), kohn_strang_floor(m), tag,
                        embedding=EMBEDDINGS["full"], analytic_envelope=exact)
    if tag == "xyz":
        dset = directions or parse_directions("d24")
        pad = dset.width if pad is None else pad
        grid = build_grid(3, bounds if bounds is not None else (-1.0, 1.0), n, pad)
        x = grid.all_coords()
        g0 = xyz_floor(x, grid.spacing)
        omega = closed_box(grid) if xyz_closed else None
        return assemble(grid, dset, xyz_energy(x), g0, tag, omega=omega,
                        embedding=EMBEDDINGS["symmetric"],
                        params={"closed_cube": xyz_closed})
    raise UnknownTag(f"unknown problem tag {tag!r}; choose from {PROBLEM_TAGS}")


def xyz_floor(x, h, rate_cells: float = 10.0, scale: float = 1.0):
    """Convex cutoff for the xyz example: at most -1 on the cube, exponentially large outside.

    g0 = -1 - 3s + s * sum_i exp(r (|x_i| - 1)), r = rate_cells / h.
    """
    r = rate_cells / h
    e = np.exp(r * (np.abs(x) - 1.0))
    return -1.0 - 3.0 * scale + scale * e.sum(axis=-1)


def build_custom(spec: dict, n: int, directions=None, pad=None) -> EnvelopeProblem:
    """Custom well problem from ``{wells, bounds, directions, floor, embedding}``."""
    wells = [np.asarray(w, dtype=float).reshape(2, 2) for w in spec.get("wells", [])]
    if not wells:
        raise EmptyWellSet("custom problem has no wells")
    dset = directions or parse_directions(spec.get("directions", "rc16"))
    embedding = spec.get("embedding", {2: "diagonal", 3: "upper", 4: "full"}[dset.dim])
    return _well_problem("custom", wells, embedding, dset, spec.get("n", n), spec.get("bounds"),
                         spec.get("spacing"), pad, spec.get("floor"), 0.25)


def load_custom(path) -> dict:
    return json.loads(Path(path).read_text())
