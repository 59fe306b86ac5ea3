"""Uniform N-dimensional grids with stencil padding, grid functions and the GFD1 dump format.

Storage is a flat row-major array over the *padded* box.  A multi-index is
given in storage coordinates, so the in-bounds points along an axis have
indices ``pad_cells .. pad_cells + points_per_axis - 1``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

OUT_OF_GRID = -1
_MAX_POINTS = np.iinfo(np.int64).max


class GridError(ValueError):
    pass


class NonUniformSpacing(GridError):
    pass


class GridOverflow(GridError):
    pass


class PointClass(enum.IntEnum):
    INTERIOR = 0
    BOUNDARY = 1
    PADDING = 2


@dataclass(frozen=True)
class UniformGrid:
    dim: int
    bounds: tuple[tuple[float, float], ...]
    points_per_axis: tuple[int, ...]
    spacing: float
    pad_cells: int = 0
    shape: tuple[int, ...] = field(init=False)
    strides: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        shape = tuple(n + 2 * self.pad_cells for n in self.points_per_axis)
        strides = []
        acc = 1
        for n in reversed(shape):
            strides.append(acc)
            acc *= n
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "strides", tuple(reversed(strides)))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    def flat_index(self, multi) -> int:
        multi = tuple(int(i) for i in multi)
        for i, n in zip(multi, self.shape):
            if not 0 <= i < n:
                raise IndexError(f"multi-index {multi} outside stored grid {self.shape}")
        return int(sum(i * s for i, s in zip(multi, self.strides)))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.size:
            raise IndexError(f"flat index {flat} outside stored grid")
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def flat_offset(self, vector) -> int:
        """Flat-index displacement of one step along an integer grid vector."""
        return int(sum(int(v) * s for v, s in zip(vector, self.strides)))

    def coords(self, flat) -> np.ndarray:
        """Real coordinates of one flat index or an array of them."""
        idx = np.unravel_index(np.asarray(flat), self.shape)
        out = np.stack([self.bounds[a][0] + (idx[a] - self.pad_cells) * self.spacing
                        for a in range(self.dim)], axis=-1)
        return out

    def all_coords(self) -> np.ndarray:
        return self.coords(np.arange(self.size))

    def axis_coords(self, axis: int) -> np.ndarray:
        n = self.shape[axis]
        return self.bounds[axis][0] + (np.arange(n) - self.pad_cells) * self.spacing

    def index_of(self, point) -> int:
        """Flat index of the stored grid point nearest to a real coordinate."""
        point = np.asarray(point, dtype=float)
        multi = np.rint((point - self.lower) / self.spacing).astype(int) + self.pad_cells
        return self.flat_index(multi)

    def header(self) -> dict:
        return {"dim": self.dim, "bounds": [list(b) for b in self.bounds],
                "points_per_axis": list(self.points_per_axis), "pad_cells": self.pad_cells}


def build_grid(dim: int, bounds, points_per_axis, pad_cells: int = 0) -> UniformGrid:
    """Build a uniform grid; ``bounds`` and ``points_per_axis`` may be scalars or per-axis."""
    if not 1 <= dim <= 4:
        raise GridError(f"dimension must be in 1..4, got {dim}")
    if np.ndim(points_per_axis) == 0:
        points_per_axis = [points_per_axis] * dim
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim == 1:
        bounds = np.tile(bounds, (dim, 1))
    if bounds.shape != (dim, 2) or len(points_per_axis) != dim:
        raise GridError("bounds/points_per_axis do not match dim")
    points = tuple(int(n) for n in points_per_axis)
    if min(points) < 3:
        raise GridError("need at least 3 points per axis")
    if pad_cells < 0:
        raise GridError("pad_cells must be >= 0")
    widths = bounds[:, 1] - bounds[:, 0]
    if np.any(widths <= 0):
        raise GridError("degenerate bounds")
    spacings = widths / (np.array(points) - 1)
    if np.ptp(spacings) > 1e-12 * spacings.max():
        raise NonUniformSpacing(f"axes disagree on spacing: {spacings}")
    total = 1
    for n in points:
        total *= n + 2 * pad_cells
    if total > _MAX_POINTS:
        raise GridOverflow(f"{total} points exceed the index range")
    return UniformGrid(dim, tuple((float(a), float(b)) for a, b in bounds), points,
                       float(spacings[0]), int(pad_cells))


def in_bounds_mask(grid: UniformGrid) -> np.ndarray:
    p = grid.pad_cells
    mask = np.zeros(grid.shape, dtype=bool)
    mask[tuple(slice(p, p + n) for n in grid.points_per_axis)] = True
    return mask.ravel()


def open_box(grid: UniformGrid) -> Callable[[np.ndarray], np.ndarray]:
    """Membership predicate for the open box spanned by the grid bounds."""
    lo = grid.lower
    hi = np.array([b[1] for b in grid.bounds])
    eps = 1e-9 * grid.spacing

    def inside(x):
        return np.all((x > lo + eps) & (x < hi - eps), axis=-1)

    return inside


def closed_box(grid: UniformGrid) -> Callable[[np.ndarray], np.ndarray]:
    def inside(x):
        return np.ones(x.shape[:-1], dtype=bool)

    return inside


def classify_points(grid: UniformGrid, omega=None) -> np.ndarray:
    """Return an int8 array of :class:`PointClass` codes, one per stored point.

    ``omega`` maps an ``(npts, dim)`` coordinate array to a boolean mask; it
    defaults to the open box of the bounds, so the outermost in-bounds layer
    becomes boundary.
    """
    omega = omega or open_box(grid)
    classes = np.full(grid.size, PointClass.PADDING, dtype=np.int8)
    inb = np.flatnonzero(in_bounds_mask(grid))
    inside = np.asarray(omega(grid.coords(inb)), dtype=bool)
    classes[inb] = np.where(inside, PointClass.INTERIOR, PointClass.BOUNDARY)
    return classes


def shift(grid: UniformGrid, flat_index: int, grid_vector, steps: int = 1) -> int:
    """Index of ``x + steps*h*v`` or :data:`OUT_OF_GRID` if it leaves storage."""
    multi = np.array(grid.multi_index(flat_index)) + steps * np.asarray(grid_vector, dtype=int)
    if np.any(multi < 0) or np.any(multi >= np.array(grid.shape)):
        return OUT_OF_GRID
    return grid.flat_index(multi)


@dataclass
class GridFunction:
    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        if self.values.size != self.grid.size:
            raise GridError(f"expected {self.grid.size} values, got {self.values.size}")

    @classmethod
    def from_function(cls, grid: UniformGrid, fn) -> "GridFunction":
        return cls(grid, fn(grid.all_coords()))

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def at(self, point) -> float:
        return float(self.values[self.grid.index_of(point)])


# -- GFD1 dump -----------------------------------------------------------------

def write_gfd1(path, u: GridFunction, direction_set_id: str = "", problem_id: str = "",
               extra: dict | None = None) -> None:
    header = {"format": "GFD1", **u.grid.header(),
              "direction_set_id": direction_set_id, "problem_id": problem_id}
    if extra:
        header.update(extra)
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        fh.write(u.values.astype("<f8").tobytes())


def read_gfd1(path) -> tuple[GridFunction, dict]:
    data = Path(path).read_bytes()
    nl = data.index(b"\n")
    header = json.loads(data[:nl].decode("utf-8"))
    if header.get("format") != "GFD1":
        raise GridError(f"{path}: not a GFD1 dump")
    grid = build_grid(header["dim"], header["bounds"], header["points_per_axis"],
                      header["pad_cells"])
    values = np.frombuffer(data[nl + 1:], dtype="<f8").astype(np.float64)
    return GridFunction(grid, values), header


def integer_points(grid: UniformGrid, flat: Sequence[int] | np.ndarray) -> np.ndarray:
    """Storage multi-indices of flat indices, as an ``(n, dim)`` int array."""
    return np.stack(np.unravel_index(np.asarray(flat), grid.shape), axis=-1)
