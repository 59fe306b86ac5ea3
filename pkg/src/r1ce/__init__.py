"""Rank-one and polyconvex envelopes of grid obstacles by wide-stencil monotone schemes."""

from .directions import DirectionSet, parse_directions
from .grid import GridFunction, UniformGrid, build_grid, read_gfd1, write_gfd1
from .problems import EnvelopeProblem, build_problem
from .solvers import SolveResult, SolverConfig, solve

__all__ = ["DirectionSet", "EnvelopeProblem", "GridFunction", "SolveResult", "SolverConfig",
           "UniformGrid", "build_grid", "build_problem", "parse_directions", "read_gfd1",
           "solve", "write_gfd1"]
__version__ = "0.1.0"
