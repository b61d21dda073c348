"""Simulation, theory and exact oracles for the multi-nest ants process on series-parallel graphs."""

from .ants import AntsState, run
from .sp_graph import flatten, parse_sp
from .theory import TheoryParams, classify_case
from .triangle import line_triangle

__all__ = ["AntsState", "TheoryParams", "classify_case", "flatten", "line_triangle", "parse_sp", "run"]
__version__ = "0.1.0"
