"""Exact solver for small bounded integer linear programs."""

from .bnb import Relaxation, Solution, lp_bound, solve
from .external import solve_auto, solve_highs
from .model import Constraint, IlpModel, from_lp_format, to_lp_format
from .simplex import LpResult, solve_lp

__all__ = [
    "Constraint",
    "IlpModel",
    "LpResult",
    "Relaxation",
    "Solution",
    "from_lp_format",
    "lp_bound",
    "solve",
    "solve_auto",
    "solve_highs",
    "solve_lp",
    "to_lp_format",
]
