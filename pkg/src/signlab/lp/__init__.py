"""Linear-programming search for near-minimisers of the eigenfunction problem."""
from .simplex import LPError, LPOutcome, LPProblem, solve_lp

__all__ = ["LPError", "LPOutcome", "LPProblem", "solve_lp"]
