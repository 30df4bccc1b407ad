"""Finite framed bicategories: spans, matrices, bimodules and fibrations,
with law checkers that return replayable witnesses."""

from .doublecore import BudgetExceeded, LawReport, LawViolation
from .finkit import FinError, FinFn, FinSet

__version__ = "0.1.0"

__all__ = ["BudgetExceeded", "FinError", "FinFn", "FinSet", "LawReport", "LawViolation",
           "__version__"]
