"""Exception hierarchy.

Every error carries a stable ``code`` string; the CLI prints it and exits 1.
"""

from __future__ import annotations


class SymplecticError(Exception):
    code = "ERROR"


class ParseError(SymplecticError, ValueError):
    code = "PARSE_ERROR"


class ShapeError(SymplecticError, ValueError):
    code = "BAD_SHAPE"


class NonIntegralError(SymplecticError, ValueError):
    code = "NON_INTEGRAL"


class RankDeficientError(SymplecticError, ValueError):
    code = "RANK_DEFICIENT"


class NotSimilitude(SymplecticError, ValueError):
    code = "NOT_SIMILITUDE"


class NegativeSimilitude(SymplecticError, ValueError):
    code = "NEGATIVE_SIMILITUDE"


class UnsupportedGenus(SymplecticError, ValueError):
    code = "UNSUPPORTED_GENUS"


class PreconditionError(SymplecticError, ValueError):
    code = "PRECONDITION_FAILED"


class OrbitBudgetExceeded(SymplecticError, RuntimeError):
    code = "ORBIT_BUDGET_EXCEEDED"


class ClosureBudgetExceeded(SymplecticError, RuntimeError):
    code = "CLOSURE_BUDGET_EXCEEDED"


class DisconnectedGraph(SymplecticError, ValueError):
    code = "DISCONNECTED_GRAPH"


class NonConvergence(SymplecticError, RuntimeError):
    code = "NON_CONVERGENCE"


class InternalCheckFailed(SymplecticError, AssertionError):
    """A computed certificate failed its a-posteriori verification."""

    code = "INTERNAL_CHECK_FAILED"
