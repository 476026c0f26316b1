"""Exception hierarchy.

Every error carries a stable ``code`` string so the CLI can report it in
machine-readable form.
"""

from __future__ import annotations


class LatticeKitError(Exception):
    code = "error"


class InvalidInputError(LatticeKitError, ValueError):
    code = "invalid_input"


class ParseError(InvalidInputError):
    code = "parse_error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class ConvergenceError(LatticeKitError, ArithmeticError):
    """An iterative kernel hit its iteration cap."""

    code = "non_convergence"


class EmptyDomainError(LatticeKitError):
    code = "empty_domain"


class InconsistencyError(LatticeKitError):
    """A structural guarantee failed, which usually means a tolerance is off."""

    code = "internal_inconsistency"


class NotLatticeSubspaceError(LatticeKitError):
    code = "not_lattice_subspace"


class SingularBasisError(LatticeKitError):
    code = "singular_basis"


class OutsideSpanError(LatticeKitError):
    code = "outside_span"

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class InfeasibleRepresentationError(LatticeKitError):
    code = "infeasible_representation"


class NoInsuranceError(LatticeKitError):
    code = "no_insurance"


class ArbitrageError(LatticeKitError):
    code = "arbitrage_price"
