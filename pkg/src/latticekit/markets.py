"""Security-market applications: completion by options and portfolio insurance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import ArbitrageError, InvalidInputError, NoInsuranceError
from .lattice import (
    PayoffCollection,
    PositiveBasis,
    basic_function,
    beta_range,
    generate_sublattice,
    minimal_lattice_subspace,
    sup_in,
)
from .numerics import PIVOT_TOL, LpProblem, LpStatus


def call_option(x, u, a: float) -> np.ndarray:
    """(x - a u)^+"""
    x, u = np.asarray(x, dtype=float), np.asarray(u, dtype=float)
    if x.shape != u.shape:
        raise InvalidInputError(f"payoff and strike shapes differ: {x.shape} vs {u.shape}")
    return np.maximum(x - a * u, 0.0)


def put_option(x, u, a: float) -> np.ndarray:
    """(a u - x)^+"""
    x, u = np.asarray(x, dtype=float), np.asarray(u, dtype=float)
    if x.shape != u.shape:
        raise InvalidInputError(f"payoff and strike shapes differ: {x.shape} vs {u.shape}")
    return np.maximum(a * u - x, 0.0)


@dataclass(frozen=True)
class MarketSpec:
    """Primitive payoffs (rows, any sign) and strike vectors (rows) spanning U.

    An empty strike list means U = {0}.
    """

    primitives: np.ndarray
    strikes: np.ndarray | None = None
    tol: float = PIVOT_TOL

    def __post_init__(self):
        X = numerics.as_matrix(self.primitives, "primitives")
        if numerics.rank(X, self.tol) != X.shape[0]:
            raise InvalidInputError("primitive payoffs are linearly dependent")
        if self.strikes is None or np.size(self.strikes) == 0:
            U = np.zeros((0, X.shape[1]))
            U.setflags(write=False)
        else:
            U = numerics.as_matrix(self.strikes, "strikes")
            if U.shape[1] != X.shape[1]:
                raise InvalidInputError(
                    f"strikes live in R^{U.shape[1]}, primitives in R^{X.shape[1]}"
                )
        object.__setattr__(self, "primitives", X)
        object.__setattr__(self, "strikes", U)

    @property
    def n(self) -> int:
        return self.primitives.shape[0]

    @property
    def k(self) -> int:
        return self.primitives.shape[1]


@dataclass(frozen=True)
class CompletionResult:
    basic_set: np.ndarray
    generators: np.ndarray
    basis: PositiveBasis
    dimension: int
    complete: bool
    strikes_in_span: bool


def strikes_in_span(market: MarketSpec) -> bool:
    """U subset of X, decided by comparing rank[X; U] with rank X."""
    if market.strikes.shape[0] == 0:
        return True
    both = np.vstack([market.primitives, market.strikes])
    return numerics.rank(both, market.tol) == numerics.rank(market.primitives, market.tol)


def basic_set(market: MarketSpec) -> np.ndarray:
    """A maximal linearly independent subset of the positive and negative parts.

    Candidates are x_1^+, x_1^-, x_2^+, ..., and, when U is not contained in
    X, u_1^+, u_1^-, ... after them. Selection is first-come.
    """
    sources = [market.primitives]
    if not strikes_in_span(market):
        sources.append(market.strikes)
    candidates = []
    for block in sources:
        for v in block:
            candidates.append(np.maximum(v, 0.0))
            candidates.append(np.maximum(-v, 0.0))
    candidates = np.array(candidates)
    chosen = numerics.max_lin_indep_rows(candidates, market.tol)
    if not chosen:
        raise InvalidInputError("all payoffs are zero; the market has no basic set")
    out = candidates[chosen]
    out.setflags(write=False)
    return out


def complete_by_options(market: MarketSpec) -> CompletionResult:
    """F_U(X): the vector sublattice generated by a basic set of the market."""
    Y = basic_set(market)
    sub = generate_sublattice(PayoffCollection(Y, market.tol), market.tol)
    inside = strikes_in_span(market)
    return CompletionResult(
        basic_set=Y,
        generators=sub.generators,
        basis=sub.basis,
        dimension=sub.dimension,
        complete=inside and sub.dimension == market.n,
        strikes_in_span=inside,
    )


def is_complete(market: MarketSpec) -> bool:
    """Complete by options iff U is inside X and the basic set's beta range
    has exactly n points."""
    if not strikes_in_span(market):
        return False
    Y = PayoffCollection(basic_set(market), market.tol)
    return beta_range(basic_function(Y), market.tol).m == market.n


# --------------------------------------------------------------------------
# Minimum-cost portfolio insurance
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InsuranceProblem:
    """Insure portfolio ``theta`` at floor ``phi`` under security prices ``prices``."""

    payoffs: PayoffCollection
    prices: np.ndarray
    portfolio: np.ndarray
    floor: np.ndarray

    def __post_init__(self):
        n = self.payoffs.n
        for name in ("prices", "portfolio", "floor"):
            v = np.array(getattr(self, name), dtype=float).ravel()
            if v.shape != (n,):
                raise InvalidInputError(f"{name} must have length {n}, got {v.size}")
            if not np.all(np.isfinite(v)):
                raise InvalidInputError(f"{name} has non-finite entries")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if np.any(self.payoffs.vectors.sum(axis=0) <= 0):
            raise InvalidInputError("the sum of the payoff vectors must be strictly positive in every state")

    def payoff(self, eta) -> np.ndarray:
        return np.asarray(eta, dtype=float) @ self.payoffs.vectors


@dataclass(frozen=True)
class InsuranceSolution:
    eta: np.ndarray
    cost: float
    payoff: np.ndarray
    target: np.ndarray
    lattice_sup: np.ndarray  # sup of R(theta), R(phi) in a minimal lattice-subspace


def min_cost_insurance(problem: InsuranceProblem) -> InsuranceSolution:
    """Cheapest portfolio whose payoff dominates R(theta) v R(phi).

    Solves ``min p.eta  s.t.  sum_i eta_i x_i >= target`` over free eta by the
    simplex method. The supremum of the two payoffs inside a minimal
    lattice-subspace containing X is reported alongside as a diagnostic.
    """
    X = problem.payoffs.vectors
    target = np.maximum(problem.payoff(problem.portfolio), problem.payoff(problem.floor))
    sol = numerics.simplex_solve(LpProblem(problem.prices, X.T, target))
    if sol.status is LpStatus.INFEASIBLE:
        raise NoInsuranceError("no portfolio dominates the insured payoff")
    if sol.status is LpStatus.UNBOUNDED:
        raise ArbitrageError("cost is unbounded below; the prices admit arbitrage")

    Y = minimal_lattice_subspace(problem.payoffs, problem.payoffs.tol)
    lattice_sup = sup_in(
        Y.basis, problem.payoff(problem.portfolio), problem.payoff(problem.floor)
    )
    eta = sol.x
    payoff = problem.payoff(eta)
    payoff.setflags(write=False)
    target.setflags(write=False)
    lattice_sup.setflags(write=False)
    return InsuranceSolution(eta, float(problem.prices @ eta), payoff, target, lattice_sup)
