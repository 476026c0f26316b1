"""Basic function, range classification, positive bases and lattice generation.

Vectors are stored as rows throughout: a collection of ``n`` vectors in R^k is
an ``n x k`` array. States (coordinates) are indexed from 0.

The central object is the *basic function* of positive vectors x_1..x_n:
for each state i with r(i) = (x_1(i), ..., x_n(i)) != 0 it is
beta(i) = r(i) / ||r(i)||_1, a point of the unit simplex in R^n. With m the
number of distinct values of beta and d the number of vertices of their
convex hull, n <= d <= m <= k, and

* the span X of the x_j is a vector sublattice iff m == n,
* X is a lattice-subspace (has a positive basis) iff d == n,
* otherwise X sits inside an m-dimensional generated sublattice and some
  d-dimensional minimal lattice-subspace, both built here.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import numerics
from .errors import (
    EmptyDomainError,
    InconsistencyError,
    InfeasibleRepresentationError,
    InvalidInputError,
    NotLatticeSubspaceError,
    OutsideSpanError,
    SingularBasisError,
)
from .numerics import PIVOT_TOL, RESIDUAL_TOL

XI_FEASIBILITY_TOL = 1e-6


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PayoffCollection:
    """Linearly independent, componentwise nonnegative vectors (rows) in R^k."""

    vectors: np.ndarray
    tol: float = PIVOT_TOL

    def __post_init__(self):
        V = numerics.as_matrix(self.vectors, "payoff vectors")
        if np.any(V < 0):
            raise InvalidInputError("payoff vectors must be componentwise nonnegative")
        n, k = V.shape
        if n > k:
            raise InvalidInputError(f"{n} vectors in R^{k} cannot be linearly independent")
        if numerics.rank(V, self.tol) != n:
            raise InvalidInputError("payoff vectors are linearly dependent")
        object.__setattr__(self, "vectors", V)

    @classmethod
    def from_columns(cls, M, tol: float = PIVOT_TOL) -> "PayoffCollection":
        """Build from a ``k x n`` matrix whose columns are the vectors."""
        return cls(np.asarray(numerics.as_matrix(M)).T, tol)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def k(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class BasicFunctionTable:
    domain: np.ndarray  # states with r(i) != 0
    norms: np.ndarray  # ||r(i)||_1 on the domain
    beta_rows: np.ndarray  # |domain| x n

    @property
    def n(self) -> int:
        return self.beta_rows.shape[1]


@dataclass(frozen=True)
class BetaRange:
    """Distinct values of the basic function and their geometry.

    ``points`` are sorted lexicographically and ``preimages[s]`` holds the
    states mapped to ``points[s]``. ``independent_points`` is the first-come
    independent subset of *all* points; the generated sublattice is built from
    the points outside it. Vertex detection is comparatively expensive and
    runs on first access to ``vertex_flags``.
    """

    points: np.ndarray
    preimages: tuple[np.ndarray, ...]
    independent_points: tuple[int, ...]
    tol: float = PIVOT_TOL
    vertex_tol: float = RESIDUAL_TOL

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @functools.cached_property
    def vertex_flags(self) -> np.ndarray:
        if self.m == self.n:
            # independent points on the simplex are affinely independent
            return _frozen(np.ones(self.m), bool)
        return _frozen(numerics.vertex_flags(self.points, self.vertex_tol), bool)

    @property
    def d(self) -> int:
        return int(self.vertex_flags.sum())

    @functools.cached_property
    def independent_prefix(self) -> tuple[int, ...]:
        """n independent vertices, then the other vertices, then non-vertices."""
        flags = self.vertex_flags
        vertex_idx = np.flatnonzero(flags)
        chosen = [
            int(vertex_idx[i])
            for i in numerics.max_lin_indep_rows(self.points[vertex_idx], self.tol)
        ]
        if len(chosen) != self.n:
            raise InconsistencyError(
                f"found {len(chosen)} linearly independent vertices, expected {self.n}; "
                "the tolerances are probably too tight or too loose for this input"
            )
        rest = [int(v) for v in vertex_idx if v not in chosen]
        return tuple(chosen + rest + [int(s) for s in np.flatnonzero(~flags)])

    @property
    def vertices(self) -> tuple[int, ...]:
        """Vertex indices, independent ones first."""
        return self.independent_prefix[: self.d]


class Kind(str, Enum):
    VECTOR_SUBLATTICE = "VectorSublattice"
    LATTICE_SUBSPACE = "LatticeSubspace"
    NEITHER = "Neither"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    n: int
    m: int
    d: int
    k: int


@dataclass(frozen=True)
class PositiveBasis:
    """Basis vectors (rows) whose nonnegative combinations are exactly the
    positive cone of their span.

    ``coeffs[j]`` expresses the j-th generating vector in the basis.
    """

    basis: np.ndarray
    coeffs: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "basis", _frozen(np.atleast_2d(self.basis)))
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", _frozen(np.atleast_2d(self.coeffs)))

    @property
    def r(self) -> int:
        return self.basis.shape[0]

    def coords(self, x, tol: float = RESIDUAL_TOL) -> np.ndarray:
        return coords_in_basis(self, x, tol)

    def sup(self, x, y) -> np.ndarray:
        return sup_in(self, x, y)

    def inf(self, x, y) -> np.ndarray:
        return inf_in(self, x, y)


@dataclass(frozen=True)
class SublatticeResult:
    generators: np.ndarray  # inputs followed by the appended vectors
    n_inputs: int
    basis: PositiveBasis
    beta: BetaRange

    @property
    def appended(self) -> np.ndarray:
        return self.generators[self.n_inputs:]

    @property
    def dimension(self) -> int:
        return self.generators.shape[0]


@dataclass(frozen=True)
class MinLatResult:
    generators: np.ndarray
    n_inputs: int
    xi_table: np.ndarray  # d x |domain|, row i holds the weights on vertex i
    domain: np.ndarray
    basis: PositiveBasis
    beta: BetaRange

    @property
    def appended(self) -> np.ndarray:
        return self.generators[self.n_inputs:]

    @property
    def dimension(self) -> int:
        return self.generators.shape[0]


# --------------------------------------------------------------------------
# Basic function and its range
# --------------------------------------------------------------------------


def basic_function(X: PayoffCollection) -> BasicFunctionTable:
    R = X.vectors.T  # r(i) as rows
    norms = np.abs(R).sum(axis=1)
    domain = np.flatnonzero(norms != 0)
    if domain.size == 0:
        raise EmptyDomainError("every state has zero payoff; the basic function is undefined")
    beta = R[domain] / norms[domain, None]
    return BasicFunctionTable(_frozen(domain, int), _frozen(norms[domain]), _frozen(beta))


def _lex_cmp(a: np.ndarray, b: np.ndarray, tol: float) -> int:
    for ai, bi in zip(a, b):
        if ai < bi - tol:
            return -1
        if ai > bi + tol:
            return 1
    return 0


def _distinct_rows(rows: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Group rows equal within ``tol`` (max-abs); return sorted representatives
    and the group label of each row."""
    reps: list[int] = []
    labels = np.empty(rows.shape[0], dtype=int)
    for i, row in enumerate(rows):
        if reps:
            close = np.flatnonzero(np.abs(rows[reps] - row).max(axis=1) <= tol)
            if close.size:
                labels[i] = close[0]
                continue
        labels[i] = len(reps)
        reps.append(i)
    key = functools.cmp_to_key(lambda a, b: _lex_cmp(rows[reps[a]], rows[reps[b]], tol))
    order = sorted(range(len(reps)), key=key)
    relabel = np.empty(len(reps), dtype=int)
    relabel[order] = np.arange(len(reps))
    return rows[[reps[g] for g in order]], relabel[labels]


def beta_range(
    t: BasicFunctionTable, tol: float = PIVOT_TOL, vertex_tol: float = RESIDUAL_TOL
) -> BetaRange:
    points, labels = _distinct_rows(t.beta_rows, tol)
    preimages = tuple(_frozen(t.domain[labels == s], int) for s in range(points.shape[0]))
    spanning = numerics.max_lin_indep_rows(points, tol)
    if len(spanning) != t.n:
        raise InconsistencyError(f"range of beta has rank {len(spanning)}, expected {t.n}")
    return BetaRange(
        points=_frozen(points),
        preimages=preimages,
        independent_points=tuple(int(s) for s in spanning),
        tol=tol,
        vertex_tol=vertex_tol,
    )


def classify(X: PayoffCollection, tol: float = PIVOT_TOL) -> Classification:
    rng = beta_range(basic_function(X), tol)
    return _classification(X, rng)


def _classification(X: PayoffCollection, rng: BetaRange) -> Classification:
    n, m, d = X.n, rng.m, rng.d
    if m == n:
        kind = Kind.VECTOR_SUBLATTICE
    elif d == n:
        kind = Kind.LATTICE_SUBSPACE
    else:
        kind = Kind.NEITHER
    return Classification(kind, n=n, m=m, d=d, k=X.k)


# --------------------------------------------------------------------------
# Positive bases and lattice operations
# --------------------------------------------------------------------------


def positive_basis(
    X: PayoffCollection, rng: BetaRange | None = None, tol: float = PIVOT_TOL
) -> PositiveBasis:
    """Positive basis of span(X), available only when d == n.

    With A the n x n matrix whose columns are n independent vertices of the
    range of beta, the basis rows are A^{-1} (x_1, ..., x_n)^T and A itself
    holds the coefficients of the x_j.
    """
    if rng is None:
        rng = beta_range(basic_function(X), tol)
    n = X.n
    if rng.d != n:
        raise NotLatticeSubspaceError(
            f"span has no positive basis: hull of the beta range has {rng.d} vertices, dimension is {n}"
        )
    A = rng.points[list(rng.independent_prefix[:n])].T
    if numerics.rank(A, tol) != n:
        raise SingularBasisError("vertex matrix is singular within tolerance")
    B = np.linalg.solve(A, X.vectors)
    B[np.abs(B) <= tol * np.abs(B).max()] = 0.0
    return PositiveBasis(B, A)


def coords_in_basis(b: PositiveBasis, x, tol: float = RESIDUAL_TOL) -> np.ndarray:
    """Coefficients of ``x`` in the basis; raises if ``x`` is outside the span.

    The residual bound is ``tol * max(1, ||x||)``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != b.basis.shape[1]:
        raise InvalidInputError(f"vector has length {x.shape[0]}, basis lives in R^{b.basis.shape[1]}")
    lam = np.linalg.lstsq(b.basis.T, x, rcond=None)[0]
    residual = float(np.linalg.norm(b.basis.T @ lam - x))
    if residual > tol * max(1.0, float(np.linalg.norm(x))):
        raise OutsideSpanError("vector is not in the span of the basis", residual)
    return lam


def sup_in(b: PositiveBasis, x, y) -> np.ndarray:
    """Supremum of x and y inside span(b): coefficient-wise max, re-expanded."""
    return np.maximum(coords_in_basis(b, x), coords_in_basis(b, y)) @ b.basis


def inf_in(b: PositiveBasis, x, y) -> np.ndarray:
    return np.minimum(coords_in_basis(b, x), coords_in_basis(b, y)) @ b.basis


def canonical_rays(vectors) -> np.ndarray:
    """Rows scaled to unit 1-norm and sorted; equal sets of rays compare equal."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    V = V / np.abs(V).sum(axis=1, keepdims=True)
    # sort on rounded keys so roundoff cannot reorder rows that tie
    keys = np.round(V, 9)
    return V[np.lexsort(keys.T[::-1])]


# --------------------------------------------------------------------------
# Generated sublattice and minimal lattice-subspace
# --------------------------------------------------------------------------


def _level_vector(k: int, states: np.ndarray, weights: np.ndarray) -> np.ndarray:
    v = np.zeros(k)
    v[states] = weights
    return v


def generate_sublattice(X: PayoffCollection, tol: float = PIVOT_TOL) -> SublatticeResult:
    """The vector sublattice generated by X, of dimension m.

    For every distinct beta value P_s outside ``independent_points`` (in sorted
    order) the vector sum_{i in I_s} ||r(i)||_1 e_i is appended.
    """
    t = basic_function(X)
    rng = beta_range(t, tol)
    if rng.m == X.n:
        return SublatticeResult(X.vectors, X.n, positive_basis(X, rng, tol), rng)

    norm_of = dict(zip(t.domain.tolist(), t.norms.tolist()))
    outside = [s for s in range(rng.m) if s not in rng.independent_points]
    extra = []
    for s in outside:
        states = rng.preimages[s]
        extra.append(_level_vector(X.k, states, np.array([norm_of[i] for i in states])))
    generators = _frozen(np.vstack([X.vectors, *extra]))

    Z = PayoffCollection(generators, tol)
    z_rng = beta_range(basic_function(Z), tol)
    if z_rng.m != Z.n:
        raise InconsistencyError(
            f"enlarged collection is not a vector sublattice (m={z_rng.m}, dim={Z.n})"
        )
    return SublatticeResult(generators, X.n, positive_basis(Z, z_rng, tol), rng)


def minimal_lattice_subspace(X: PayoffCollection, tol: float = PIVOT_TOL) -> MinLatResult:
    """A d-dimensional minimal lattice-subspace containing X.

    Each beta(j) is written as a convex combination of the d vertices by
    NNLS; the weights on the vertices beyond the first n, scaled by
    ||r(j)||_1, give the appended vectors. The weights are not unique in
    general, so this is one minimal lattice-subspace among possibly many.
    """
    t = basic_function(X)
    rng = beta_range(t, tol)
    vertices = list(rng.vertices)
    P = rng.points[vertices].T  # n x d

    xi = np.empty((len(vertices), t.domain.size))
    for col, b in enumerate(t.beta_rows):
        res = numerics.nnls(P, b, tol)
        if res.residual_norm > XI_FEASIBILITY_TOL:
            raise InfeasibleRepresentationError(
                f"beta at state {int(t.domain[col])} is not in the hull of the detected vertices "
                f"(residual {res.residual_norm:.3e}); a vertex was probably missed"
            )
        xi[:, col] = res.solution
    xi.setflags(write=False)

    n = X.n
    extra = [_level_vector(X.k, t.domain, xi[i] * t.norms) for i in range(n, len(vertices))]
    generators = _frozen(np.vstack([X.vectors, *extra]))

    Y = PayoffCollection(generators, tol)
    y_rng = beta_range(basic_function(Y), tol)
    if y_rng.d != Y.n:
        raise InconsistencyError(
            f"constructed space is not a lattice-subspace (d={y_rng.d}, dim={Y.n})"
        )
    return MinLatResult(
        generators, n, xi, t.domain, positive_basis(Y, y_rng, tol), rng
    )
