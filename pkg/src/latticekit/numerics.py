"""Dense linear algebra and optimization kernels.

Everything here works on plain ``numpy`` arrays. Functions are pure; inputs
are copied before any in-place work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConvergenceError, InvalidInputError

PIVOT_TOL = 1e-9
RESIDUAL_TOL = 1e-8


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Return a read-only float64 copy of ``data`` as a 2-D array.

    Rejects empty input and non-finite entries.
    """
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: not a numeric array ({exc})") from None
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name}: expected a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: contains NaN or infinite entries")
    arr.setflags(write=False)
    return arr


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# Row reduction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RrefResult:
    reduced: np.ndarray
    pivot_columns: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_columns)


def rref(M, tol: float = PIVOT_TOL) -> RrefResult:
    """Gauss-Jordan elimination with partial pivoting.

    A column is treated as having no pivot when the largest remaining entry is
    at most ``tol`` times the largest absolute entry of ``M``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    A = np.array(M, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError(f"rref expects a 2-D array, got shape {A.shape}")
    rows, cols = A.shape
    scale = float(np.abs(A).max()) if A.size else 0.0
    if scale == 0.0:
        out = np.zeros_like(A)
        out.setflags(write=False)
        return RrefResult(out, ())
    thresh = tol * scale

    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[p, c]) <= thresh:
            A[r:, c] = 0.0
            continue
        if p != r:
            A[[r, p], :] = A[[p, r], :]
        A[r, :] /= A[r, c]
        others = np.arange(rows) != r
        A[others, :] -= np.outer(A[others, c], A[r, :])
        A[others, c] = 0.0
        pivots.append(c)
        r += 1

    A[np.abs(A) <= thresh] = 0.0
    A.setflags(write=False)
    return RrefResult(A, tuple(pivots))


def rank(M, tol: float = PIVOT_TOL) -> int:
    return rref(M, tol).rank


def max_lin_indep_rows(M, tol: float = PIVOT_TOL) -> list[int]:
    """Indices of the greedy (first-come) maximal independent set of rows.

    Row ``i`` is selected iff it is not in the span of the rows before it, which
    is exactly the pivot columns of ``rref(M.T)``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array, got shape {M.shape}")
    if M.shape[0] == 0:
        return []
    return list(rref(M.T, tol).pivot_columns)


# --------------------------------------------------------------------------
# Nonnegative least squares
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NnlsResult:
    solution: np.ndarray
    residual_norm: float


def nnls(A, b, tol: float = PIVOT_TOL, max_iter: int | None = None) -> NnlsResult:
    """Lawson-Hanson active-set solver for ``min ||Ax - b||`` subject to ``x >= 0``.

    The entering variable is the free index with the largest gradient entry;
    entries within ``tol`` of the maximum count as tied and the lowest index
    wins, so results do not depend on rounding noise in the gradient.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise InvalidInputError(f"nnls: shape mismatch, A {A.shape} vs b {b.shape}")
    m, n = A.shape
    if max_iter is None:
        max_iter = 30 * (n + 1)

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    blocked = np.zeros(n, dtype=bool)
    w = A.T @ (b - A @ x)
    iterations = 0

    while True:
        candidates = ~passive & ~blocked
        if not candidates.any():
            break
        w_free = np.where(candidates, w, -np.inf)
        w_max = float(w_free.max())
        if w_max <= tol:
            break
        tie = tol * max(1.0, abs(w_max))
        j = int(np.flatnonzero(w_free >= w_max - tie)[0])
        passive[j] = True
        first = True

        while True:
            iterations += 1
            if iterations > max_iter:
                raise ConvergenceError(
                    f"nnls did not converge in {max_iter} iterations; the system is likely ill-conditioned"
                )
            z = np.zeros(n)
            cols = np.flatnonzero(passive)
            if cols.size:
                z[cols] = np.linalg.lstsq(A[:, cols], b, rcond=None)[0]
            if np.all(z[cols] > tol):
                x = z
                break
            if first and z[j] <= tol:
                # gradient said j helps but the solve disagrees: numerical noise
                passive[j] = False
                blocked[j] = True
                break
            first = False
            bad = passive & (z <= tol)
            alpha = float(np.min(x[bad] / (x[bad] - z[bad])))
            x = x + alpha * (z - x)
            passive &= x > tol
            x[~passive] = 0.0

        if not blocked[j]:
            blocked[:] = False
        w = A.T @ (b - A @ x)

    x = np.maximum(x, 0.0)
    x.setflags(write=False)
    return NnlsResult(x, float(np.linalg.norm(A @ x - b)))


# --------------------------------------------------------------------------
# Convex hull vertices
# --------------------------------------------------------------------------


def is_vertex(points, idx: int, tol: float = RESIDUAL_TOL) -> bool:
    """True iff ``points[idx]`` is not a convex combination of the other points.

    Decided by an NNLS feasibility solve with an appended row of ones. A point
    that has an exact duplicate elsewhere in ``points`` is never a vertex.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    m = P.shape[0]
    if not 0 <= idx < m:
        raise IndexError(f"idx {idx} out of range for {m} points")
    if m == 1:
        return True
    others = np.delete(P, idx, axis=0)
    A = np.vstack([others.T, np.ones(m - 1)])
    b = np.append(P[idx], 1.0)
    return nnls(A, b).residual_norm > tol


def vertex_flags(points, tol: float = RESIDUAL_TOL) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    return np.array([is_vertex(P, i, tol) for i in range(P.shape[0])], dtype=bool)


# --------------------------------------------------------------------------
# Linear programming
# --------------------------------------------------------------------------


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """``min c.x`` subject to ``G x >= h`` with every variable free."""

    c: np.ndarray
    G: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        c = _frozen(np.ravel(self.c))
        G = _frozen(np.atleast_2d(self.G))
        h = _frozen(np.ravel(self.h))
        if G.shape != (h.size, c.size):
            raise InvalidInputError(
                f"LpProblem: G has shape {G.shape}, expected ({h.size}, {c.size})"
            )
        for name, arr in (("c", c), ("G", G), ("h", h)):
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"LpProblem: {name} has non-finite entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective_value: float | None = None
    duals: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0


class _Tableau:
    """Constraint rows of a standard-form LP ``A z = b, z >= 0`` with ``b >= 0``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int], tol: float, max_iter: int):
        self.T = np.hstack([A, b.reshape(-1, 1)])
        self.basis = list(basis)
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        others = np.arange(T.shape[0]) != row
        T[others] -= np.outer(T[others, col], T[row])
        T[others, col] = 0.0
        T[np.abs(T) < 1e-13] = 0.0
        self.basis[row] = col

    def run(self, cost: np.ndarray, allowed: np.ndarray) -> bool:
        """Minimize ``cost.z`` with Bland's rule. Returns False when unbounded."""
        T, tol = self.T, self.tol
        while True:
            reduced = cost - cost[self.basis] @ T[:, :-1]
            entering = np.flatnonzero(allowed & (reduced < -tol))
            if entering.size == 0:
                return True
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise ConvergenceError(f"simplex stalled after {self.max_iter} pivots")
            col = int(entering[0])
            column = T[:, col]
            rows = np.flatnonzero(column > tol)
            if rows.size == 0:
                return False
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + tol * max(1.0, abs(best))]
            row = int(min(tied, key=lambda i: self.basis[i]))
            self.pivot(row, col)


def simplex_solve(problem: LpProblem, tol: float = PIVOT_TOL, max_iter: int = 10_000) -> LpSolution:
    """Two-phase tableau simplex with Bland's anti-cycling rule.

    Free variables are split into positive and negative parts; each ``>=`` row
    gets a surplus variable and an artificial variable for phase one.
    """
    c, G, h = problem.c, problem.G, problem.h
    m, n = G.shape
    sign = np.where(h < 0, -1.0, 1.0)
    # columns: x+ (n) | x- (n) | surplus (m) | artificial (m)
    A = np.hstack([G, -G, -np.eye(m), np.eye(m)]) * sign[:, None]
    A[:, 2 * n + m:] = np.eye(m)
    b = h * sign
    n_struct = 2 * n + m
    n_total = n_struct + m
    art = np.arange(n_struct, n_total)

    tab = _Tableau(A, b, list(art), tol, max_iter)
    phase1_cost = np.zeros(n_total)
    phase1_cost[art] = 1.0
    tab.run(phase1_cost, np.ones(n_total, dtype=bool))
    infeas = float(tab.T[:, -1] @ phase1_cost[tab.basis])
    if infeas > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        return LpSolution(LpStatus.INFEASIBLE, iterations=tab.iterations)

    # drive artificial variables out of the basis, dropping redundant rows
    keep = []
    for i in range(len(tab.basis)):
        if tab.basis[i] < n_struct:
            keep.append(i)
            continue
        cand = np.flatnonzero(np.abs(tab.T[i, :n_struct]) > tol)
        if cand.size:
            tab.pivot(i, int(cand[0]))
            keep.append(i)
    tab.T = tab.T[keep]
    tab.basis = [tab.basis[i] for i in keep]

    cost = np.concatenate([c, -c, np.zeros(m), np.zeros(m)])
    allowed = np.ones(n_total, dtype=bool)
    allowed[art] = False
    if not tab.run(cost, allowed):
        return LpSolution(LpStatus.UNBOUNDED, iterations=tab.iterations)

    z = np.zeros(n_total)
    z[tab.basis] = tab.T[:, -1]
    x = z[:n] - z[n:2 * n]
    # artificial columns started as the identity, so they now hold B^-1 (row-signed)
    duals = (cost[tab.basis] @ tab.T[:, art]) * sign
    x.setflags(write=False)
    duals.setflags(write=False)
    return LpSolution(LpStatus.OPTIMAL, x, float(c @ x), duals, tab.iterations)
