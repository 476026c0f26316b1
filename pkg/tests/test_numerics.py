import itertools

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given
from hypothesis import strategies as st

from latticekit.errors import ConvergenceError, InvalidInputError
from latticekit.numerics import (
    LpProblem,
    LpStatus,
    as_matrix,
    is_vertex,
    max_lin_indep_rows,
    nnls,
    rank,
    rref,
    simplex_solve,
    vertex_flags,
)


def low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


# ---------------------------------------------------------------- input


def test_as_matrix_rejects_nan():
    with pytest.raises(InvalidInputError):
        as_matrix([[1.0, np.nan]])


def test_as_matrix_is_read_only():
    M = as_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        M[0, 0] = 5


# ---------------------------------------------------------------- rref / rank


def test_rref_identity():
    r = rref(np.eye(3))
    np.testing.assert_array_equal(r.reduced, np.eye(3))
    assert r.pivot_columns == (0, 1, 2)


def test_rref_zero_matrix():
    r = rref(np.zeros((2, 3)))
    assert r.rank == 0
    np.testing.assert_array_equal(r.reduced, np.zeros((2, 3)))


def test_rref_small_example():
    r = rref([[1, 2, 3], [2, 4, 7]])
    np.testing.assert_allclose(r.reduced, [[1, 2, 0], [0, 0, 1]], atol=1e-12)
    assert r.pivot_columns == (0, 2)


def test_rank_of_three_payoffs_in_r4():
    assert rank([[6, 0, 0, 1], [6, 4, 0, 0], [8, 4, 2, 0]]) == 3


def test_rank_matches_numpy(rng):
    for _ in range(50):
        m, n = rng.integers(1, 12, size=2)
        r = int(rng.integers(0, min(m, n) + 1))
        M = low_rank(rng, m, n, r)
        assert rank(M) == np.linalg.matrix_rank(M)


@given(
    m=st.integers(1, 30),
    n=st.integers(1, 30),
    r=st.integers(0, 30),
    seed=st.integers(0, 2**32 - 1),
)
def test_rank_transpose_invariant(m, n, r, seed):
    M = low_rank(np.random.default_rng(seed), m, n, min(r, m, n))
    assert rank(M) == rank(M.T)


@given(m=st.integers(1, 10), n=st.integers(1, 10), r=st.integers(1, 10), seed=st.integers(0, 2**32 - 1))
def test_rref_solves_consistent_systems(m, n, r, seed):
    rng = np.random.default_rng(seed)
    A = low_rank(rng, m, n, min(r, m, n))
    b = A @ rng.standard_normal(n)
    red = rref(np.column_stack([A, b]))
    assert n not in red.pivot_columns  # consistent: no pivot in the augmented column
    x = np.zeros(n)
    for row, col in enumerate(red.pivot_columns):
        x[col] = red.reduced[row, -1]
    assert np.linalg.norm(A @ x - b) <= 1e-8 * max(1.0, np.linalg.norm(b))


def test_rref_flags_inconsistent_system():
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    red = rref(np.column_stack([A, [1.0, 3.0]]))
    assert 2 in red.pivot_columns


def test_max_lin_indep_rows_examples():
    assert max_lin_indep_rows([[1, 0], [2, 0], [0, 1]]) == [0, 2]
    assert max_lin_indep_rows(np.eye(3)) == [0, 1, 2]
    assert max_lin_indep_rows(np.zeros((2, 2))) == []


def test_max_lin_indep_rows_is_greedy(rng):
    # oracle: keep a row whenever it raises the rank of the kept set
    for _ in range(30):
        M = low_rank(rng, 8, 6, int(rng.integers(1, 6)))
        M[rng.integers(0, 8)] = 0.0
        keep = []
        for i in range(8):
            if np.linalg.matrix_rank(M[keep + [i]]) > len(keep):
                keep.append(i)
        assert max_lin_indep_rows(M) == keep


# ---------------------------------------------------------------- nnls


def test_nnls_identity():
    res = nnls(np.eye(2), [1, 2])
    np.testing.assert_allclose(res.solution, [1, 2])
    assert res.residual_norm < 1e-12


def test_nnls_clips_negative_direction():
    res = nnls(np.eye(2), [1, -1])
    np.testing.assert_allclose(res.solution, [1, 0])
    assert res.residual_norm == pytest.approx(1.0)


def test_nnls_zero_rhs():
    res = nnls(np.ones((3, 2)), np.zeros(3))
    np.testing.assert_array_equal(res.solution, [0, 0])


def kkt_violation(A, b, x):
    w = A.T @ (b - A @ x)
    active = x <= 0
    return max(float(np.max(w[active], initial=-np.inf)), float(np.max(np.abs(w[~active]), initial=0.0)))


def test_nnls_matches_scipy_and_kkt(rng):
    for _ in range(100):
        m, n = rng.integers(1, 10, size=2)
        A = rng.standard_normal((m, n))
        b = rng.standard_normal(m)
        res = nnls(A, b)
        _, ref = scipy.optimize.nnls(A, b)
        assert res.residual_norm == pytest.approx(ref, rel=1e-8, abs=1e-10)
        assert np.all(res.solution >= 0)
        assert kkt_violation(A, b, res.solution) <= 1e-8 * max(1.0, np.abs(A).sum() * np.abs(b).sum())
        # never better than the unconstrained least-squares fit
        ls = np.linalg.lstsq(A, b, rcond=None)[0]
        assert res.residual_norm >= np.linalg.norm(A @ ls - b) - 1e-10


def test_nnls_exact_when_rhs_in_cone(rng):
    for _ in range(100):
        A = rng.random((5, 7))
        b = A @ (rng.random(7) * (rng.random(7) < 0.5))
        assert nnls(A, b).residual_norm <= 1e-8


def test_nnls_breaks_ties_on_lowest_index():
    # identical columns see the same gradient; the first one carries b
    res = nnls(np.array([[0.5, 0.5], [0.5, 0.5]]), [0.5, 0.5])
    np.testing.assert_allclose(res.solution, [1.0, 0.0])


def test_nnls_iteration_cap():
    A = np.random.default_rng(1).random((8, 8))
    b = A @ np.ones(8)
    with pytest.raises(ConvergenceError):
        nnls(A, b, max_iter=1)


def test_nnls_shape_mismatch():
    with pytest.raises(InvalidInputError):
        nnls(np.eye(2), [1, 2, 3])


def test_nnls_deterministic(rng):
    A = rng.random((6, 9))
    b = rng.random(6)
    np.testing.assert_array_equal(nnls(A, b).solution, nnls(A, b).solution)


# ---------------------------------------------------------------- vertices


def hull_vertices_2d(P):
    """Brute-force hull: (a, b) is an edge when every other point lies left of
    a->b or on the closed segment. O(m^3)."""
    m = len(P)
    if m == 1:
        return {0}
    out = set()
    for a, b in itertools.permutations(range(m), 2):
        e = P[b] - P[a]
        ok = True
        for c in range(m):
            if c in (a, b):
                continue
            v = P[c] - P[a]
            cross = e[0] * v[1] - e[1] * v[0]
            if cross < 0 or (cross == 0 and not (0 <= v @ e <= e @ e)):
                ok = False
                break
        if ok:
            out.update((a, b))
    return out


def test_is_vertex_square_with_centre():
    P = np.array([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]], dtype=float)
    assert [is_vertex(P, i) for i in range(5)] == [True, True, True, True, False]


def test_is_vertex_midpoint_of_segment():
    P = np.array([[0, 0], [2, 0], [1, 0]], dtype=float)
    np.testing.assert_array_equal(vertex_flags(P), [True, True, False])


def test_single_point_is_vertex():
    assert is_vertex(np.array([[0.3, 0.7]]), 0)


@pytest.mark.parametrize("seed", range(25))
def test_vertex_flags_match_orientation_hull(seed):
    rng = np.random.default_rng(seed)
    # small integer grid: collinear triples are common
    P = np.unique(rng.integers(0, 6, size=(int(rng.integers(1, 14)), 2)), axis=0).astype(float)
    expected = hull_vertices_2d(P)
    assert set(np.flatnonzero(vertex_flags(P))) == expected


# ---------------------------------------------------------------- simplex


def test_simplex_single_bound():
    sol = simplex_solve(LpProblem(np.array([1.0]), np.array([[1.0]]), np.array([5.0])))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(5.0)


def test_simplex_two_vars():
    G = np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    sol = simplex_solve(LpProblem(np.array([1.0, 1.0]), G, np.array([3.0, 0.0, 0.0])))
    assert sol.objective_value == pytest.approx(3.0)


def test_simplex_unbounded():
    sol = simplex_solve(LpProblem(np.array([1.0]), np.array([[-1.0]]), np.array([0.0])))
    assert sol.status is LpStatus.UNBOUNDED


def test_simplex_infeasible():
    G = np.array([[1.0], [-1.0]])
    sol = simplex_solve(LpProblem(np.array([1.0]), G, np.array([2.0, -1.0])))
    assert sol.status is LpStatus.INFEASIBLE


def test_simplex_degenerate_cycling_example():
    # a classic LP on which Dantzig's rule cycles; Bland's rule must terminate
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    A = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
    G = np.vstack([-A, np.eye(4)])
    h = np.concatenate([[0.0, 0.0, -1.0], np.zeros(4)])
    sol = simplex_solve(LpProblem(c, G, h))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(-0.05)


def test_simplex_iteration_cap():
    G = np.vstack([np.eye(3), np.ones((1, 3))])
    with pytest.raises(ConvergenceError):
        simplex_solve(LpProblem(np.ones(3), G, np.array([1.0, 2.0, 3.0, 10.0])), max_iter=1)


def test_lp_problem_validates_shapes():
    with pytest.raises(InvalidInputError):
        LpProblem(np.ones(2), np.ones((3, 3)), np.ones(3))


def vertex_enumeration_min(c, G, h):
    """Exact LP optimum of a bounded feasible problem by trying every basis."""
    n = G.shape[1]
    best = np.inf
    for rows in itertools.combinations(range(G.shape[0]), n):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x >= h - 1e-9):
            best = min(best, float(c @ x))
    return best


def random_bounded_lp(rng, n):
    box = np.vstack([np.eye(n), -np.eye(n)])
    extra = rng.standard_normal((int(rng.integers(1, 5)), n))
    G = np.vstack([box, extra])
    # the origin is strictly feasible for the extra rows
    h = np.concatenate([-5 * np.ones(2 * n), -rng.random(len(extra))])
    return rng.standard_normal(n), G, h


@pytest.mark.parametrize("seed", range(30))
def test_simplex_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    c, G, h = random_bounded_lp(rng, int(rng.integers(1, 4)))
    sol = simplex_solve(LpProblem(c, G, h))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(vertex_enumeration_min(c, G, h), abs=1e-9)
    ref = scipy.optimize.linprog(c, A_ub=-G, b_ub=-h, bounds=[(None, None)] * len(c))
    assert sol.objective_value == pytest.approx(ref.fun, abs=1e-7)


@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_simplex_duals_certify_optimality(n, seed):
    rng = np.random.default_rng(seed)
    c, G, h = random_bounded_lp(rng, n)
    sol = simplex_solve(LpProblem(c, G, h))
    y = sol.duals
    slack = G @ sol.x - h
    assert np.all(slack >= -1e-9)
    assert np.all(y >= -1e-9)
    np.testing.assert_allclose(G.T @ y, c, atol=1e-7)
    assert h @ y == pytest.approx(sol.objective_value, abs=1e-7)
    assert np.max(np.abs(y * slack)) <= 1e-7
