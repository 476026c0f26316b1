"""Timing harness: random full-rank payoff matrices, sublattice and minlat paths."""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass

import numpy as np

from .lattice import PayoffCollection, generate_sublattice, minimal_lattice_subspace
from .numerics import PIVOT_TOL, rank


@dataclass(frozen=True)
class BenchRow:
    rank: int
    sublat_total_s: float
    minlat_total_s: float


def random_payoffs(rng: np.random.Generator, n: int, tol: float = PIVOT_TOL) -> np.ndarray:
    """A uniform [0,1) matrix with n+2 rows and n independent columns.

    Rank-deficient draws are discarded and redrawn.
    """
    while True:
        A = rng.random((n + 2, n))
        if rank(A, tol) == n:
            return A


def bench_matrices(n: int, reps: int, seed: int) -> list[np.ndarray]:
    """The instances for one rank; they depend only on (seed, n)."""
    rng = np.random.default_rng([seed, n])
    return [random_payoffs(rng, n) for _ in range(reps)]


def run_bench(ranks, reps: int = 50, seed: int = 0, repeat: int = 1) -> list[BenchRow]:
    """Total time per rank over ``reps`` random instances.

    Ranks are visited round-robin inside the repetition loop, so a slow
    stretch on a shared machine is spread over all ranks instead of landing on
    one. Each instance keeps its fastest of ``repeat`` timings. As with
    ``timeit``, garbage collection is paused while timing.
    """
    ranks = list(ranks)
    cases = {n: [PayoffCollection.from_columns(A) for A in bench_matrices(n, reps, seed)] for n in ranks}
    totals = {n: [0.0, 0.0] for n in ranks}
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for i in range(reps):
            for n in ranks:
                X = cases[n][i]
                for slot, fn in enumerate((generate_sublattice, minimal_lattice_subspace)):
                    best = np.inf
                    for _ in range(repeat):
                        t0 = time.perf_counter()
                        fn(X)
                        best = min(best, time.perf_counter() - t0)
                    totals[n][slot] += best
    finally:
        if was_enabled:
            gc.enable()
    return [BenchRow(n, *totals[n]) for n in ranks]


def bench_csv(rows: list[BenchRow]) -> str:
    lines = ["rank,sublat_total_s,minlat_total_s"]
    lines += [f"{r.rank},{r.sublat_total_s:.6f},{r.minlat_total_s:.6f}" for r in rows]
    return "\n".join(lines) + "\n"
