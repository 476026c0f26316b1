"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 parse or configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .errors import InvalidInputError, LatticeKitError, ParseError
from .lattice import PayoffCollection, classify, generate_sublattice, minimal_lattice_subspace
from .markets import InsuranceProblem, MarketSpec, complete_by_options, min_cost_insurance
from .matrix_io import dumps_matrix_csv, matrix_to_json, read_matrix
from .numerics import PIVOT_TOL

SCHEMA = "lattice-kit/1"
COMMANDS = ("classify", "sublattice", "minlat", "complete", "insure", "bench")
EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class ConfigError(InvalidInputError):
    code = "config_error"


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    strikes: Path | None = None
    prices: Path | None = None
    theta: Path | None = None
    phi: Path | None = None
    tol: float = PIVOT_TOL
    format: str = "json"
    rows_are_vectors: bool = False
    seed: int = 0
    ranks: tuple[int, int] = (3, 30)
    reps: int = 50
    repeat: int = 5
    timing: bool = True
    out: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.format not in ("json", "csv", "table"):
            raise ConfigError(f"unknown output format {self.format!r}")
        lo, hi = self.ranks
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad rank range {lo}..{hi}")
        if self.reps < 1 or self.repeat < 1:
            raise ConfigError("--reps and --repeat must be at least 1")


@dataclass
class ResultDocument:
    command: str
    inputs: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    timing_ms: float | None = None
    error: dict | None = None

    def to_json(self) -> dict:
        doc = {"schema": SCHEMA, "command": self.command}
        if self.error is not None:
            doc["status"] = "error"
            doc["error"] = self.error
            return doc
        doc["status"] = "ok"
        doc["input"] = {k: matrix_to_json(v) for k, v in self.inputs.items()}
        doc["meta"] = self.meta
        doc["results"] = {k: matrix_to_json(v) for k, v in self.matrices.items()}
        if self.timing_ms is not None:
            doc["timing_ms"] = self.timing_ms
        return doc


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------


def _require(path: Path | None, flag: str) -> Path:
    if path is None:
        raise ConfigError(f"{flag} is required for this command")
    return path


def _vectors(cfg: RunConfig, path: Path | None, flag: str) -> np.ndarray:
    """Vectors as rows; files hold them as columns unless --rows-are-vectors."""
    M = read_matrix(_require(path, flag))
    return M if cfg.rows_are_vectors else M.T


def _flat(path: Path | None, flag: str) -> np.ndarray:
    return read_matrix(_require(path, flag)).ravel()


def _run_classify(cfg: RunConfig, doc: ResultDocument) -> None:
    X = PayoffCollection(_vectors(cfg, cfg.input, "--input"), cfg.tol)
    doc.inputs["payoffs"] = X.vectors
    c = classify(X, cfg.tol)
    doc.meta = {"kind": c.kind.value, "n": c.n, "m": c.m, "d": c.d, "k": c.k}


def _run_sublattice(cfg: RunConfig, doc: ResultDocument) -> None:
    X = PayoffCollection(_vectors(cfg, cfg.input, "--input"), cfg.tol)
    doc.inputs["payoffs"] = X.vectors
    res = generate_sublattice(X, cfg.tol)
    doc.meta = {"n": X.n, "m": res.beta.m, "k": X.k, "dimension": res.dimension}
    doc.matrices["vector_sublattice"] = res.generators
    doc.matrices["positive_basis"] = res.basis.basis


def _run_minlat(cfg: RunConfig, doc: ResultDocument) -> None:
    X = PayoffCollection(_vectors(cfg, cfg.input, "--input"), cfg.tol)
    doc.inputs["payoffs"] = X.vectors
    res = minimal_lattice_subspace(X, cfg.tol)
    doc.meta = {
        "n": X.n,
        "m": res.beta.m,
        "d": res.beta.d,
        "k": X.k,
        "dimension": res.dimension,
        "domain": [int(j) for j in res.domain],
    }
    doc.matrices["minimal_lattice_subspace"] = res.generators
    doc.matrices["xi"] = res.xi_table
    doc.matrices["positive_basis"] = res.basis.basis


def _run_complete(cfg: RunConfig, doc: ResultDocument) -> None:
    prim = _vectors(cfg, cfg.input, "--input")
    strikes = _vectors(cfg, cfg.strikes, "--strikes") if cfg.strikes is not None else None
    market = MarketSpec(prim, strikes, cfg.tol)
    doc.inputs["primitives"] = market.primitives
    if market.strikes.shape[0]:
        doc.inputs["strikes"] = market.strikes
    res = complete_by_options(market)
    doc.meta = {
        "n": market.n,
        "k": market.k,
        "dimension": res.dimension,
        "complete": res.complete,
        "strikes_in_span": res.strikes_in_span,
    }
    doc.matrices["basic_set"] = res.basic_set
    doc.matrices["vector_sublattice"] = res.generators
    doc.matrices["positive_basis"] = res.basis.basis


def _run_insure(cfg: RunConfig, doc: ResultDocument) -> None:
    X = PayoffCollection(_vectors(cfg, cfg.input, "--input"), cfg.tol)
    problem = InsuranceProblem(
        X,
        _flat(cfg.prices, "--prices"),
        _flat(cfg.theta, "--theta"),
        _flat(cfg.phi, "--phi"),
    )
    doc.inputs.update(payoffs=X.vectors, prices=problem.prices, theta=problem.portfolio, phi=problem.floor)
    sol = min_cost_insurance(problem)
    doc.meta = {"n": X.n, "k": X.k, "cost": sol.cost}
    doc.matrices.update(eta=sol.eta, payoff=sol.payoff, target=sol.target, lattice_sup=sol.lattice_sup)


def _run_bench(cfg: RunConfig, doc: ResultDocument) -> None:
    lo, hi = cfg.ranks
    rows = bench_mod.run_bench(range(lo, hi + 1), cfg.reps, cfg.seed, cfg.repeat)
    doc.meta = {"seed": cfg.seed, "reps": cfg.reps, "repeat": cfg.repeat}
    doc.matrices["timings"] = np.array([[r.rank, r.sublat_total_s, r.minlat_total_s] for r in rows])


_HANDLERS = {
    "classify": _run_classify,
    "sublattice": _run_sublattice,
    "minlat": _run_minlat,
    "complete": _run_complete,
    "insure": _run_insure,
    "bench": _run_bench,
}


def run(cfg: RunConfig) -> tuple[ResultDocument, int]:
    doc = ResultDocument(cfg.command)
    t0 = time.perf_counter()
    try:
        _HANDLERS[cfg.command](cfg, doc)
    except (ParseError, ConfigError) as exc:
        doc.error = {"code": exc.code, "message": str(exc)}
        return doc, EXIT_USAGE
    except LatticeKitError as exc:
        doc.error = {"code": exc.code, "message": str(exc)}
        return doc, EXIT_DOMAIN
    if cfg.timing:
        doc.timing_ms = (time.perf_counter() - t0) * 1e3
    return doc, EXIT_OK


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return str(v)


def render(doc: ResultDocument, fmt: str) -> str:
    if fmt == "json" or doc.error is not None:
        return json.dumps(doc.to_json(), indent=2) + "\n"
    if doc.command == "bench" and fmt == "csv":
        rows = [bench_mod.BenchRow(int(r[0]), r[1], r[2]) for r in doc.matrices["timings"]]
        return bench_mod.bench_csv(rows)

    buf = io.StringIO()
    if fmt == "csv":
        buf.write("key,value\n")
        for k, v in doc.meta.items():
            buf.write(f"{k},{_scalar(v)}\n")
        for name, M in doc.matrices.items():
            buf.write(f"\n# {name}\n")
            buf.write(dumps_matrix_csv(M))
        return buf.getvalue()

    width = max((len(k) for k in doc.meta), default=0)
    for k, v in doc.meta.items():
        buf.write(f"{k:<{width}}  {_scalar(v)}\n")
    for name, M in doc.matrices.items():
        M = np.atleast_2d(M)
        cells = [[f"{x:.6g}" for x in row] for row in M]
        w = max(len(c) for row in cells for c in row)
        buf.write(f"\n{name} ({M.shape[0]} x {M.shape[1]})\n")
        for row in cells:
            buf.write("  " + " ".join(c.rjust(w) for c in row) + "\n")
    if doc.timing_ms is not None:
        buf.write(f"\ntime {doc.timing_ms:.3f} ms\n")
    return buf.getvalue()


def _rank_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO-HI, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lattice-kit",
        description="Vector sublattices, minimal lattice-subspaces and positive bases in R^k.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", type=Path, help="payoff matrix (CSV or JSON); columns are vectors")
    p.add_argument("--strikes", type=Path, help="strike vectors, same layout as --input")
    p.add_argument("--prices", type=Path, help="security prices (insure)")
    p.add_argument("--theta", type=Path, help="portfolio to insure (insure)")
    p.add_argument("--phi", type=Path, help="floor portfolio (insure)")
    p.add_argument("--tol", type=float, default=PIVOT_TOL, help="pivot and dedup tolerance")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--rows-are-vectors", action="store_true", help="input rows are the vectors")
    p.add_argument("--seed", type=int, default=0, help="bench RNG seed")
    p.add_argument("--ranks", type=_rank_range, default=(3, 30), help="bench ranks, e.g. 3-30")
    p.add_argument("--reps", type=int, default=50, help="bench instances per rank")
    p.add_argument("--repeat", type=int, default=5, help="bench timings per instance (fastest kept)")
    p.add_argument("--no-timing", dest="timing", action="store_false",
                   help="omit timing so repeated runs give identical output")
    p.add_argument("--out", type=Path, help="write the result here instead of stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        cfg = RunConfig(
            command=args.command,
            input=args.input,
            strikes=args.strikes,
            prices=args.prices,
            theta=args.theta,
            phi=args.phi,
            tol=args.tol,
            format=args.format,
            rows_are_vectors=args.rows_are_vectors,
            seed=args.seed,
            ranks=args.ranks,
            reps=args.reps,
            repeat=args.repeat,
            timing=args.timing,
            out=args.out,
        )
    except ConfigError as exc:
        doc = ResultDocument(args.command, error={"code": exc.code, "message": str(exc)})
        sys.stdout.write(render(doc, "json"))
        return EXIT_USAGE

    doc, code = run(cfg)
    text = render(doc, cfg.format)
    if cfg.out is not None and code == EXIT_OK:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
