"""Matrix files: CSV (one row per line) and JSON ``{"rows", "cols", "data"}``."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError


def _number(token: str, line: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line, column)
    return value


def parse_csv(text: str) -> np.ndarray:
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        tokens = raw.split(",")
        row = [_number(tok.strip(), lineno, col) for col, tok in enumerate(tokens, start=1)]
        if rows and len(row) != len(rows[0]):
            raise ParseError(f"ragged row: expected {len(rows[0])} values, got {len(row)}", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix file")
    return np.array(rows, dtype=float)


def parse_json(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ParseError('JSON matrix must be an object with "rows", "cols" and "data"')
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise ParseError('"rows" and "cols" must be positive integers')
    if not isinstance(data, list) or len(data) != rows * cols:
        n = len(data) if isinstance(data, list) else "non-list"
        raise ParseError(f'"data" must hold rows*cols = {rows * cols} numbers, got {n}')
    values = []
    for i, v in enumerate(data):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"data[{i}] is not a number: {v!r}")
        if not math.isfinite(v):
            raise ParseError(f"data[{i}] is not finite")
        values.append(float(v))
    return np.array(values, dtype=float).reshape(rows, cols)


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    if fmt == "json":
        return parse_json(text)
    if fmt == "csv":
        return parse_csv(text)
    raise ParseError(f"unknown matrix format {fmt!r}")


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return {"rows": M.shape[0], "cols": M.shape[1], "data": [float(v) for v in M.ravel()]}


def dumps_matrix_json(M) -> str:
    # json emits repr() floats, which round-trip exactly
    return json.dumps(matrix_to_json(M))


def dumps_matrix_csv(M) -> str:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in M)
