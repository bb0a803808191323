"""JSON wire format for matrices.

A matrix is ``{"dim": n, "entries": [[re, im], ...]}`` with the ``n*n``
entries in row-major order. Non-finite numbers are rejected both ways.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .qcore import MAX_DIM, as_matrix


class MatrixFormatError(ValueError):
    pass


def _reject_constant(name):
    raise MatrixFormatError(f"non-finite number {name!r} in JSON")


def loads(text: str):
    """``json.loads`` that refuses NaN and Infinity literals."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from exc


def dumps(obj, **kwargs) -> str:
    return json.dumps(obj, allow_nan=False, **kwargs)


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "dim": m.shape[0],
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise MatrixFormatError('matrix JSON needs "dim" and "entries"')
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or not 1 <= dim <= MAX_DIM:
        raise MatrixFormatError(f"bad dim {dim!r}")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise MatrixFormatError(f"expected {dim * dim} entries")
    flat = []
    for pair in entries:
        if not isinstance(pair, list) or len(pair) != 2:
            raise MatrixFormatError("each entry must be a [re, im] pair")
        re, im = pair
        for x in (re, im):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise MatrixFormatError(f"bad number {x!r}")
        flat.append(complex(re, im))
    return np.array(flat, dtype=np.complex128).reshape(dim, dim)


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(loads(Path(path).read_text()))


def write_matrix(path, m) -> None:
    Path(path).write_text(dumps(matrix_to_json(m)) + "\n")
