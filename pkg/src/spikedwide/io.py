"""File exchange: headerless row-major CSV matrices and deterministic JSON."""

import json

import numpy as np

from .errors import ValidationError

__all__ = ["read_matrix", "write_matrix", "write_json", "read_json"]


def read_matrix(path):
    """Load a headerless CSV matrix (rows = observations)."""
    try:
        mat = np.loadtxt(path, delimiter=",", ndmin=2)
    except Exception as exc:
        raise ValidationError(f"could not parse matrix CSV {path}: {exc}") from exc
    return mat


def write_matrix(path, matrix):
    """Write a matrix as headerless CSV with shortest round-trip floats."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValidationError("matrix must be two-dimensional")
    with open(path, "w") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


def write_json(path, payload):
    """Deterministic JSON (sorted keys, stable layout)."""
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
