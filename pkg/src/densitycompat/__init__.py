"""Consistency conditions between density matrices held by different observers."""

from .qcore import (
    DEFAULT_TOL,
    BlochVector,
    DensityMatrix,
    DimensionError,
    InvariantError,
    Ket,
    Tolerances,
    UnitaryOp,
)

__version__ = "0.1.0"
