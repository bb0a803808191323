"""Consistency checks between two observers' density matrices.

Two conditions are checked: the matrices commute, and their product is
non-zero. The second is equivalent to the absence of a contradicting
measurement, i.e. an outcome one observer calls certain and the other
impossible. When the product vanishes, :func:`contradiction_witness` builds
such a measurement explicitly; :func:`verify_theorem_converse` tests the
contradiction predicate for a given effect so that callers can confirm the
product does vanish whenever the predicate holds.

No condition stronger than the non-zero product is decided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matrixio
from .qcore import (
    DEFAULT_TOL,
    DensityMatrix,
    DimensionError,
    InvariantError,
    Ket,
    Tolerances,
    as_matrix,
    frobenius,
    hermiticity_residual,
    is_psd,
    support_projector,
)


class WitnessError(ArithmeticError):
    """The product is numerically zero but the support projector misses the guarantees."""


@dataclass(frozen=True)
class Effect:
    """Hermitian operator with spectrum in [0, 1]."""

    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        herm = hermiticity_residual(m)
        if herm > self.tol.herm:
            raise InvariantError("hermitian", f"effect hermiticity residual {herm:.3e}")
        m = 0.5 * (m + m.conj().T)
        eye = np.eye(m.shape[0])
        if not is_psd(m, self.tol.psd) or not is_psd(eye - m, self.tol.psd):
            raise InvariantError("spectrum", "effect eigenvalues leave [0, 1]")
        m = np.array(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def probability(self, rho: DensityMatrix) -> float:
        return rho.expectation(self.matrix)

    def complement(self) -> "Effect":
        return Effect(np.eye(self.dim) - self.matrix, self.tol)


@dataclass(frozen=True)
class Measurement:
    effects: tuple[Effect, ...]

    def __post_init__(self):
        effects = tuple(self.effects)
        if not effects:
            raise InvariantError("effects", "a measurement needs at least one effect")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise DimensionError("effects have different dimensions")
        resid = frobenius(sum(e.matrix for e in effects) - np.eye(dim))
        if resid > effects[0].tol.eig:
            raise InvariantError("completeness", f"effects sum to identity within {resid:.3e}")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def probabilities(self, rho: DensityMatrix) -> list[float]:
        return [e.probability(rho) for e in self.effects]

    def to_json(self) -> list:
        return [matrixio.matrix_to_json(e.matrix) for e in self.effects]


@dataclass(frozen=True)
class CompatReport:
    commute: bool
    commutator_norm: float
    product_norm: float
    product_nonzero: bool
    witness: Measurement | None = None
    alice_prob: float | None = None
    bob_prob: float | None = None

    def to_json(self) -> dict:
        out = {
            "commute": self.commute,
            "commutator_norm": self.commutator_norm,
            "product_norm": self.product_norm,
            "product_nonzero": self.product_nonzero,
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = {
                "effects": self.witness.to_json(),
                "alice_prob": self.alice_prob,
                "bob_prob": self.bob_prob,
            }
        return out


def _check_pair(a: DensityMatrix, b: DensityMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")


def peierls_first(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    """Commutation test: ``(||ab - ba||_F <= tol.commute, ||ab - ba||_F)``."""
    _check_pair(a, b)
    norm = frobenius(a.matrix @ b.matrix - b.matrix @ a.matrix)
    return norm <= tol.commute, norm


def peierls_second(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, float]:
    """Non-zero product test: ``(||ab||_F > tol.product, ||ab||_F)``."""
    _check_pair(a, b)
    norm = frobenius(a.matrix @ b.matrix)
    return norm > tol.product, norm


def contradiction_witness(
    a: DensityMatrix, b: DensityMatrix, tol: Tolerances = DEFAULT_TOL
) -> Measurement | None:
    """Two-outcome projective measurement separating ``a`` from ``b``, if the product vanishes.

    The first effect is the support projector of ``b`` (certain for ``b``,
    impossible for ``a``); the second is its complement. Returns ``None`` when
    ``||ab||_F > tol.product``.
    """
    nonzero, _ = peierls_second(a, b, tol)
    if nonzero:
        return None
    p = support_projector(b, tol.psd)
    p = 0.5 * (p + p.conj().T)
    first = Effect(p, tol)
    witness = Measurement((first, first.complement()))
    pa, pb = first.probability(a), first.probability(b)
    if pa > tol.witness or pb < 1.0 - tol.witness:
        raise WitnessError(
            f"support projector gives probabilities ({pa:.3e}, {pb:.3e}); input is numerically marginal"
        )
    return witness


def contradicts(a: DensityMatrix, b: DensityMatrix, m: Effect, tol: Tolerances = DEFAULT_TOL) -> bool:
    return m.probability(a) <= tol.witness and m.probability(b) >= 1.0 - tol.witness


def verify_theorem_converse(
    a: DensityMatrix, b: DensityMatrix, m: Effect, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True iff ``a`` gives ``m`` probability ~0 and ``b`` gives it probability ~1.

    Whenever this holds, ``||ab||_F <= dim * sqrt(tol.witness)`` is expected;
    see :func:`converse_bound`.
    """
    _check_pair(a, b)
    if not isinstance(m, Effect):
        raise InvariantError("effect", "m must be an Effect")
    if m.dim != a.dim:
        raise DimensionError(f"effect dimension {m.dim} vs state dimension {a.dim}")
    return contradicts(a, b, m, tol)


def converse_bound(dim: int, tol: Tolerances = DEFAULT_TOL) -> float:
    return dim * math.sqrt(tol.witness)


def zero_expectation_implies_kernel(rho: DensityMatrix, psi: Ket) -> float:
    """``||rho psi||``, which is at most ``sqrt(<psi|rho|psi> * lambda_max(rho))``."""
    if rho.dim != psi.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {psi.dim}")
    return float(np.linalg.norm(rho.matrix @ psi.amplitudes))


def compat_report(a: DensityMatrix, b: DensityMatrix, tol: Tolerances = DEFAULT_TOL) -> CompatReport:
    commute, cnorm = peierls_first(a, b, tol)
    nonzero, pnorm = peierls_second(a, b, tol)
    if nonzero:
        return CompatReport(commute, cnorm, pnorm, True)
    witness = contradiction_witness(a, b, tol)
    pa, pb = witness.effects[0].probability(a), witness.effects[0].probability(b)
    return CompatReport(commute, cnorm, pnorm, False, witness, pa, pb)


def pairwise_compat(
    states: Sequence[DensityMatrix], tol: Tolerances = DEFAULT_TOL
) -> list[list[CompatReport]]:
    """Reports for every pair; ``out[i][j]`` compares ``states[i]`` (as a) with ``states[j]`` (as b)."""
    states = list(states)
    if len(states) < 2:
        raise ValueError("need at least two states")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DimensionError("states have different dimensions")
    n = len(states)
    return [[compat_report(states[i], states[j], tol) for j in range(n)] for i in range(n)]


def incompatible_pairs(reports: list[list[CompatReport]]) -> list[tuple[int, int]]:
    n = len(reports)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if not reports[i][j].product_nonzero]
