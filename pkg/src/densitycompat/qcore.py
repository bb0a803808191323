"""Dense complex linear algebra for small quantum systems.

Matrices are plain ``numpy`` complex128 arrays. The state and operator types
wrap such arrays, validate their invariants on construction and freeze the
underlying buffer, so every value is immutable and safe to share between
threads.

Tensor ordering: the left factor is the slow (most significant) index, so in
a two-qubit basis ``|l r>`` has index ``2*l + r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_DIM = 256


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared across the package."""

    herm: float = 1e-10
    trace: float = 1e-10
    unitary: float = 1e-10
    psd: float = 1e-10
    eig: float = 1e-10
    norm: float = 1e-12
    commute: float = 1e-10
    product: float = 1e-10
    witness: float = 1e-8
    jacobi: float = 1e-14

    def replace(self, **changes) -> "Tolerances":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return Tolerances(**values)


DEFAULT_TOL = Tolerances()


class DimensionError(ValueError):
    pass


class InvariantError(ValueError):
    """A value failed one of its type invariants.

    ``invariant`` names the failed check (``"hermitian"``, ``"trace"``,
    ``"psd"``, ...), so callers can report it without parsing the message.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


# ---------------------------------------------------------------------------
# raw matrix helpers


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise InvariantError("finite", "matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius(m: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


def hermiticity_residual(m: np.ndarray) -> float:
    return frobenius(m - dagger(m))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _is_positive_definite(m: np.ndarray) -> bool:
    # Unpivoted Cholesky; fails exactly when m has a non-positive pivot.
    n = m.shape[0]
    a = [[complex(x) for x in row] for row in m]
    for j in range(n):
        d = a[j][j].real - sum(abs(a[j][k]) ** 2 for k in range(j))
        if not d > 0.0:
            return False
        d = math.sqrt(d)
        a[j][j] = complex(d)
        for i in range(j + 1, n):
            s = a[i][j] - sum(a[i][k] * a[j][k].conjugate() for k in range(j))
            a[i][j] = s / d
    return True


def is_psd(m: np.ndarray, tol: float) -> bool:
    """True iff every eigenvalue of the Hermitian ``m`` exceeds ``-tol``."""
    n = m.shape[0]
    return _is_positive_definite(m + tol * np.eye(n))


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Ket:
    """Unit vector of complex amplitudes."""

    amplitudes: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if v.size < 1 or v.size > MAX_DIM:
            raise DimensionError(f"ket dimension {v.size} out of range")
        if not np.all(np.isfinite(v)):
            raise InvariantError("finite", "ket has non-finite amplitudes")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > self.tol.norm:
            raise InvariantError("norm", f"ket norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @classmethod
    def normalized(cls, amplitudes, tol: Tolerances = DEFAULT_TOL) -> "Ket":
        v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = float(np.linalg.norm(v))
        if not norm > 0.0 or not math.isfinite(norm):
            raise InvariantError("norm", "cannot normalize a zero or non-finite vector")
        return cls(v / norm, tol)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        v = np.zeros(dim, dtype=np.complex128)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.tol)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        herm = hermiticity_residual(m)
        if herm > self.tol.herm:
            raise InvariantError("hermitian", f"hermiticity residual {herm:.3e}")
        m = 0.5 * (m + dagger(m))
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > self.tol.trace:
            raise InvariantError("trace", f"trace {tr!r} differs from 1")
        if not is_psd(m, self.tol.psd):
            raise InvariantError("psd", f"eigenvalue below -{self.tol.psd:g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    def expectation(self, op: np.ndarray) -> float:
        """Real part of Tr(rho @ op)."""
        return float(np.einsum("ij,ji->", self.matrix, op).real)


@dataclass(frozen=True)
class UnitaryOp:
    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        resid = frobenius(dagger(m) @ m - np.eye(m.shape[0]))
        if resid > self.tol.unitary:
            raise InvariantError("unitary", f"U^dagger U residual {resid:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise InvariantError("finite", "Bloch component is not finite")
        n = self.norm()
        if n > 1.0 + DEFAULT_TOL.norm:
            raise InvariantError("norm", f"Bloch vector length {n!r} exceeds 1")

    @classmethod
    def from_array(cls, v: Sequence[float]) -> "BlochVector":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def sigma(self) -> np.ndarray:
        """The operator v . sigma."""
        return self.x * SIGMA_X + self.y * SIGMA_Y + self.z * SIGMA_Z


IDENTITY_2 = _frozen(np.eye(2))
SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Y = _frozen([[0, -1j], [1j, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


# ---------------------------------------------------------------------------
# operations


def tensor(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the slow index."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionError(f"product dimension exceeds {MAX_DIM}")
    return np.kron(a, b)


def partial_trace_right(rho: DensityMatrix, dim_left: int, dim_right: int) -> DensityMatrix:
    """Trace out the right factor of a ``dim_left * dim_right`` state."""
    if dim_left < 1 or dim_right < 1 or dim_left * dim_right != rho.dim:
        raise DimensionError(f"{dim_left} x {dim_right} does not factor dimension {rho.dim}")
    t = rho.matrix.reshape(dim_left, dim_right, dim_left, dim_right)
    return DensityMatrix(np.einsum("ikjk->ij", t), rho.tol)


def eig_hermitian(m, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``w`` ascending and the eigenvector for ``w[j]``
    in column ``v[:, j]``.  Sweeps stop once the off-diagonal Frobenius norm
    drops below ``tol.jacobi`` times ``max(1, ||m||_F)``.
    """
    m = as_matrix(m)
    herm = hermiticity_residual(m)
    if herm > tol.herm * max(1.0, frobenius(m)):
        raise InvariantError("hermitian", f"hermiticity residual {herm:.3e}")
    m = 0.5 * (m + dagger(m))
    n = m.shape[0]
    a = m.tolist()
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    threshold = tol.jacobi * max(1.0, frobenius(m))

    for _ in range(100):
        off = math.sqrt(2.0 * sum(abs(a[p][q]) ** 2 for p in range(n) for q in range(p + 1, n)))
        if off <= threshold:
            break
        for p in range(n - 1):
            ap = a[p]
            for q in range(p + 1, n):
                aq = a[q]
                apq = ap[q]
                r = abs(apq)
                if r == 0.0:
                    continue
                # Phase out arg(apq), then a real symmetric 2x2 rotation.
                theta = (aq[q].real - ap[p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = (apq / r).conjugate()
                r10 = -s * ph
                r11 = c * ph
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x + r10 * y
                    row[q] = s * x + r11 * y
                cr10 = r10.conjugate()
                cr11 = r11.conjugate()
                for k in range(n):
                    x, y = ap[k], aq[k]
                    ap[k] = c * x + cr10 * y
                    aq[k] = s * x + cr11 * y
                ap[q] = 0j
                aq[p] = 0j
                ap[p] = complex(ap[p].real)
                aq[q] = complex(aq[q].real)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x + r10 * y
                    row[q] = s * x + r11 * y
    else:
        raise ArithmeticError("Jacobi iteration did not converge")

    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    return w[order], np.array(v, dtype=np.complex128)[:, order]


def eigenkets(m, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, list[Ket]]:
    w, v = eig_hermitian(m, tol)
    return w, [Ket(v[:, j], tol) for j in range(v.shape[1])]


def _clamped_spectrum(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    w, v = eig_hermitian(rho.matrix, rho.tol)
    if w[0] < -rho.tol.psd:
        raise InvariantError("psd", f"eigenvalue {w[0]:.3e} below -{rho.tol.psd:g}")
    return np.clip(w, 0.0, None), v


def sqrt_psd(rho: DensityMatrix) -> np.ndarray:
    """Hermitian positive square root."""
    w, v = _clamped_spectrum(rho)
    return (v * np.sqrt(w)) @ dagger(v)


def kernel_projector(rho: DensityMatrix, tol_zero: float | None = None) -> np.ndarray:
    """Orthogonal projector onto the eigenvectors of ``rho`` with eigenvalue <= ``tol_zero``.

    ``tol_zero`` defaults to ``rho.tol.psd``.
    """
    if tol_zero is None:
        tol_zero = rho.tol.psd
    w, v = _clamped_spectrum(rho)
    k = v[:, w <= tol_zero]
    return k @ dagger(k)


def support_projector(rho: DensityMatrix, tol_zero: float | None = None) -> np.ndarray:
    return np.eye(rho.dim) - kernel_projector(rho, tol_zero)


def bloch_from_qubit(rho: DensityMatrix) -> BlochVector:
    if rho.dim != 2:
        raise DimensionError(f"Bloch vectors need a qubit, got dimension {rho.dim}")
    return BlochVector(*(rho.expectation(s) for s in PAULIS))


def qubit_from_bloch(v: BlochVector, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    if v.norm() > 1.0 + tol.norm:
        raise InvariantError("norm", f"Bloch vector length {v.norm()!r} exceeds 1")
    return DensityMatrix(0.5 * (IDENTITY_2 + v.sigma()), tol)


def spin_up_probability(rho: DensityMatrix, direction: BlochVector) -> float:
    """Probability of spin up along a unit ``direction``: Tr(rho (1 + d.sigma)/2)."""
    return rho.expectation(0.5 * (IDENTITY_2 + direction.sigma()))
