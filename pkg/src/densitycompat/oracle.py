"""Brute-force generators and checkers.

Nothing here goes through the Jacobi solver or the projector helpers in
:mod:`densitycompat.qcore`: spectral work uses LAPACK via ``numpy.linalg``
and reductions are explicit index loops, so agreement between the two is
meaningful.

The contradiction search is exhaustive only over projectors built from the
eigenbases of ``a``, ``b`` and ``b - a`` (every non-empty subset of each
eigenbasis); beyond that it samples ``trials`` random effects. A negative
result is therefore evidence, not proof, that no contradicting effect exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .compat import Effect
from .qcore import DEFAULT_TOL, BlochVector, DensityMatrix, Tolerances
from .sampling import Stream, stream
from .scenario import ScenarioConfig, conditional_records, prepare_entangled

_EFFECT_CHUNK = 1000


@dataclass(frozen=True)
class RandomSpec:
    dim: int
    rank: int
    seed: int
    count: int = 1

    def __post_init__(self):
        if not 2 <= self.dim <= 8:
            raise ValueError(f"dim must be in 2..8, got {self.dim}")
        if not 1 <= self.rank <= self.dim:
            raise ValueError(f"rank must be in 1..{self.dim}, got {self.rank}")
        if self.count < 1:
            raise ValueError("count must be positive")


def _density_from_stream(dim: int, rank: int, rng: Stream) -> DensityMatrix:
    g = rng.complex_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_density(spec: RandomSpec) -> DensityMatrix:
    """``G G^dagger / Tr`` with ``G`` a ``dim x rank`` complex Gaussian matrix."""
    return _density_from_stream(spec.dim, spec.rank, Stream(spec.seed))


def random_densities(spec: RandomSpec) -> list[DensityMatrix]:
    """``spec.count`` independent draws, the i-th from child stream i of ``spec.seed``."""
    return [_density_from_stream(spec.dim, spec.rank, stream(spec.seed, i)) for i in range(spec.count)]


def random_pair(master_seed: int, index: int) -> tuple[DensityMatrix, DensityMatrix]:
    """Two random states of a shared random dimension (2..8) and independent random ranks.

    Everything comes from child stream ``index`` of ``master_seed``: three
    uniforms pick dim, rank_a and rank_b, then a and b are drawn in that order.
    """
    rng = stream(master_seed, index)
    u = rng.uniform(3)
    dim = 2 + int(u[0] * 7)
    rank_a = 1 + int(u[1] * dim)
    rank_b = 1 + int(u[2] * dim)
    return _density_from_stream(dim, rank_a, rng), _density_from_stream(dim, rank_b, rng)


def random_hermitian(dim: int, count: int, rng: Stream) -> np.ndarray:
    """GUE samples from ``dim**2`` reals each: ``sym(X) + i antisym(X)``."""
    x = rng.normal((count, dim, dim))
    xt = np.swapaxes(x, -1, -2)
    h = np.empty(x.shape, dtype=np.complex128)
    h.real = x + xt
    h.imag = x - xt
    h *= 0.5
    return h


def _squash(h: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[-1])
    return (h - lo[:, None, None] * eye) / (hi - lo)[:, None, None]


def random_effect_matrices(dim: int, count: int, rng: Stream) -> np.ndarray:
    """Random Hermitians with their spectral range mapped affinely onto [0, 1]."""
    h = random_hermitian(dim, count, rng)
    w = np.linalg.eigvalsh(h)
    return _squash(h, w[:, 0], w[:, -1])


def random_effect(dim: int, seed: int) -> Effect:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return Effect(random_effect_matrices(dim, 1, Stream(seed))[0])


def random_unitary(dim: int, rng: Stream) -> np.ndarray:
    """Haar unitary from the QR decomposition of a complex Gaussian matrix."""
    z = rng.complex_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def orthogonal_support_pair(dim: int, seed: int) -> tuple[DensityMatrix, DensityMatrix]:
    """Random rotation of two block-diagonal states with disjoint blocks."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = Stream(seed)
    u = rng.uniform(2)
    rank_a = 1 + int(u[0] * (dim - 1))
    rank_b = 1 + int(u[1] * (dim - rank_a))
    weights = rng.uniform(dim) + 0.05
    da = np.zeros(dim)
    db = np.zeros(dim)
    da[:rank_a] = weights[:rank_a] / weights[:rank_a].sum()
    db[rank_a : rank_a + rank_b] = weights[rank_a : rank_a + rank_b] / weights[rank_a : rank_a + rank_b].sum()
    v = random_unitary(dim, rng)
    a = (v * da) @ v.conj().T
    b = (v * db) @ v.conj().T
    return DensityMatrix(a), DensityMatrix(b)


def partial_trace_loops(rho: np.ndarray, dim_left: int, dim_right: int) -> np.ndarray:
    out = np.zeros((dim_left, dim_left), dtype=np.complex128)
    for i in range(dim_left):
        for j in range(dim_left):
            s = 0j
            for k in range(dim_right):
                s += rho[i * dim_right + k, j * dim_right + k]
            out[i, j] = s
    return out


def ensemble_left_state(theta: float, u: np.ndarray) -> np.ndarray:
    """Outcome-weighted mixture of Alice's conditional states, from raw amplitudes."""
    c, s = math.cos(theta), math.sin(theta)
    psi = np.array([[c, 0.0], [0.0, s]], dtype=np.complex128)
    amps = psi @ np.asarray(u).T
    total = np.zeros((2, 2), dtype=np.complex128)
    for k in range(2):
        col = amps[:, k]
        total += np.outer(col, col.conj())
    return total


@lru_cache(maxsize=None)
def _subset_masks(dim: int) -> np.ndarray:
    masks = [[(bits >> j) & 1 for j in range(dim)] for bits in range(1, 1 << dim)]
    masks.sort(key=sum)
    return np.array(masks, dtype=np.float64)


def eigenprojector_pool(
    a: DensityMatrix, b: DensityMatrix
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(vectors, masks, (tr_a, tr_b))`` for the eigenbases of b, a and b - a.

    Each row of ``masks`` selects eigenvectors whose span is one candidate
    projector; ``tr_a`` / ``tr_b`` hold that projector's probability under
    ``a`` / ``b``.
    """
    masks = _subset_masks(a.dim)
    for m in (b.matrix, a.matrix, b.matrix - a.matrix):
        _, v = np.linalg.eigh(m)
        da = np.einsum("ij,ik,kj->j", v.conj(), a.matrix, v).real
        db = np.einsum("ij,ik,kj->j", v.conj(), b.matrix, v).real
        yield v, masks, (masks @ da, masks @ db)


def search_contradiction(
    a: DensityMatrix,
    b: DensityMatrix,
    trials: int,
    seed: int,
    tol: Tolerances = DEFAULT_TOL,
) -> Effect | None:
    """First effect ``m`` with ``Tr(a m) <= tol.witness`` and ``Tr(b m) >= 1 - tol.witness``.

    Candidates: all eigenprojectors first, then ``trials`` random effects
    drawn from ``Stream(seed)`` in chunks of 1000.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    lo_ok, hi_ok = tol.witness, 1.0 - tol.witness
    for v, masks, (ta, tb) in eigenprojector_pool(a, b):
        hits = np.flatnonzero((ta <= lo_ok) & (tb >= hi_ok))
        if hits.size:
            cols = v[:, masks[hits[0]] > 0]
            return Effect(cols @ cols.conj().T, tol)

    rng = Stream(seed)
    dim = a.dim
    _, va = np.linalg.eigh(a.matrix)
    _, vb = np.linalg.eigh(b.matrix)
    probes = np.concatenate([va, vb], axis=1)
    done = 0
    while done < trials:
        k = min(_EFFECT_CHUNK, trials - done)
        h = random_hermitian(dim, k, rng)
        flat = h.reshape(k, -1)
        tra = (flat @ a.matrix.T.reshape(-1)).real
        trb = (flat @ b.matrix.T.reshape(-1)).real
        idx = np.flatnonzero(_may_contradict(h, tra, trb, probes, tol.witness))
        if idx.size:
            h = h[idx]
            w = np.linalg.eigvalsh(h)
            lo, hi = w[:, 0], w[:, -1]
            # Tr(rho E) with E = (H - lo)/(hi - lo) and Tr(rho) = 1.
            ta = (tra[idx] - lo) / (hi - lo)
            tb = (trb[idx] - lo) / (hi - lo)
            hits = np.flatnonzero((ta <= lo_ok) & (tb >= hi_ok))
            if hits.size:
                i = hits[0]
                return Effect(_squash(h[i : i + 1], lo[i : i + 1], hi[i : i + 1])[0], tol)
        done += k
    return None


def _may_contradict(h, tra, trb, probes, tol_witness) -> np.ndarray:
    """False where the squashed effect of ``h`` provably misses the contradiction predicate.

    Rayleigh quotients of the basis vectors and the probe columns bound the extreme eigenvalues
    (``lambda_min <= r <= lambda_max``) and the spectral range is at most
    ``2 ||H||_F``, so ``Tr(a H) - min r > tol * 2 ||H||_F`` rules out
    ``Tr(a E) <= tol``; symmetrically for ``b``.
    """
    n, dim, _ = h.shape
    hp = (h.reshape(n * dim, dim) @ probes).reshape(n, dim, -1)
    r = np.einsum("ij,nij->nj", probes.conj(), hp).real
    d = np.diagonal(h, axis1=1, axis2=2).real
    r_min = np.minimum(r.min(axis=1), d.min(axis=1))
    r_max = np.maximum(r.max(axis=1), d.max(axis=1))
    parts = h.view(np.float64).reshape(n, -1)
    slack = (2.0 * tol_witness + 1e-12) * np.sqrt(np.einsum("ij,ij->i", parts, parts))
    return (tra - r_min <= slack) & (r_max - trb <= slack)


def binomial_band(p: float, shots: int, sigmas: float = 4.0) -> float:
    return sigmas * math.sqrt(max(p * (1.0 - p), 0.0) / shots)


def simulate_frequencies(
    config: ScenarioConfig, direction: BlochVector, shots: int
) -> tuple[float, float]:
    """Empirical spin-up frequency along ``direction`` and Bob's prediction for it.

    Each shot draws two uniforms from ``Stream(config.seed)``: the first picks
    Alice's outcome (0 iff ``u < p0``), the second the spin result on her
    conditional state (up iff ``u < P(up)``).
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    d = direction.as_array()
    if abs(np.linalg.norm(d) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    records = {r.outcome: r for r in conditional_records(config)}
    bob = next(iter(records.values())).bob_state
    p0 = records[0].probability if 0 in records else 0.0
    p_up = np.zeros(2)
    for k, rec in records.items():
        p_up[k] = _spin_up(rec.alice_state.matrix, d)
    u = Stream(config.seed).uniform((shots, 2))
    outcome = np.where(u[:, 0] < p0, 0, 1)
    up = u[:, 1] < p_up[outcome]
    return float(np.count_nonzero(up)) / shots, _spin_up(bob.matrix, d)


def _spin_up(rho: np.ndarray, d: np.ndarray) -> float:
    # <up_d|rho|up_d> with (1 + d.sigma)/2 written out entrywise.
    proj = 0.5 * np.array(
        [[1 + d[2], d[0] - 1j * d[1]], [d[0] + 1j * d[1], 1 - d[2]]], dtype=np.complex128
    )
    return float(np.einsum("ij,ji->", rho, proj).real)


def bob_reduced_state(theta: float) -> np.ndarray:
    """Bob's state from the prepared amplitudes, via the loop partial trace."""
    psi = prepare_entangled(theta).amplitudes
    return partial_trace_loops(np.outer(psi, psi.conj()), 2, 2)
