"""Reproducible random streams.

Every random quantity in the package is derived from one generator recipe so
that streams can be replayed bit for bit, including by other implementations:

* Bit source: PCG64 (128-bit LCG state, XSL-RR output permutation) seeded
  through ``numpy.random.SeedSequence(seed)``.
* Uniforms: ``u = (raw >> 11) * 2**-53`` from consecutive 64-bit outputs,
  giving doubles in ``[0, 1)``.
* Gaussians: Box-Muller on consecutive uniform pairs ``(u1, u2)``:
  ``r = sqrt(-2 log(1 - u1))``, emitting ``r cos(2 pi u2)`` then
  ``r sin(2 pi u2)``.
* Child streams: task ``i`` of master seed ``s`` uses
  ``SeedSequence(s, spawn_key=(i,))``, which is what ``SeedSequence.spawn``
  produces, so results do not depend on scheduling order.
"""

from __future__ import annotations

import numpy as np

_INV_2_53 = 1.0 / 9007199254740992.0


class Stream:
    """Uniform and Gaussian draws on top of a raw PCG64 source."""

    def __init__(self, seed: int | np.random.SeedSequence):
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(_check_seed(seed))
        self._bits = np.random.PCG64(seed)

    def uniform(self, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        raw = self._bits.random_raw(n) if n else np.zeros(0, dtype=np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) * _INV_2_53).reshape(shape)

    def normal(self, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        phase = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = r * np.cos(phase)
        out[:, 1] = r * np.sin(phase)
        return out.reshape(-1)[:n].reshape(shape)

    def complex_normal(self, size) -> np.ndarray:
        """Standard complex Gaussians, E|z|^2 = 1."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        g = self.normal(shape + (2,))
        return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    if seed >= 2**64:
        raise ValueError("seed must fit in 64 bits")
    return int(seed)


def child_seed(master: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(_check_seed(master), spawn_key=(int(index),))


def stream(seed: int, index: int | None = None) -> Stream:
    if index is None:
        return Stream(seed)
    return Stream(child_seed(seed, index))
