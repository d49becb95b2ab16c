"""Seeded, portable random streams.

Raw 64-bit words come from the PCG64 bit generator, whose output stream is
stable across numpy releases. Conversions to floats are done here rather than
through ``numpy.random.Generator`` methods, which carry no such guarantee:

* uniform: ``(word >> 11) * 2**-53`` in [0, 1)
* Gaussian: Box-Muller on consecutive word pairs ``(u1, u2)`` with
  ``u1 = ((w1 >> 11) + 1) * 2**-53`` in (0, 1] and ``u2`` uniform as above,
  yielding ``r*cos(theta)`` then ``r*sin(theta)``.

This transform is part of the output contract; changing it changes every
noisy trajectory and every model initialisation.
"""
from __future__ import annotations

import numpy as np

_TWO_NEG_53 = 2.0**-53


class PortableRNG:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self._bits = np.random.PCG64(self.seed)

    def raw(self, n: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(n), dtype=np.uint64)

    def uniform(self, low: float, high: float, size: int) -> np.ndarray:
        u = (self.raw(size) >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53
        return low + (high - low) * u

    def normal(self, size: int, sigma: float = 1.0) -> np.ndarray:
        n_pairs = (size + 1) // 2
        words = self.raw(2 * n_pairs).reshape(n_pairs, 2)
        u1 = ((words[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_NEG_53
        u2 = (words[:, 1] >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * n_pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return sigma * z[:size]
