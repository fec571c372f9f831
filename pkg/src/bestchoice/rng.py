"""Philox4x32-10 counter-based generator, vectorised with numpy.

Each call maps a 128-bit counter and a 64-bit key to four 32-bit words with
no internal state, so any trial's stream can be regenerated from
``(seed, trial index, draw index)`` alone. Constants are those of Salmon et
al. (2011), "Parallel random numbers: as easy as 1, 2, 3".
"""

from __future__ import annotations

import numpy as np

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
ROUNDS = 10

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)

# counter word 3 separates independent uses of the same (seed, trial)
DOMAIN_TRIAL = 0
DOMAIN_RANKS = 1

_INV_2_53 = 1.0 / 9007199254740992.0


def philox4x32(c0, c1, c2, c3, k0, k1):
    """Apply Philox4x32-10. Inputs broadcast; returns four uint64 arrays of 32-bit words."""
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK32 for c in (c0, c1, c2, c3))
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    k0 = int(k0) & 0xFFFFFFFF
    k1 = int(k1) & 0xFFFFFFFF
    m0 = np.uint64(PHILOX_M0)
    m1 = np.uint64(PHILOX_M1)
    for rnd in range(ROUNDS):
        if rnd:
            k0 = (k0 + PHILOX_W0) & 0xFFFFFFFF
            k1 = (k1 + PHILOX_W1) & 0xFFFFFFFF
        prod0 = m0 * c0
        prod1 = m1 * c2
        c0, c1, c2, c3 = (
            (prod1 >> _SHIFT32) ^ c1 ^ np.uint64(k0),
            prod1 & _MASK32,
            (prod0 >> _SHIFT32) ^ c3 ^ np.uint64(k1),
            prod0 & _MASK32,
        )
    return c0, c1, c2, c3


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def uniform_pair(seed, index, block, domain=DOMAIN_TRIAL):
    """Two uniforms on (0, 1] from one Philox block.

    ``index`` (trial number) and ``block`` broadcast against each other.
    Each uniform carries 53 random bits.
    """
    seed = _check_seed(seed)
    index = np.asarray(index, dtype=np.uint64)
    x0, x1, x2, x3 = philox4x32(block, index & _MASK32, index >> _SHIFT32, domain, seed, seed >> 32)
    a = ((x0 >> np.uint64(5)) << np.uint64(26)) | (x1 >> np.uint64(6))
    b = ((x2 >> np.uint64(5)) << np.uint64(26)) | (x3 >> np.uint64(6))
    return (a + np.uint64(1)).astype(np.float64) * _INV_2_53, (b + np.uint64(1)).astype(np.float64) * _INV_2_53


class TrialStream:
    """Uniforms for one trial, addressed by position in the stream."""

    def __init__(self, seed: int, index: int, domain: int = DOMAIN_TRIAL):
        self.seed = _check_seed(seed)
        self.index = int(index)
        self.domain = domain
        self._cache = {}

    def uniform(self, j: int) -> float:
        block, half = divmod(j, 2)
        if block not in self._cache:
            u, v = uniform_pair(self.seed, self.index, block, self.domain)
            self._cache[block] = (float(u), float(v))
        return self._cache[block][half]

    def uniforms(self, count: int) -> np.ndarray:
        blocks = np.arange((count + 1) // 2, dtype=np.uint64)
        u, v = uniform_pair(self.seed, self.index, blocks, self.domain)
        return np.column_stack([u, v]).ravel()[:count]
