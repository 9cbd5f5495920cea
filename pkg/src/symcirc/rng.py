"""Counter-based random numbers (Philox4x32-10).

Every uniform draw in the circuit simulator is a pure function of
``(seed, trajectory, layer, gate)``, so results do not depend on how
trajectories are scheduled across threads.
"""
from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["philox4x32", "uniform", "CounterStream", "STREAM_CIRCUIT"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

# stream tags, carried in the fourth counter word
STREAM_CIRCUIT = 0


@njit(cache=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block; all words are unsigned 32-bit values held in uint64."""
    c0 = np.uint64(c0) & _MASK
    c1 = np.uint64(c1) & _MASK
    c2 = np.uint64(c2) & _MASK
    c3 = np.uint64(c3) & _MASK
    k0 = np.uint64(k0) & _MASK
    k1 = np.uint64(k1) & _MASK
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _S32
        lo0 = p0 & _MASK
        hi1 = p1 >> _S32
        lo1 = p1 & _MASK
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


@njit(cache=True)
def uniform(seed, trajectory, layer, gate, stream=0):
    """Uniform double in [0, 1) with 53 random bits."""
    s = np.uint64(seed)
    t = np.uint64(trajectory)
    w0, w1, _, _ = philox4x32(
        np.uint64(gate), np.uint64(layer), t & _MASK, (t >> _S32) ^ (np.uint64(stream) << np.uint64(24)),
        s & _MASK, s >> _S32,
    )
    a = w0 >> np.uint64(5)
    b = w1 >> np.uint64(6)
    return (float(a) * 67108864.0 + float(b)) * (1.0 / 9007199254740992.0)


class CounterStream:
    """Per-trajectory stream whose ``random(size)`` call draws one value per gate.

    Each call covers one circuit layer: value ``g`` is
    ``uniform(seed, trajectory, layer, g)``, then the layer counter advances.
    This reproduces the draws of the compiled ensemble simulator exactly.
    """

    def __init__(self, seed: int, trajectory: int, layer: int = 0):
        self.seed = int(seed)
        self.trajectory = int(trajectory)
        self.layer = int(layer)

    def random(self, size=None):
        if size is None:
            out = uniform(self.seed, self.trajectory, self.layer, 0)
        else:
            out = np.array([uniform(self.seed, self.trajectory, self.layer, g) for g in range(int(size))])
        self.layer += 1
        return out
