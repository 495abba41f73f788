"""Deterministic, splittable random streams for parallel Monte Carlo trials.

Trial ``t`` of an experiment with master seed ``s`` uses the counter-based
Philox generator keyed with ``mix64(s, t)``.  Streams for distinct trial
indices are independent for all practical purposes and do not depend on the
order in which trials execute, so parallel runs reproduce sequential ones.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int) -> int:
    """SplitMix64 finalizer applied to ``seed + index * golden_gamma``.

    This is the standard 64-bit avalanche mix (Steele et al.); nearby
    (seed, index) pairs map to statistically unrelated outputs.
    """
    z = (int(seed) + int(index) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    """Generator for one trial, derived from the master seed and trial index."""
    return np.random.Generator(np.random.Philox(key=mix64(master_seed, index)))
