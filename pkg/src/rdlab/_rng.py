"""Seed derivation for reproducible parallel trials.

Every trial gets its own stream derived from (master_seed, trial_index)
through splitmix64, so results are independent of worker scheduling.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; maps a 64-bit state to a well-mixed 64-bit value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Derive the 64-bit seed for one trial from the master seed."""
    return splitmix64((master_seed & _MASK64) ^ splitmix64(trial_index & _MASK64))


def generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a derived seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
