"""Seedable random number generation.

Every stochastic routine in the package draws from numpy's PCG64 bit
generator, so a fixed seed reproduces results bit-for-bit across platforms.
Seeds are 64-bit unsigned integers; derived sub-seeds (one per agent, one
per repetition, ...) come from ``derive_seed`` so that streams never alias.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed and return it."""
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    """Create the package-standard generator (PCG64) for a seed."""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(*parts: int) -> int:
    """Deterministically combine integers into a fresh 64-bit seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one component")
    entropy = [check_seed(p) for p in parts]
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, np.uint64)[0])
