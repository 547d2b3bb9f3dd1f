"""Deterministic RNG derivation.

Every random draw in the toolkit flows through a Generator built here, so a
run is reproducible from a single integer seed.  Sub-streams are derived from
(seed, *key) tuples via SeedSequence, which is stable across platforms and
numpy versions.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20170

_MASK = (1 << 63) - 1


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream identified by (seed, *key)."""
    entropy = [int(seed) & _MASK] + [int(k) & _MASK for k in key]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *key: int) -> int:
    """Plain integer sub-seed, for APIs that take a seed rather than a Generator."""
    entropy = [int(seed) & _MASK] + [int(k) & _MASK for k in key]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0] & _MASK)
