"""Deterministic RNG stream derivation.

Every stochastic component draws from a stream derived as
(master_seed, *path) where the path is a tuple of small non-negative
integers naming the consumer (e.g. (param_index, sign) for the two shifted
evaluations of one gradient component).  Streams derived this way are
independent of scheduling order, so results match between sequential and
parallel execution and are reproducible bit for bit from the master seed.
"""

from __future__ import annotations

import numpy as np


def derive_rng(master_seed, *path):
    """Generator for the stream (master_seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(ss)


def derive_seed(master_seed, *path):
    """64-bit child seed for the stream (master_seed, *path).

    Used when a sub-component wants its own master seed to derive from
    (e.g. the per-iteration gradient master inside a training loop).
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def as_rng(rng):
    """Coerce an int seed or a Generator to a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(int(rng))
