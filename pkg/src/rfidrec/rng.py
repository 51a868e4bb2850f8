"""Seed handling helpers shared across the package.

Every stochastic routine takes an explicit seed (or Generator); callers own
stream partitioning. `derive_rng` builds independent, order-insensitive
streams from a master seed and an integer path, so Monte Carlo slots can be
processed by any number of workers in any order with identical results.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.Generator | np.random.SeedSequence | None"


def as_rng(seed) -> np.random.Generator:
    """Return a Generator; passes through an existing one untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Deterministic sub-stream for (master_seed, *path).

    Independent of how work is partitioned across workers: the stream depends
    only on the integers supplied, not on call order.
    """
    return np.random.default_rng(np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path)))
