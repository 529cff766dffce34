"""Deterministic hierarchical random streams.

Every stochastic task in a campaign owns a child stream addressed by a fixed
integer path under the master seed, never by thread or process identity, so
results are independent of worker count and bit-reproducible from the seed.
"""
from __future__ import annotations

import numpy as np


def child_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the task addressed by `path` under `master_seed`."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=tuple(int(p) for p in path)
    )
    return np.random.default_rng(ss)


def seed_from(rng_or_seed: int | np.random.Generator) -> int:
    """Normalize an integer seed or a Generator into a root integer seed."""
    if isinstance(rng_or_seed, (int, np.integer)):
        return int(rng_or_seed)
    return int(rng_or_seed.integers(0, 2**63))
