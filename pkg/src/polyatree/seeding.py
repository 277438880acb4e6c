"""Deterministic random streams.

One master seed drives any number of independent streams.  Stream ``i`` is

    Generator(PCG64(SeedSequence(master_seed, spawn_key=(i,))))

so a batch split into chunks draws identical numbers no matter how many
workers process the chunks; parallelism changes scheduling, never content.
"""

from __future__ import annotations

import numpy as np

__all__ = ["master_rng", "stream_rng"]


def master_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def stream_rng(seed: int | None, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))
