"""Seed handling shared by the samplers and the Monte Carlo harness.

All randomness flows through numpy ``Generator`` objects.  Functions that
accept a ``seed`` take either an integer (wrapped in a fresh PCG64 stream),
an existing ``Generator`` (used as-is), or ``None`` (OS entropy).

The harness derives independent substreams deterministically:

* replicate ``r`` of an experiment seeded with ``s`` uses
  ``SeedSequence(s, spawn_key=(1, r))``;
* vectorised generators that cannot afford one stream per replicate use one
  stream per fixed-size chunk, ``SeedSequence(s, spawn_key=(2, c))``.

The two spawn-key prefixes keep the key spaces disjoint.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.Generator | np.random.SeedSequence | None"


def as_generator(seed=None) -> np.random.Generator:
    """Coerce ``seed`` into a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def replicate_stream(master_seed: int, index: int) -> np.random.Generator:
    """Stream for replicate ``index`` of an experiment seeded with ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(1, index))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_stream(master_seed: int, index: int) -> np.random.Generator:
    """Stream for replicate-chunk ``index`` (vectorised generators only)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(2, index))
    return np.random.Generator(np.random.PCG64(ss))
