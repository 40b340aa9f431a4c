"""Counter-style seed derivation: every (master seed, path...) pair gets its own
independent stream, so results never depend on how work is scheduled."""

from __future__ import annotations

import numpy as np

SeedLike = int | np.random.SeedSequence


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def substream(seed: SeedLike, *path: int) -> np.random.SeedSequence:
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(p) for p in path))


def generator(seed: SeedLike, *path: int) -> np.random.Generator:
    return np.random.default_rng(substream(seed, *path))
