"""Seeded random streams keyed by (master seed, task indices)."""
from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20170101


def derive_stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for task ``keys`` under ``seed``.

    Streams depend only on the key values, never on call order, so replicates
    can be run in any order or in parallel.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit integer seed for task ``keys`` under ``seed``."""
    state = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def as_stream(random_state) -> np.random.Generator:
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None:
        random_state = DEFAULT_SEED
    return derive_stream(int(random_state))
