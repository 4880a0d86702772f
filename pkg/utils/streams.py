"""
VC Capacity Toolkit
Random Streams

Responsibilities:
- Counter-based random generators keyed by (master seed, index path)
- Per-point seeds for sweep rows

Every realization, trial, or sweep point draws from its own stream, so
results do not depend on execution order or on the number of workers.
"""

import numpy as np


def stream(seed: int, *index: int) -> np.random.Generator:
    """
    Returns the generator for one index path under a master seed.

    stream(seed, 3) and stream(seed, 4) are independent; the same
    (seed, index) always reproduces the same draws.
    """

    sequence = np.random.SeedSequence(
        entropy=int(seed),
        spawn_key=tuple(int(i) for i in index)
    )

    return np.random.Generator(
        np.random.Philox(sequence)
    )


def derive_seed(seed: int, *index: int) -> int:
    """
    A u32 seed for a child computation, written next to its result
    so the row can be reproduced on its own.
    """

    sequence = np.random.SeedSequence(
        entropy=int(seed),
        spawn_key=tuple(int(i) for i in index)
    )

    return int(sequence.generate_state(1, dtype=np.uint32)[0])

