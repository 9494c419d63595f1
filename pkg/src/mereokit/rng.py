"""Deterministic random streams.

Streams are counter-based (Philox) and splittable: ``stream(seed, 3, 1)``
always yields the same generator, independent of any other stream, so
parallel work keyed by sub-stream indices is reproducible.
"""

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator identified by ``seed`` and a sub-stream path."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
