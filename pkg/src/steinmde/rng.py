"""Reproducible random streams for parallel replication.

Streams are derived from a 64-bit experiment seed plus an integer path,
via the counter-based Philox generator keyed through ``SeedSequence``
spawn keys.  A stream is a pure function of ``(seed, path)``: replication
k always sees the same draws no matter in which order, or on how many
workers, the replications execute.
"""

import numpy as np

__all__ = ["substream"]


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator addressed by ``(seed, *path)``.

    Identical arguments yield bit-identical streams.  Distinct paths
    yield statistically independent streams.
    """
    if not path:
        path = (0,)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
