"""Counter-based random streams.

Each logical stream is a Philox generator keyed by hashing the run seed
together with a stream path (block index, restart index, dimension ...).
A stream's output depends only on its key, never on which worker draws it
or in what order, which is what keeps parallel runs bit-identical.
"""

from __future__ import annotations

import numpy as np


def stream_seed(seed: int, *path: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in path))


def stream_generator(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for stream ``path`` under ``seed``."""
    return np.random.Generator(np.random.Philox(stream_seed(seed, *path)))


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit child seed, for handing a sub-run its own seed."""
    return int(stream_seed(seed, *path).generate_state(1, dtype=np.uint64)[0])
