"""Counter-based random streams keyed by (seed, labels...).

Each check draws from its own Philox stream, so adding, removing or reordering
checks never shifts the samples another check sees.
"""
from __future__ import annotations

import zlib

import numpy as np


def _word(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode("utf-8"))


def stream(seed: int, *labels) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(_word(k) for k in labels))
    return np.random.Generator(np.random.Philox(ss))


def substreams(rng: np.random.Generator, n: int) -> list[np.random.Generator]:
    """Independent children of ``rng``; child ``i`` depends only on its index."""
    return list(rng.spawn(n))
