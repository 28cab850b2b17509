"""Hierarchical deterministic seeding.

Every stochastic component derives its generator from a master seed plus a
path of labels, so adding a new consumer never shifts the streams of
existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np


def _encode(part: int | str) -> int:
    if isinstance(part, bool):
        raise TypeError("seed path parts must be int or str, not bool")
    if isinstance(part, int):
        if part < 0:
            raise ValueError(f"seed path parts must be >= 0, got {part}")
        return part
    return zlib.crc32(part.encode("utf-8"))


def derive_seed(master_seed: int, *path: int | str) -> int:
    """Stable child seed for (master_seed, path), in [0, 2**32)."""
    seq = np.random.SeedSequence([_encode(master_seed)] + [_encode(p) for p in path])
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def derive_rng(master_seed: int, *path: int | str) -> np.random.Generator:
    """Generator seeded by (master_seed, path); independent per distinct path."""
    seq = np.random.SeedSequence([_encode(master_seed)] + [_encode(p) for p in path])
    return np.random.default_rng(seq)
