"""Counter-based random streams.

Every run gets its own Philox stream keyed by ``(experiment, seed)``; per-round
substreams are derived by advancing the counter, so two runs never share state
and a replay with the same key reproduces every draw.
"""
from __future__ import annotations

import hashlib
import os

import numpy as np

_MASK64 = (1 << 64) - 1


def seed_offset() -> int:
    return int(os.environ.get("DLAB_SEED_OFFSET", "0"))


def _key(experiment: str, seed: int) -> int:
    h = hashlib.blake2b(f"{experiment}\x00{int(seed) & _MASK64}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int, experiment: str = "default") -> np.random.Generator:
    """Generator for one run. ``seed`` must fit in 64 unsigned bits."""
    if not 0 <= int(seed) <= _MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=_key(experiment, seed)))


def substream(seed: int, experiment: str, index: int) -> np.random.Generator:
    """Independent stream for ``index`` (e.g. a round) within a run."""
    bitgen = np.random.Philox(key=_key(experiment, seed))
    # each jump is 2**128 draws: far more than any round consumes
    return np.random.Generator(bitgen.jumped(int(index) + 1))
