"""Seeded random number plumbing.

All randomness flows from 64-bit seeds into numpy ``Generator`` objects backed
by PCG64, which produces the same stream on every platform. ``integers`` uses
rejection sampling (Lemire's method), so bounded draws carry no modulo bias.
Per-trial seeds are derived with ``SeedSequence`` from (master seed, keys...)
so trials can run in any order.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.errors import InvalidParamsError

SEED_LIMIT = 2**64


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed."""
    if not 0 <= seed < SEED_LIMIT:
        raise InvalidParamsError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(master_seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed for (master_seed, keys...)."""
    sequence = np.random.SeedSequence([check_seed(master_seed), *keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def uniform_choice(rng: np.random.Generator, items: Sequence[int]) -> int:
    """Pick one element uniformly; ``items`` must already be in a canonical (sorted) order."""
    return items[int(rng.integers(len(items)))]


def uniform_open_closed(rng: np.random.Generator, high: float, size: int | None = None) -> np.ndarray | float:
    """Uniform draw on (0, high]."""
    if size is None:
        return high - float(rng.random()) * high
    return high - rng.random(size) * high
