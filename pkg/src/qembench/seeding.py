"""Deterministic, order-independent RNG stream derivation.

Every stochastic estimate owns a stream derived from a root seed plus a
structured key, so results are reproducible regardless of scheduling.
"""

from __future__ import annotations

import zlib

import numpy as np


def _encode(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    raise TypeError(f"seed key parts must be int or str, got {type(part)}")


def seed_sequence(*parts) -> np.random.SeedSequence:
    return np.random.SeedSequence([_encode(p) for p in parts])


def rng_for(*parts) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(*parts))


def derive_seed(*parts) -> int:
    """A stable 32-bit integer seed derived from the key."""
    return int(seed_sequence(*parts).generate_state(1)[0])
