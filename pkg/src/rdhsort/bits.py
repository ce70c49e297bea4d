"""Bit-sequence helpers and the reproducible random payload generator."""

from __future__ import annotations

import numpy as np


def as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.int64).ravel()
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("payload must contain only 0/1 values")
    return arr.astype(np.uint8)


def bytes_to_bits(data: bytes) -> np.ndarray:
    """MSB-first expansion of ``data``."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits) -> bytes:
    """MSB-first packing; a partial final byte is zero-padded."""
    return np.packbits(as_bits(bits)).tobytes()


def random_bits(n: int, seed: int) -> np.ndarray:
    """``n`` pseudo-random bits from numpy's PCG64 generator seeded with ``seed``.

    PCG64 output for a given seed is fixed across platforms and numpy versions.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(0, 2, size=n, dtype=np.uint8)
