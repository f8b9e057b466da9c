"""Binary symmetric channel, Hamming distance and bit packing.

Bit blocks are 1-D ``uint8`` arrays of 0/1. Codebooks keep rows packed into
``uint64`` words so that distances reduce to XOR + popcount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Bsc:
    eps: float

    def __post_init__(self):
        if not (0.0 <= self.eps < 0.5):
            raise ValueError(f"crossover probability must lie in [0, 1/2), got {self.eps!r}")


def transmit(block: np.ndarray, ch: Bsc, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ch.eps.

    Always consumes len(block) uniforms so the stream position does not depend on eps.
    """
    block = np.asarray(block, dtype=np.uint8)
    flips = rng.random(block.shape) < ch.eps
    return block ^ flips.astype(np.uint8)


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def log_likelihood(y: np.ndarray, z: np.ndarray, ch: Bsc) -> float:
    """ln p^N(y | z) = d ln eps + (N - d) ln(1 - eps)."""
    d = hamming(y, z)
    if ch.eps == 0.0 and d > 0:
        raise ValueError("zero-probability observation on a noiseless channel")
    return float(loglik_from_distance(d, len(y), ch.eps))


def loglik_from_distance(d, n: int, eps: float) -> np.ndarray:
    """Vectorized BSC log-likelihood of words at Hamming distance d (-inf allowed)."""
    d = np.asarray(d, dtype=float)
    if eps == 0.0:
        return np.where(d > 0, -np.inf, 0.0)
    return d * math.log(eps) + (n - d) * math.log1p(-eps)


def n_words(n: int) -> int:
    return (n + 63) // 64


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words (zero padded)."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    pad = n_words(n) * 64 - n
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), np.uint8)], axis=-1)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return packed.view("<u8").reshape(bits.shape[:-1] + (n_words(n),))


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[:-1] + (words.shape[-1] * 8,))
    return np.unpackbits(as_bytes, axis=-1, bitorder="little")[..., :n]


def random_words(rng: np.random.Generator, rows: int, n: int) -> np.ndarray:
    """rows x n i.i.d. fair bits, drawn directly in packed form."""
    words = rng.integers(0, 2**64, size=(rows, n_words(n)), dtype=np.uint64, endpoint=False)
    tail = n % 64
    if tail:
        words[:, -1] &= np.uint64((1 << tail) - 1)
    return words


def packed_distances(rows: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hamming distance from packed word y to every packed row."""
    return np.bitwise_count(rows ^ y).sum(axis=-1, dtype=np.int64)
