"""Non-adaptive block querying: random and superposition codebooks and their decoders.

Codebook rows are stored packed (see ``channel.pack``). Received words may be
passed either as 0/1 ``uint8`` arrays of length n or already packed as ``uint64``.
All decoders break ties toward the smallest index (lexicographic for pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy.special import logsumexp

from .channel import Bsc, loglik_from_distance, n_words, pack, packed_distances, random_words, unpack

MAX_BITS = 20
MAX_MARGINAL_K2 = 12


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _words(y: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype == np.uint64 and y.shape == (n_words(n),):
        return y
    if y.shape != (n,):
        raise ValueError(f"received word has shape {y.shape}, expected ({n},)")
    return pack(y)


@dataclass
class RandomCodebook:
    k: int
    n: int
    words: np.ndarray
    seed: int | None = None

    def row(self, m: int) -> np.ndarray:
        return unpack(self.words[m], self.n)

    @property
    def rows(self) -> np.ndarray:
        return unpack(self.words, self.n)


@dataclass
class SuperpositionCodebook:
    k1: int
    k2: int
    n: int
    alpha: float
    clouds: np.ndarray
    satellites: np.ndarray
    seed: int | None = None

    def codeword_words(self, m1: int, m2: int) -> np.ndarray:
        return self.clouds[m1] ^ self.satellites[m2]

    def codeword(self, m1: int, m2: int) -> np.ndarray:
        return unpack(self.codeword_words(m1, m2), self.n)

    def flatten(self) -> RandomCodebook:
        """All 2^(k1+k2) codewords, indexed by m = m1 2^k2 + m2."""
        words = (self.clouds[:, None, :] ^ self.satellites[None, :, :]).reshape(-1, self.clouds.shape[1])
        return RandomCodebook(self.k1 + self.k2, self.n, words, self.seed)


def gen_random_codebook(k: int, n: int, seed=None) -> RandomCodebook:
    """2^k codewords of n i.i.d. fair bits."""
    if k < 0 or n < 1:
        raise ValueError("need k >= 0 and n >= 1")
    if k > MAX_BITS:
        raise ValueError(f"k={k} exceeds the {MAX_BITS}-bit codebook cap")
    rng = _rng(seed)
    return RandomCodebook(k, n, random_words(rng, 1 << k, n), seed if isinstance(seed, int) else None)


def gen_spc_codebook(k1: int, k2: int, n: int, alpha: float, seed=None) -> SuperpositionCodebook:
    """Fair-coin cloud centers plus Bernoulli(alpha) satellites."""
    if k1 < 0 or k2 < 0 or n < 1:
        raise ValueError("need k1, k2 >= 0 and n >= 1")
    if k1 + k2 > MAX_BITS:
        raise ValueError(f"k1+k2={k1 + k2} exceeds the {MAX_BITS}-bit codebook cap")
    if not (0.0 < alpha <= 0.5):
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha!r}")
    rng = _rng(seed)
    clouds = random_words(rng, 1 << k1, n)
    satellites = pack((rng.random((1 << k2, n)) < alpha).astype(np.uint8))
    return SuperpositionCodebook(k1, k2, n, alpha, clouds, satellites,
                                 seed if isinstance(seed, int) else None)


def ml_decode(y: np.ndarray, cb: RandomCodebook) -> int:
    """Minimum-Hamming-distance (= ML for eps < 1/2) decoding."""
    return int(np.argmin(packed_distances(cb.words, _words(y, cb.n))))


def _pair_distances(yw: np.ndarray, cb: SuperpositionCodebook) -> np.ndarray:
    shifted = cb.clouds ^ yw
    return np.bitwise_count(shifted[:, None, :] ^ cb.satellites[None, :, :]).sum(axis=-1, dtype=np.int64)


def jml_decode(y: np.ndarray, cb: SuperpositionCodebook) -> tuple[int, int]:
    """Joint ML over all (m1, m2)."""
    dist = _pair_distances(_words(y, cb.n), cb)
    m1, m2 = np.unravel_index(int(np.argmin(dist)), dist.shape)
    return int(m1), int(m2)


def sc_decode(y: np.ndarray, cb: SuperpositionCodebook) -> tuple[int, int]:
    """Successive cancellation: nearest cloud, strip it, then nearest satellite."""
    yw = _words(y, cb.n)
    m1 = int(np.argmin(packed_distances(cb.clouds, yw)))
    m2 = int(np.argmin(packed_distances(cb.satellites, yw ^ cb.clouds[m1])))
    return m1, m2


def marginal_ml_m1_decode(y: np.ndarray, cb: SuperpositionCodebook, ch: Bsc | float) -> int:
    """Cloud maximizing the summed likelihood of its satellites (log-sum-exp)."""
    if cb.k2 > MAX_MARGINAL_K2:
        raise ValueError(f"k2={cb.k2} exceeds the marginal-ML cap of {MAX_MARGINAL_K2}")
    eps = ch.eps if isinstance(ch, Bsc) else float(ch)
    dist = _pair_distances(_words(y, cb.n), cb)
    scores = logsumexp(loglik_from_distance(dist, cb.n, eps), axis=1)
    return int(np.argmax(scores))


@dataclass
class QueryRegionView:
    """Messages whose interval belongs to the i-th query region."""

    column: int
    members: np.ndarray
    k2: int = 0

    def __contains__(self, m: int) -> bool:
        return bool(self.members[m])

    def satellite_fraction(self, m1: int) -> float:
        """Fraction of the satellites of cloud m1 that fall inside the region."""
        per_cloud = self.members.reshape(-1, 1 << self.k2)
        return float(per_cloud[m1].mean())


def query_region(cb: RandomCodebook | SuperpositionCodebook, i: int) -> QueryRegionView:
    if not (0 <= i < cb.n):
        raise ValueError(f"column {i} outside [0, {cb.n})")
    if isinstance(cb, SuperpositionCodebook):
        u = unpack(cb.clouds, cb.n)[:, i]
        v = unpack(cb.satellites, cb.n)[:, i]
        members = (u[:, None] ^ v[None, :]).reshape(-1).astype(bool)
        return QueryRegionView(i, members, cb.k2)
    return QueryRegionView(i, unpack(cb.words, cb.n)[:, i].astype(bool))


def dump_codebook(cb: RandomCodebook | SuperpositionCodebook, fh: TextIO) -> None:
    """Header ``k1 k2 n alpha seed``, then one hex row per codeword component.

    Random codebooks are written with k2 = 0 and alpha = 0.5; superposition
    codebooks list the clouds first, then the satellites.
    """
    if isinstance(cb, SuperpositionCodebook):
        header = (cb.k1, cb.k2, cb.n, cb.alpha, cb.seed)
        blocks = (cb.clouds, cb.satellites)
    else:
        header = (cb.k, 0, cb.n, 0.5, cb.seed)
        blocks = (cb.words,)
    k1, k2, n, alpha, seed = header
    fh.write(f"{k1} {k2} {n} {alpha!r} {'-' if seed is None else seed}\n")
    for block in blocks:
        for row in unpack(block, n):
            fh.write(np.packbits(row).tobytes().hex() + "\n")


def load_codebook(fh: TextIO) -> RandomCodebook | SuperpositionCodebook:
    k1, k2, n, alpha, seed = fh.readline().split()
    k1, k2, n, alpha = int(k1), int(k2), int(n), float(alpha)
    seed = None if seed == "-" else int(seed)

    def read_rows(count: int) -> np.ndarray:
        rows = [np.unpackbits(np.frombuffer(bytes.fromhex(fh.readline().strip()), np.uint8))[:n]
                for _ in range(count)]
        return pack(np.array(rows, dtype=np.uint8))

    if k2 == 0 and alpha == 0.5:
        return RandomCodebook(k1, n, read_rows(1 << k1), seed)
    clouds = read_rows(1 << k1)
    satellites = read_rows(1 << k2)
    return SuperpositionCodebook(k1, k2, n, alpha, clouds, satellites, seed)
