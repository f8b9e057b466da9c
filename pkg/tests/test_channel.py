import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from uepq.channel import (
    Bsc, hamming, log_likelihood, pack, packed_distances, random_words, transmit, unpack,
)


def test_bsc_validation():
    Bsc(0.0)
    with pytest.raises(ValueError):
        Bsc(0.5)
    with pytest.raises(ValueError):
        Bsc(-0.1)


def test_transmit_noiseless():
    rng = np.random.default_rng(0)
    z = rng.integers(0, 2, 500).astype(np.uint8)
    assert np.array_equal(transmit(z, Bsc(0.0), rng), z)


def test_transmit_flip_fraction_and_determinism():
    z = np.zeros(100_000, dtype=np.uint8)
    y1 = transmit(z, Bsc(0.3), np.random.default_rng(5))
    y2 = transmit(z, Bsc(0.3), np.random.default_rng(5))
    assert np.array_equal(y1, y2)
    assert abs(y1.mean() - 0.3) < 0.01


def test_flip_count_goodness_of_fit():
    # 1000 blocks of 100 bits; block flip counts vs Binomial(100, 0.3)
    rng = np.random.default_rng(8)
    counts = np.array([transmit(np.zeros(100, np.uint8), Bsc(0.3), rng).sum() for _ in range(1000)])
    edges = np.array([0, 24, 27, 29, 31, 33, 36, 101])
    observed = np.histogram(counts, bins=edges)[0]
    probs = np.diff(stats.binom.cdf(edges - 1, 100, 0.3))
    chi2 = stats.chisquare(observed, probs * len(counts))
    assert chi2.pvalue > 1e-4


def test_hamming():
    a = np.array([1, 0, 1, 1])
    assert hamming(a, a) == 0
    assert hamming(a, 1 - a) == 4
    assert hamming(np.array([1, 0, 1, 1]), np.array([0, 0, 1, 0])) == 2
    with pytest.raises(ValueError):
        hamming(a, a[:3])


def test_log_likelihood():
    z = np.array([0, 1, 1, 0, 1], np.uint8)
    assert log_likelihood(z, z, Bsc(0.2)) == pytest.approx(5 * math.log(0.8))
    with pytest.raises(ValueError):
        log_likelihood(z, 1 - z, Bsc(0.0))


def test_ml_equals_min_hamming():
    rng = np.random.default_rng(1)
    for _ in range(100):
        eps = float(rng.uniform(0.01, 0.49))
        book = rng.integers(0, 2, (8, 12)).astype(np.uint8)
        y = rng.integers(0, 2, 12).astype(np.uint8)
        ll = [log_likelihood(y, z, Bsc(eps)) for z in book]
        dist = [hamming(y, z) for z in book]
        assert int(np.argmax(ll)) == int(np.argmin(dist))


@given(st.integers(0, 30), st.integers(0, 30), st.floats(0.001, 0.499))
def test_likelihood_ordering(d1, d2, eps):
    n = 30
    ch = Bsc(eps)
    y = np.zeros(n, np.uint8)
    z1 = np.zeros(n, np.uint8)
    z1[:d1] = 1
    z2 = np.zeros(n, np.uint8)
    z2[:d2] = 1
    l1, l2 = log_likelihood(y, z1, ch), log_likelihood(y, z2, ch)
    if d1 < d2:
        assert l1 > l2
    elif d1 == d2:
        assert l1 == l2


@given(st.integers(1, 200), st.integers(0, 2**31))
def test_pack_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, (3, n)).astype(np.uint8)
    assert np.array_equal(unpack(pack(bits), n), bits)
    d = packed_distances(pack(bits), pack(bits[0]))
    assert list(d) == [hamming(bits[0], b) for b in bits]


def test_random_words_masks_tail():
    rng = np.random.default_rng(0)
    w = random_words(rng, 50, 70)
    bits = unpack(w, 128)
    assert not bits[:, 70:].any()
    assert 0.4 < bits[:, :70].mean() < 0.6
