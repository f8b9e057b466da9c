import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uepq.target import (
    SplitMessage, decoding_distance, finite_resolution_estimate, merge, quantize,
    quantized_cost, split, squared_cost,
)


def test_quantize_examples():
    s = quantize(0.0, 3)
    assert s.bits == (0, 0, 0) and s.message == 0
    s = quantize(0.5, 1)
    assert s.bits == (1,) and s.message == 1
    s = quantize(0.8125, 4)
    assert s.bits == (1, 1, 0, 1) and s.message == 13
    with pytest.raises(ValueError):
        quantize(1.0, 3)
    with pytest.raises(ValueError):
        quantize(-0.1, 3)


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 20))
def test_quantize_invariants(x, k):
    s = quantize(x, k)
    assert s.message == sum(b << (k - 1 - i) for i, b in enumerate(s.bits))
    assert s.message * 2.0**-k <= x < (s.message + 1) * 2.0**-k


def test_finite_resolution_estimate():
    assert finite_resolution_estimate(0, 1) == 0.25
    assert finite_resolution_estimate(7, 3) == 1 - 2**-3 / 2
    assert finite_resolution_estimate(5, 3) == 0.6875
    with pytest.raises(ValueError):
        finite_resolution_estimate(8, 3)


def test_decoding_distance():
    assert decoding_distance(5, 5) == 0
    assert decoding_distance(0, 15) == 15
    assert decoding_distance(13, 9) == 4


def test_quantized_cost_examples():
    assert quantized_cost(0.3, 0.3, 5) == 0.0
    assert quantized_cost(0.5, 0.25, 3) == 1 / 16
    # half-open bins: exactly half a cell rounds down, just above rounds up
    assert quantized_cost(0.0625, 0.0, 3) == 0.0
    assert quantized_cost(0.0626, 0.0, 3) == (1 / 8) ** 2
    assert quantized_cost(0.1875, 0.0, 3) == (1 / 8) ** 2


def test_quantized_cost_identity_random():
    rng = np.random.default_rng(12)
    for _ in range(10_000):
        k = int(rng.integers(1, 21))
        x = float(rng.random())
        m = quantize(x, k).message
        m_hat = int(rng.integers(0, 1 << k))
        cost = quantized_cost(x, finite_resolution_estimate(m_hat, k), k)
        assert cost == 2.0 ** (-2 * k) * (m - m_hat) ** 2


def test_squared_cost():
    assert squared_cost(0.4, 0.4) == 0
    assert squared_cost(0.0, 1.0) == 1
    assert squared_cost(0.3, 0.55) == pytest.approx(0.0625)


def test_split_merge_examples():
    assert split(0, 2, 3) == SplitMessage(2, 3, 0, 0)
    assert (split(2, 1, 1).m1, split(2, 1, 1).m2) == (1, 0)
    sm = split(22, 2, 3)
    assert (sm.m1, sm.m2) == (2, 6)
    assert merge(sm) == 22
    with pytest.raises(ValueError):
        split(32, 2, 3)


@given(st.integers(0, 10), st.integers(0, 10), st.data())
def test_split_merge_round_trip(k1, k2, data):
    m = data.draw(st.integers(0, (1 << (k1 + k2)) - 1))
    sm = split(m, k1, k2)
    assert merge(sm) == m
    assert sm.m1 == m >> k2


@given(st.floats(0, 1, exclude_max=True), st.integers(1, 20), st.integers(0, 20))
def test_quantize_split_round_trip(x, k, k1):
    k1 = min(k1, k)
    s = quantize(x, k)
    assert merge(split(s.message, k1, k - k1)) == s.message


def test_mse_minus_quantized_cost_gap():
    # For uniform X with the midpoint estimator the gap is the within-cell error, mean 4^-k/12
    rng = np.random.default_rng(3)
    k = 4
    n = 100_000
    diffs = np.empty(n)
    for i in range(n):
        x = float(rng.random())
        m_hat = int(rng.integers(0, 1 << k))
        x_hat = finite_resolution_estimate(m_hat, k)
        diffs[i] = squared_cost(x, x_hat) - quantized_cost(x, x_hat, k)
    mean = diffs.mean()
    se = diffs.std(ddof=1) / math.sqrt(n)
    assert 0 < mean <= 2.0 ** (-2 * k) / 4 + 3 * se
