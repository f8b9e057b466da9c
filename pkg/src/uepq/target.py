"""Dyadic quantization of the target, message indexing, estimators and costs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TargetState:
    x: float
    k: int
    bits: tuple[int, ...]
    message: int


@dataclass(frozen=True)
class SplitMessage:
    k1: int
    k2: int
    m1: int
    m2: int


def quantize(x: float, k: int) -> TargetState:
    """First k bits of the dyadic expansion of x in [0, 1), MSB first."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x must lie in [0, 1), got {x!r}")
    if k < 1:
        raise ValueError("k must be positive")
    m = min(int(math.floor(math.ldexp(x, k))), (1 << k) - 1)
    bits = tuple((m >> (k - 1 - i)) & 1 for i in range(k))
    return TargetState(x=x, k=k, bits=bits, message=m)


def bits_to_message(bits) -> int:
    m = 0
    for b in bits:
        m = (m << 1) | int(b)
    return m


def finite_resolution_estimate(m_hat: int, k: int) -> float:
    """Midpoint of the decoded interval [m_hat 2^-k, (m_hat+1) 2^-k)."""
    if not (0 <= m_hat < (1 << k)):
        raise ValueError(f"m_hat {m_hat} out of range for k={k}")
    return math.ldexp(2 * m_hat + 1, -(k + 1))


def decoding_distance(m: int, m_hat: int) -> int:
    return abs(int(m) - int(m_hat))


def quantized_cost(x: float, x_hat: float, k: int) -> float:
    """Stepwise squared error at resolution 2^-k.

    Bins are (d - 1/2, d + 1/2] in units of 2^-k, with d = 0 covering
    |x - x_hat| <= 2^-k / 2.
    """
    u = abs(x - x_hat) * (1 << k)
    d = max(math.ceil(u - 0.5), 0)
    return math.ldexp(d, -k) ** 2


def squared_cost(x: float, x_hat: float) -> float:
    return (x - x_hat) ** 2


def split(m: int, k1: int, k2: int) -> SplitMessage:
    """MSB-first split of m into (m1, m2) with m = m1 2^k2 + m2."""
    if k1 < 0 or k2 < 0:
        raise ValueError("k1 and k2 must be non-negative")
    if not (0 <= m < (1 << (k1 + k2))):
        raise ValueError(f"message {m} out of range for k1+k2={k1 + k2}")
    return SplitMessage(k1=k1, k2=k2, m1=m >> k2, m2=m & ((1 << k2) - 1))


def merge(sm: SplitMessage) -> int:
    return (sm.m1 << sm.k2) | sm.m2


def quantized_cost_from_distance(d: int | np.ndarray, k: int):
    """2^-2k d^2, the quantized cost under the midpoint estimator."""
    return np.ldexp(np.asarray(d, dtype=float) ** 2, -2 * k)
