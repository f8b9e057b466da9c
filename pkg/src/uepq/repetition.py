"""Non-adaptive UEP repetition querying with majority-vote decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .channel import Bsc, transmit
from .numerics import kl_bernoulli
from .target import bits_to_message, quantize


@dataclass(frozen=True)
class RepetitionPlan:
    allocations: tuple[int, ...]

    def __post_init__(self):
        if not self.allocations or any(a < 1 for a in self.allocations):
            raise ValueError("every bit needs at least one repetition")

    @property
    def k(self) -> int:
        return len(self.allocations)

    @property
    def n(self) -> int:
        return sum(self.allocations)


def allocate(n: int, k: int, eps: float) -> RepetitionPlan:
    """Greedy repetition allocation on the Chernoff bound sum_i 4^-(i-1) exp(-N_i D(1/2||eps)).

    Each extra repetition goes to the bit whose bound term is currently the
    largest (the largest marginal decrease); ties go to the more significant bit.
    """
    if k < 1 or n < k:
        raise ValueError(f"need n >= k >= 1, got n={n}, k={k}")
    div = kl_bernoulli(0.5, eps) if eps > 0 else math.inf
    counts = np.ones(k, dtype=np.int64)
    log_w = -2.0 * np.arange(k) * math.log(2.0)
    for _ in range(n - k):
        score = log_w - counts * div
        counts[int(np.argmax(score))] += 1
    return RepetitionPlan(tuple(int(c) for c in counts))


def majority_decode(votes) -> int:
    """1 iff strictly more ones than zeros; a tie decodes to 0."""
    votes = np.asarray(votes)
    if votes.size == 0:
        raise ValueError("no votes")
    ones = int(np.count_nonzero(votes))
    return int(ones > votes.size - ones)


def repetition_run(x: float, plan: RepetitionPlan, ch: Bsc, rng: np.random.Generator) -> int:
    """Send each dyadic bit of x N_i times, majority-decode, reassemble the message."""
    state = quantize(x, plan.k)
    z = np.repeat(np.array(state.bits, dtype=np.uint8), plan.allocations)
    y = transmit(z, ch, rng)
    starts = np.concatenate([[0], np.cumsum(plan.allocations)[:-1]])
    ones = np.add.reduceat(y.astype(np.int64), starts)
    decoded = (2 * ones > np.asarray(plan.allocations)).astype(int)
    return bits_to_message(decoded)


def repetition_bit_error_bounds(n_i: int, eps: float) -> tuple[float, float]:
    """Bracket on the majority-vote bit error after n_i repetitions on BSC(eps)."""
    if n_i < 1:
        raise ValueError("n_i must be positive")
    d = kl_bernoulli(0.5, eps)
    upper = math.exp(-n_i * d)
    lower = math.exp(-1.0 / (3.0 * n_i)) / math.sqrt(2.0 * math.pi * n_i) * upper
    return lower, upper


def _conditional_errors(n_i: int, eps: float) -> tuple[float, float]:
    # (P(B^=1 | B=0), P(B^=0 | B=1)) with f ~ Binomial(n_i, eps) flips
    q0 = float(binom.sf(n_i // 2, n_i, eps))              # f > n/2
    q1 = float(binom.sf(math.ceil(n_i / 2) - 1, n_i, eps))  # f >= n/2
    return q0, q1


def exact_bit_error(n_i: int, eps: float) -> float:
    """Exact majority-vote bit error for a uniform bit, tie rule included."""
    q0, q1 = _conditional_errors(n_i, eps)
    return 0.5 * (q0 + q1)


def expected_costs(plan: RepetitionPlan, eps: float) -> tuple[float, float]:
    """Exact (E[quantized cost], E[squared error]) of a plan under the midpoint estimator.

    Bit errors are independent across positions, so the error
    sum_i (B_i - B^_i) 2^-i + (U - 1/2) 2^-k has a closed-form second moment.
    """
    k = plan.k
    weights = np.ldexp(1.0, -np.arange(1, k + 1))
    second = np.empty(k)
    first = np.empty(k)
    for i, n_i in enumerate(plan.allocations):
        q0, q1 = _conditional_errors(n_i, eps)
        second[i] = 0.5 * (q0 + q1)
        first[i] = 0.5 * (q1 - q0)
    mu = weights * first
    bit_part = float(np.sum(weights**2 * second) + mu.sum() ** 2 - np.sum(mu**2))
    return bit_part, bit_part + math.ldexp(1.0, -2 * k) / 12.0


def best_plan(n: int, eps: float, multipliers=(0.5, 1.0, 2.0)) -> RepetitionPlan:
    """Plan minimizing exact expected MSE over k in {ceil(c sqrt(n))}."""
    best = None
    for c in multipliers:
        k = max(1, min(n, math.ceil(c * math.sqrt(n))))
        plan = allocate(n, k, eps)
        mse = expected_costs(plan, eps)[1]
        if best is None or mse < best[0]:
            best = (mse, plan)
    return best[1]
