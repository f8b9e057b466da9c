"""Adaptive querying: the grid-threshold (Burnashev-Zigangirov) bisection variant.

The posterior lives on the 2^k cells I_m = [m 2^-k, (m+1) 2^-k). A query is
a threshold index t, asking whether X lies in [t 2^-k, 1], i.e. whether M >= t.
The batched routines run many independent trials in lockstep; each trial
supplies its own uniforms, so a trial's result never depends on its batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Bsc
from .target import quantize


@dataclass
class Posterior:
    k: int
    mass: np.ndarray

    @classmethod
    def uniform(cls, k: int) -> "Posterior":
        size = 1 << k
        return cls(k, np.full(size, 1.0 / size))

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        if self.mass.shape != (1 << self.k,):
            raise ValueError(f"mass must have length 2^{self.k}")
        if np.any(self.mass < 0) or abs(self.mass.sum() - 1.0) > 1e-9:
            raise ValueError("mass must be a probability vector")


@dataclass(frozen=True)
class ThresholdQuery:
    threshold_index: int

    def contains(self, m: int) -> bool:
        return m >= self.threshold_index


def _select_thresholds(mass: np.ndarray, u: np.ndarray) -> np.ndarray:
    # mass: (T, K), u: (T,) -> threshold indices (T,)
    cdf = np.cumsum(mass, axis=1)
    j = np.minimum(np.count_nonzero(cdf < 0.5, axis=1), mass.shape[1] - 1)
    rows = np.arange(mass.shape[0])
    # P(t = j) makes the expected right-tail mass exactly 1/2
    w_lower = (cdf[rows, j] - 0.5) / mass[rows, j]
    return j + (u >= w_lower)


def _update(mass: np.ndarray, t: np.ndarray, y: np.ndarray, eps: float) -> np.ndarray:
    inside = np.arange(mass.shape[1])[None, :] >= t[:, None]
    f_in = np.where(y == 1, 1.0 - eps, eps)[:, None]
    f_out = np.where(y == 1, eps, 1.0 - eps)[:, None]
    mass *= np.where(inside, f_in, f_out)
    total = mass.sum(axis=1, keepdims=True)
    if np.any(total <= 0):
        raise FloatingPointError("posterior collapsed to zero mass")
    mass /= total
    return mass


def bz_select_query(p: Posterior, rng: np.random.Generator) -> ThresholdQuery:
    """Pick one of the two grid thresholds bracketing the posterior median at random."""
    t = _select_thresholds(p.mass[None, :], np.array([rng.random()]))
    return ThresholdQuery(int(t[0]))


def bz_update(p: Posterior, q: ThresholdQuery, y: int, ch: Bsc | float) -> Posterior:
    """Bayes update after observing answer y to query q through BSC(eps)."""
    eps = ch.eps if isinstance(ch, Bsc) else float(ch)
    mass = p.mass.copy()[None, :]
    _update(mass, np.array([q.threshold_index]), np.array([int(y)]), eps)
    return Posterior(p.k, mass[0])


def bz_estimate(p: Posterior) -> int:
    """MAP cell index; ties go to the smallest index."""
    return int(np.argmax(p.mass))


def bz_run_batch(messages: np.ndarray, k: int, n_queries: int, eps: float,
                 draws: np.ndarray) -> np.ndarray:
    """Run BZ for T trials at once.

    messages: true cell indices (T,). draws: (T, n_queries, 2) uniforms; [..., 0]
    randomizes the threshold choice, [..., 1] drives the channel flip.
    """
    messages = np.asarray(messages, dtype=np.int64)
    n_trials = len(messages)
    mass = np.full((n_trials, 1 << k), 1.0 / (1 << k))
    for i in range(n_queries):
        t = _select_thresholds(mass, draws[:, i, 0])
        z = (messages >= t).astype(np.int64)
        y = z ^ (draws[:, i, 1] < eps)
        _update(mass, t, y, eps)
    return np.argmax(mass, axis=1)


def bz_draws(rng: np.random.Generator, n_queries: int) -> np.ndarray:
    return rng.random((n_queries, 2))


def bz_run(x: float, k: int, n_queries: int, ch: Bsc, rng: np.random.Generator) -> int:
    """Play n_queries rounds of noisy bisection for target x; return the decoded cell."""
    m = quantize(x, k).message
    draws = bz_draws(rng, n_queries)
    return int(bz_run_batch(np.array([m]), k, n_queries, ch.eps, draws[None])[0])


def variance_reduction(mass: np.ndarray, region: np.ndarray, ch: Bsc | float,
                       points: np.ndarray | None = None) -> float:
    """Predicted one-step reduction Var(X) - E[Var(X | Y)] for the query 'X in region'.

    With Z = 1(X in region), beta = P(Z=0), A = E[X | Z=0] and m = E[X]:
    (1-2e)^2 beta^2 (A-m)^2 / (e(1-e) + (1-2e)^2 beta (1-beta)).
    Cells are represented by their midpoints unless ``points`` is given.
    """
    eps = ch.eps if isinstance(ch, Bsc) else float(ch)
    mass = np.asarray(mass, dtype=float)
    region = np.asarray(region, dtype=bool)
    if points is None:
        points = (np.arange(len(mass)) + 0.5) / len(mass)
    beta = float(mass[~region].sum())
    if beta <= 0.0 or beta >= 1.0:
        return 0.0
    mean = float(mass @ points)
    a_beta = float(mass[~region] @ points[~region]) / beta
    g = (1.0 - 2.0 * eps) ** 2
    num = g * beta**2 * (a_beta - mean) ** 2
    den = eps * (1.0 - eps) + g * beta * (1.0 - beta)
    return num / den if den > 0 else 0.0
