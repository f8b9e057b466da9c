"""Fast invariant checks run by ``uepq selftest``.

Each check returns a short detail string and raises AssertionError on failure.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import numerics
from .adaptive import variance_reduction
from .channel import unpack
from .block import gen_random_codebook, gen_spc_codebook, marginal_ml_m1_decode, ml_decode, sc_decode
from .exponents import lsbs_sc_exponent, random_coding_exponent, spc_alpha_star
from .harness import ExperimentConfig, run_experiment
from .numerics import c2, capacity, gv_distance, gv_inverse, r_crit, star
from .target import finite_resolution_estimate, quantize, quantized_cost


def _first_best(scores) -> int:
    """Smallest index whose score ties the maximum up to rounding."""
    scores = np.asarray(scores, dtype=float)
    return int(np.flatnonzero(scores >= scores.max() - 1e-9 * max(1.0, abs(scores.max())))[0])


def check_gv_round_trip() -> str:
    worst = 0.0
    for g in np.linspace(0.01, 0.49, 49):
        worst = max(worst, abs(gv_distance(gv_inverse(float(g))) - g))
    assert worst < 1e-10, f"gv round trip error {worst:.3g}"
    return f"max |gv(gv^-1(g)) - g| = {worst:.2e}"


def check_er_kink() -> str:
    worst = 0.0
    for eps in (0.1, 0.3, 0.45):
        rc = r_crit(eps)
        left = numerics.e0_half(eps) - rc
        right = numerics.kl_bernoulli(gv_distance(rc), eps)
        worst = max(worst, abs(left - right))
        assert abs(random_coding_exponent(capacity(eps), eps)) < 1e-12
    assert worst < 1e-9, f"branch mismatch {worst:.3g}"
    return f"branch mismatch {worst:.2e}"


def check_satellite_exponent_zero_at_c2() -> str:
    val = lsbs_sc_exponent(c2(0.1, 0.3), 0.1, 0.3)
    assert abs(val) < 1e-9, f"E_LSBs at C2 is {val:.3g}"
    return f"value {val:.2e}"


def check_alpha_star_residual() -> str:
    eps = 0.45
    r = capacity(eps) / 2
    a = spc_alpha_star(r, eps)
    res = abs(c2(a, eps) + numerics.e0_half(star(a, eps)) / 3 - r)
    assert res < 1e-9, f"residual {res:.3g}"
    return f"alpha*={a:.6f} residual {res:.1e}"


def check_ml_vs_likelihood() -> str:
    rng = np.random.default_rng(11)
    for _ in range(25):
        eps = float(rng.uniform(0.02, 0.45))
        cb = gen_random_codebook(4, 20, rng)
        y = rng.integers(0, 2, 20).astype(np.uint8)
        rows = cb.rows
        ll = [np.sum(np.where(rows[m] == y, math.log(1 - eps), math.log(eps))) for m in range(16)]
        assert ml_decode(y, cb) == _first_best(ll), "ML disagrees with likelihood argmax"
    return "25 instances agree"


def check_sc_stage_one() -> str:
    rng = np.random.default_rng(12)
    eps, alpha = 0.2, 0.15
    a = star(alpha, eps)
    for _ in range(25):
        cb = gen_spc_codebook(3, 2, 24, alpha, rng)
        y = rng.integers(0, 2, 24).astype(np.uint8)
        clouds = unpack(cb.clouds, cb.n)
        q = [np.prod(np.where(clouds[m] == y, 1 - a, a)) for m in range(8)]
        assert sc_decode(y, cb)[0] == _first_best(np.log(q)), "SC stage 1 disagrees with q^N argmax"
    return "25 instances agree"


def check_marginal_vs_direct() -> str:
    rng = np.random.default_rng(13)
    for _ in range(25):
        eps = 0.25
        cb = gen_spc_codebook(3, 3, 20, 0.2, rng)
        y = rng.integers(0, 2, 20).astype(np.uint8)
        sums = []
        for m1 in range(8):
            sums.append(sum(np.prod(np.where(cb.codeword(m1, m2) == y, 1 - eps, eps)) for m2 in range(8)))
        assert marginal_ml_m1_decode(y, cb, eps) == _first_best(np.log(sums)), "marginal ML disagrees"
    return "25 instances agree"


def check_quantized_cost_identity() -> str:
    rng = np.random.default_rng(14)
    for _ in range(2000):
        k = int(rng.integers(1, 21))
        x = float(rng.random())
        m_hat = int(rng.integers(0, 1 << k))
        m = quantize(x, k).message
        assert quantized_cost(x, finite_resolution_estimate(m_hat, k), k) == 2.0 ** (-2 * k) * (m - m_hat) ** 2
    return "2000 samples exact"


def check_variance_reduction() -> str:
    rng = np.random.default_rng(15)
    worst = 0.0
    for _ in range(50):
        size = 16
        mass = rng.random(size)
        mass /= mass.sum()
        region = rng.random(size) < 0.5
        if region.all() or not region.any():
            continue
        eps = float(rng.uniform(0.01, 0.49))
        pts = (np.arange(size) + 0.5) / size
        prior_var = mass @ pts**2 - (mass @ pts) ** 2
        post = 0.0
        for y in (0, 1):
            lik = np.where(region, 1 - eps if y else eps, eps if y else 1 - eps)
            joint = mass * lik
            py = joint.sum()
            cond = joint / py
            post += py * (cond @ pts**2 - (cond @ pts) ** 2)
        worst = max(worst, abs(variance_reduction(mass, region, eps) - (prior_var - post)))
    assert worst < 1e-10, f"mismatch {worst:.3g}"
    return f"max mismatch {worst:.1e}"


def check_noiseless_harness() -> str:
    cfg = ExperimentConfig(policies=("bz", "repetition", "rc", "spc"), eps=0.0, alpha=0.1,
                           k_pairs=((3, 3),), n_values=(160,), trials=20, seed=5)
    for s in run_experiment(cfg, workers=1):
        assert s.p_block_err == 0.0 and s.mean_cq == 0.0, f"{s.policy} erred at eps=0"
    return "all policies exact at eps=0"


CHECKS: dict[str, Callable[[], str]] = {
    "gv_round_trip": check_gv_round_trip,
    "random_coding_kink": check_er_kink,
    "satellite_exponent_zero_at_c2": check_satellite_exponent_zero_at_c2,
    "alpha_star_residual": check_alpha_star_residual,
    "ml_vs_likelihood": check_ml_vs_likelihood,
    "sc_stage_one_vs_likelihood": check_sc_stage_one,
    "marginal_vs_direct_sum": check_marginal_vs_direct,
    "quantized_cost_identity": check_quantized_cost_identity,
    "variance_reduction_oracle": check_variance_reduction,
    "noiseless_harness": check_noiseless_harness,
}


def run_all(out=print) -> bool:
    ok = True
    for name, fn in CHECKS.items():
        try:
            detail = fn()
            out(f"PASS {name}: {detail}")
        except Exception as exc:  # report every failure, keep going
            ok = False
            out(f"FAIL {name}: {exc}")
    return ok
