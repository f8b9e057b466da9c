"""Scalar Bernoulli / BSC information quantities, all in nats."""

from __future__ import annotations

import math

LN2 = math.log(2.0)

_GV_TOL = 1e-12
_GV_MAX_ITER = 200


def _xlogy(x: float, y: float) -> float:
    # 0 * ln(0) := 0
    if x == 0.0:
        return 0.0
    return x * math.log(y)


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def binary_entropy(a: float) -> float:
    """H_B(a) = -a ln a - (1-a) ln(1-a)."""
    _check_prob("a", a)
    return -_xlogy(a, a) - _xlogy(1.0 - a, 1.0 - a)


def kl_bernoulli(a: float, b: float) -> float:
    """D_B(a || b) between Bernoulli(a) and Bernoulli(b).

    Raises ValueError when the divergence is infinite (b in {0, 1}, a != b).
    """
    _check_prob("a", a)
    _check_prob("b", b)
    if (b == 0.0 and a != 0.0) or (b == 1.0 and a != 1.0):
        raise ValueError(f"D_B({a}||{b}) is infinite")
    out = 0.0
    if a > 0.0:
        out += a * math.log(a / b)
    if a < 1.0:
        out += (1.0 - a) * math.log((1.0 - a) / (1.0 - b))
    return max(out, 0.0)


def star(a: float, e: float) -> float:
    """Binary convolution a*e = a(1-e) + (1-a)e."""
    return a * (1.0 - e) + (1.0 - a) * e


def gv_inverse(g: float) -> float:
    """D_B(g || 1/2) = ln 2 - H_B(g)."""
    if not (0.0 <= g <= 0.5):
        raise ValueError(f"g must lie in [0, 1/2], got {g!r}")
    # written in delta = 1/2 - g to avoid cancellation near g = 1/2
    delta = 0.5 - g
    if delta == 0.5:
        return LN2
    val = g * math.log1p(-2.0 * delta) + (1.0 - g) * math.log1p(2.0 * delta)
    return max(val, 0.0)


def gv_distance(r: float) -> float:
    """Normalized Gilbert-Varshamov distance: the gamma in [0, 1/2] with D_B(gamma||1/2) = r.

    Bisection on [0, 1/2]; the objective is strictly decreasing there.
    """
    if r < 0.0 or r > LN2:
        if -1e-15 < r < 0.0:
            r = 0.0
        elif LN2 < r < LN2 + 1e-15:
            r = LN2
        else:
            raise ValueError(f"rate must lie in [0, ln 2], got {r!r}")
    lo, hi = 0.0, 0.5
    for _ in range(_GV_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if gv_inverse(mid) > r:
            lo = mid
        else:
            hi = mid
        if hi - lo < _GV_TOL:
            break
    return 0.5 * (lo + hi)


def capacity(eps: float) -> float:
    """BSC(eps) capacity ln 2 - H_B(eps)."""
    return max(LN2 - binary_entropy(eps), 0.0)


def e0_half(eps: float) -> float:
    """Gallager E_0(1/2, eps) = -ln(1/2 + sqrt(eps(1-eps)))."""
    _check_prob("eps", eps)
    return max(-math.log(0.5 + math.sqrt(eps * (1.0 - eps))), 0.0)


def gamma_crit(eps: float) -> float:
    s, t = math.sqrt(eps), math.sqrt(1.0 - eps)
    return s / (s + t)


def r_crit(eps: float) -> float:
    """Critical rate of the BSC: D_B(gamma_crit || 1/2)."""
    _check_prob("eps", eps)
    return kl_bernoulli(gamma_crit(eps), 0.5)


def c2(alpha: float, eps: float) -> float:
    """Satellite-layer capacity H_B(alpha*eps) - H_B(eps)."""
    if not (0.0 <= alpha <= 0.5 and 0.0 <= eps <= 0.5):
        raise ValueError("alpha and eps must lie in [0, 1/2]")
    return max(binary_entropy(star(alpha, eps)) - binary_entropy(eps), 0.0)
