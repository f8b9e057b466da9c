"""Analytic error-exponent curves for random block and superposition codes.

Every function works in nats. Exponents are clamped to be non-negative to
absorb root-finder residue at domain endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .numerics import (
    LN2,
    c2,
    capacity,
    e0_half,
    gv_distance,
    kl_bernoulli,
    r_crit,
    star,
)

_DOMAIN_SLACK = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _clamp(value: float) -> float:
    if value < 0.0:
        if value < -1e-9:
            raise ArithmeticError(f"exponent evaluated to {value}")
        return 0.0
    return value


@dataclass(frozen=True)
class ExponentPoint:
    rate: float
    exponent: float


@dataclass
class ExponentCurve:
    label: str
    channel_eps: float
    points: list[ExponentPoint] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def exponents(self) -> np.ndarray:
        return np.array([p.exponent for p in self.points])

    def to_csv(self) -> str:
        lines = ["rate_nats,exponent_nats"]
        lines += [f"{p.rate:.12g},{p.exponent:.12g}" for p in self.points]
        return "\n".join(lines) + "\n"


def random_coding_exponent(r: float, eps: float) -> float:
    """Gallager's E_r(R) for the BSC with uniform inputs (closed form)."""
    cap = capacity(eps)
    if r < -_DOMAIN_SLACK or r > cap + _DOMAIN_SLACK:
        raise ValueError(f"rate {r} outside [0, C={cap}]")
    r = min(max(r, 0.0), cap)
    if r < r_crit(eps):
        return _clamp(e0_half(eps) - r)
    return _clamp(kl_bernoulli(gv_distance(r), eps))


def very_noisy_rc_approx(r: float, c: float) -> float:
    """Very-noisy-channel approximation of E_r in terms of capacity only."""
    if r < 0.0 or r > c + _DOMAIN_SLACK:
        raise ValueError(f"rate {r} outside [0, {c}]")
    if r < c / 4.0:
        return c / 2.0 - r
    return (math.sqrt(c) - math.sqrt(min(r, c))) ** 2


def msbs_sc_exponent(r1: float, alpha: float, eps: float) -> float:
    """Cloud-center error exponent under successive-cancellation decoding.

    The cloud decoder sees an effective BSC(alpha*eps), so this is E_r of
    that channel evaluated at R1. The domain is [0, C - C2(alpha)].
    """
    return random_coding_exponent(r1, star(alpha, eps))


def gallager_f0(rho: float, alpha: float, eps: float) -> float:
    """F_0(rho, alpha) for Bernoulli(alpha) inputs on BSC(eps)."""
    p_v = (1.0 - alpha, alpha)
    s = 1.0 / (1.0 + rho)
    total = 0.0
    for y in (0, 1):
        inner = 0.0
        for v in (0, 1):
            trans = 1.0 - eps if y == v else eps
            if p_v[v] > 0.0 and trans > 0.0:
                inner += p_v[v] * trans**s
        total += inner ** (1.0 + rho)
    return -math.log(total)


def lsbs_sc_exponent(r2: float, alpha: float, eps: float, tol: float = 1e-10) -> float:
    """Satellite error exponent max_{0<=rho<=1} [F_0(rho, alpha) - rho R2].

    A 64-point grid locates the best cell; golden-section refines inside it
    (the objective is concave in rho).
    """
    if r2 < 0.0:
        raise ValueError("r2 must be non-negative")

    def obj(rho: float) -> float:
        return gallager_f0(rho, alpha, eps) - rho * r2

    grid = np.linspace(0.0, 1.0, 64)
    vals = [obj(float(g)) for g in grid]
    i = int(np.argmax(vals))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    best = vals[i]
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = obj(c), obj(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = obj(d)
    best = max(best, fc, fd, obj(0.5 * (a + b)))
    return _clamp(best)


def jml_lb_exponent(r1: float, r2: float, eps: float) -> float:
    """Lower bound on the cloud error exponent under joint-ML decoding."""
    cap = capacity(eps)
    if r1 < 0.0 or r2 < 0.0 or r1 + r2 > cap + _DOMAIN_SLACK:
        raise ValueError(f"(r1, r2)=({r1}, {r2}) outside r1 + r2 <= C={cap}")
    # first branch iff r1 + r2 <= R_crit; at r1 = 0 with r2 > R_crit the
    # sphere-packing branch applies (the straight line would undercut E_r)
    if r1 + r2 <= r_crit(eps):
        return _clamp(e0_half(eps) - r2 - r1)
    return _clamp(kl_bernoulli(gv_distance(min(r1 + r2, cap)), eps))


def _alpha_balance(alpha: float, eps: float) -> float:
    return c2(alpha, eps) + e0_half(star(alpha, eps)) / 3.0


def spc_alpha_star(r: float, eps: float) -> float:
    """Satellite parameter alpha* solving r = C2(alpha) + E_0(1/2, alpha*eps)/3."""
    lo_rate = e0_half(eps) / 3.0
    hi_rate = capacity(eps)
    if not (lo_rate < r < hi_rate):
        raise ValueError(f"rate {r} outside ({lo_rate}, {hi_rate})")
    return brentq(lambda a: _alpha_balance(a, eps) - r, 0.0, 0.5, xtol=1e-16, rtol=1e-15, maxiter=500)


def spc_quantized_mse_exponent(r: float, eps: float) -> float:
    """Achievable quantized-MSE exponent of superposition coding at total rate r."""
    alpha = spc_alpha_star(r, eps)
    r1 = max(r - c2(alpha, eps), 0.0)
    return msbs_sc_exponent(r1, alpha, eps)


def spc_lower_bound_sweep(r: float, eps: float, n_alpha: int = 512, levels: int = 2) -> float:
    """Brute-force max over alpha of min{E_MSBs,SC(r - C2), 2(r - C2)} with R2 = C2(alpha).

    Each level scans ``n_alpha`` points; later levels rescan the two cells
    around the previous best. No root-finding is involved.
    """

    def value(alpha: float) -> float:
        r1 = r - c2(alpha, eps)
        if r1 < 0.0 or r1 > capacity(star(alpha, eps)):
            return -math.inf
        return min(msbs_sc_exponent(r1, alpha, eps), 2.0 * r1)

    lo, hi = 0.0, 0.5
    best = -math.inf
    for _ in range(levels):
        grid = np.linspace(lo, hi, n_alpha + 2)[1:-1]
        vals = [value(float(a)) for a in grid]
        i = int(np.argmax(vals))
        best = max(best, vals[i])
        step = grid[1] - grid[0]
        lo, hi = max(grid[i] - step, 0.0), min(grid[i] + step, 0.5)
    return max(best, 0.0)


def quantized_mse_exponent_spc_or_rc(r: float, eps: float) -> tuple[float, bool]:
    """E_q,spc where defined; below E_0/3 falls back to E_r and sets the flag."""
    if r <= e0_half(eps) / 3.0:
        return random_coding_exponent(r, eps), True
    return spc_quantized_mse_exponent(r, eps), False


def mse_exponent_from_q(eq: float, r: float) -> float:
    """MSE exponent: the smaller of the quantized-MSE exponent and 2R."""
    if eq < 0.0 or r < 0.0:
        raise ValueError("eq and r must be non-negative")
    return min(eq, 2.0 * r)


def bz_exponent_lb(r: float, eps: float) -> float:
    """Quantized-MSE exponent lower bound of the BZ algorithm at rate r."""
    return max(e0_half(eps) - r, 0.0)


# name -> (domain(eps, params) -> (lo, hi, open_lo, open_hi), f(r, eps, params))
def _dom_cap(eps, p):
    return 0.0, capacity(eps), False, False


def _dom_msbs(eps, p):
    return 0.0, capacity(eps) - c2(p["alpha"], eps), False, False


def _dom_shift(eps, p):
    return 0.0, capacity(eps) - p["r2"], False, False


def _dom_spc(eps, p):
    return e0_half(eps) / 3.0, capacity(eps), True, True


def _dom_lsbs(eps, p):
    return 0.0, c2(p["alpha"], eps), False, False


def _dom_bz(eps, p):
    return 0.0, e0_half(eps), False, False


def _eq_rc_mse(r, eps, p):
    return mse_exponent_from_q(random_coding_exponent(r, eps), r)


def _eq_spc_mse(r, eps, p):
    return mse_exponent_from_q(spc_quantized_mse_exponent(r, eps), r)


_CURVES = {
    "er": ((), _dom_cap, lambda r, eps, p: random_coding_exponent(r, eps)),
    "erapprox": ((), _dom_cap, lambda r, eps, p: very_noisy_rc_approx(r, capacity(eps))),
    "ershift": (("r2",), _dom_shift, lambda r, eps, p: random_coding_exponent(r + p["r2"], eps)),
    "emsbssc": (("alpha",), _dom_msbs, lambda r, eps, p: msbs_sc_exponent(r, p["alpha"], eps)),
    "elsbssc": (("alpha",), _dom_lsbs, lambda r, eps, p: lsbs_sc_exponent(r, p["alpha"], eps)),
    "ejmllb": (("r2",), _dom_shift, lambda r, eps, p: jml_lb_exponent(r, p["r2"], eps)),
    "eqspc": ((), _dom_spc, lambda r, eps, p: spc_quantized_mse_exponent(r, eps)),
    "eqrc": ((), _dom_cap, lambda r, eps, p: random_coding_exponent(r, eps)),
    "emserc": ((), _dom_cap, _eq_rc_mse),
    "emsespc": ((), _dom_spc, _eq_spc_mse),
    "ebz": ((), _dom_bz, lambda r, eps, p: bz_exponent_lb(r, eps)),
    "tworate": ((), _dom_cap, lambda r, eps, p: 2.0 * r),
}

CURVE_KINDS = tuple(_CURVES)


def canonical_kind(kind: str) -> str:
    """Normalize curve identifiers: 'E_MSBs_SC', 'Emsbs_sc' and 'emsbssc' are the same."""
    key = kind.replace("_", "").replace("-", "").replace(",", "").lower()
    aliases = {"2r": "tworate", "eqbz": "ebz", "bz": "ebz"}
    key = aliases.get(key, key)
    if key not in _CURVES:
        raise ValueError(f"unknown curve kind {kind!r}; known: {', '.join(CURVE_KINDS)}")
    return key


def emit_curve(kind: str, eps: float, grid: int = 200, alpha: float | None = None,
               r2: float | None = None) -> ExponentCurve:
    """Sample the named exponent on a uniform rate grid over its domain.

    Open domain ends are excluded by placing the grid at interior points.
    """
    key = canonical_kind(kind)
    if grid < 2:
        raise ValueError("grid must be at least 2")
    needs, domain, func = _CURVES[key]
    params: dict = {}
    for name, value in (("alpha", alpha), ("r2", r2)):
        if name in needs:
            if value is None:
                raise ValueError(f"curve {kind!r} requires {name}")
            params[name] = float(value)
        elif value is not None:
            raise ValueError(f"curve {kind!r} does not take {name}")
    if "alpha" in params and not (0.0 < params["alpha"] <= 0.5):
        raise ValueError("alpha must lie in (0, 1/2]")
    lo, hi, open_lo, open_hi = domain(eps, params)
    if hi <= lo:
        raise ValueError(f"empty rate domain [{lo}, {hi}] for {kind!r}")
    if open_lo or open_hi:
        rates = np.linspace(lo, hi, grid + 2)[1:-1]
    else:
        rates = np.linspace(lo, hi, grid)
    curve = ExponentCurve(label=key, channel_eps=eps, params=params)
    for r in rates:
        curve.points.append(ExponentPoint(float(r), float(func(float(r), eps, params))))
    if open_lo or open_hi:
        curve.notes.append(f"sampled on the open interval ({lo:.6g}, {hi:.6g})")
    if key == "eqspc":
        curve.notes.append("below E0(1/2,eps)/3 the superposition exponent is undefined; "
                           "use the random-coding value there")
    return curve
