"""Seeded Monte Carlo runner for the four querying policies.

Each trial owns a random substream derived from
``SeedSequence(master_seed, spawn_key=(policy, N, k1, k2, trial))``, so the
output is bit-identical regardless of how trials are split across workers.
"""

from __future__ import annotations

import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .adaptive import bz_draws, bz_run_batch
from .block import gen_random_codebook, gen_spc_codebook, jml_decode, marginal_ml_m1_decode, ml_decode, sc_decode
from .channel import Bsc, pack, transmit, unpack
from .numerics import LN2, c2, capacity
from .repetition import allocate, repetition_run
from .target import finite_resolution_estimate, merge, quantize, quantized_cost, split, squared_cost, SplitMessage

log = logging.getLogger(__name__)

POLICIES = ("bz", "repetition", "rc", "spc")
DECODERS = ("sc", "jml", "marginal")
_POLICY_ID = {name: i + 1 for i, name in enumerate(POLICIES)}
_CHUNK = 250

CSV_HEADER = ("policy,N,k1,k2,eps,alpha,mean_cq,se_cq,mean_mse,se_mse,"
              "p_block_err,p_m1_err,p_m2_err_given_m1,trials,seed")

FIG9_SCHEDULE = (40, 50, 63, 80, 100, 120, 140, 160, 180, 200, 220)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    policies: tuple[str, ...] = ("rc", "spc")
    eps: float = 0.3
    alpha: float = 0.1
    k_pairs: tuple[tuple[int, int], ...] = ((6, 6),)
    n_values: tuple[int, ...] | None = None
    rates: tuple[float, float] | None = None
    trials: int = 3000
    seed: int = 0
    decoder: str = "sc"
    fixed_codebook: bool = False

    def __post_init__(self):
        self.policies = tuple(self.policies)
        self.k_pairs = tuple(tuple(int(v) for v in p) for p in self.k_pairs)
        if self.n_values is not None:
            self.n_values = tuple(int(v) for v in self.n_values)
        if self.rates is not None:
            self.rates = tuple(float(v) for v in self.rates)
        self.validate()

    def validate(self) -> None:
        if not self.policies:
            raise ConfigError("policies", "at least one policy is required")
        for p in self.policies:
            if p not in POLICIES:
                raise ConfigError("policies", f"unknown policy {p!r}; choose from {POLICIES}")
        if not (0.0 <= self.eps < 0.5):
            raise ConfigError("eps", "must lie in [0, 1/2)")
        if not (0.0 < self.alpha <= 0.5):
            raise ConfigError("alpha", "must lie in (0, 1/2]")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if self.decoder not in DECODERS:
            raise ConfigError("decoder", f"must be one of {DECODERS}")
        if not self.k_pairs:
            raise ConfigError("k_pairs", "at least one (k1, k2) pair is required")
        for k1, k2 in self.k_pairs:
            if k1 < 1 or k2 < 0 or k1 + k2 > 20:
                raise ConfigError("k_pairs", f"({k1}, {k2}) needs k1 >= 1, k2 >= 0, k1 + k2 <= 20")
            if "spc" in self.policies and k2 < 1:
                raise ConfigError("k_pairs", "superposition coding needs k2 >= 1")
        if (self.n_values is None) == (self.rates is None):
            raise ConfigError("n_values", "give exactly one of n_values or rates")
        if self.n_values is not None and any(n < 1 for n in self.n_values):
            raise ConfigError("n_values", "every N must be positive")
        if self.rates is not None and (min(self.rates) < 0 or sum(self.rates) <= 0):
            raise ConfigError("rates", "rates must be non-negative with a positive sum")

    def points(self) -> list[tuple[int, int, int]]:
        """(k1, k2, N) simulation points.

        With rate targets, N = ceil((k1+k2) ln 2 / (R1+R2)) so the total rate
        never exceeds its target.
        """
        if self.rates is not None:
            total = sum(self.rates)
            return [(k1, k2, math.ceil((k1 + k2) * LN2 / total - 1e-9)) for k1, k2 in self.k_pairs]
        return [(k1, k2, n) for k1, k2 in self.k_pairs for n in self.n_values]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config field")
        return cls(**data)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    message: int
    decoded: int
    distance: int
    quantized_cost: float
    squared_cost: float
    m1_ok: bool
    m2_ok: bool


@dataclass
class AggregateStats:
    policy: str
    n: int
    k1: int
    k2: int
    eps: float
    alpha: float
    trials: int
    seed: int
    mean_cq: float
    se_cq: float
    mean_mse: float
    se_mse: float
    p_block_err: float
    p_m1_err: float
    p_m2_err_given_m1: float
    se_block_err: float = 0.0
    se_m1_err: float = 0.0
    se_m2_err_given_m1: float = 0.0
    records: list[TrialRecord] = field(default_factory=list, repr=False)

    def csv_row(self) -> str:
        vals = [self.policy, self.n, self.k1, self.k2, _fmt(self.eps), _fmt(self.alpha),
                _fmt(self.mean_cq), _fmt(self.se_cq), _fmt(self.mean_mse), _fmt(self.se_mse),
                _fmt(self.p_block_err), _fmt(self.p_m1_err), _fmt(self.p_m2_err_given_m1),
                self.trials, self.seed]
        return ",".join(str(v) for v in vals)


def _fmt(v: float) -> str:
    return format(v, ".10g")


def substream(seed: int, policy: str, n: int, k1: int, k2: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_POLICY_ID[policy], n, k1, k2, trial))
    return np.random.Generator(np.random.PCG64(ss))


def _record(trial: int, x: float, k1: int, k2: int, m: int, m_hat: int) -> TrialRecord:
    k = k1 + k2
    x_hat = finite_resolution_estimate(m_hat, k)
    true, est = split(m, k1, k2), split(m_hat, k1, k2)
    return TrialRecord(
        trial=trial, message=m, decoded=m_hat, distance=abs(m - m_hat),
        quantized_cost=quantized_cost(x, x_hat, k), squared_cost=squared_cost(x, x_hat),
        m1_ok=true.m1 == est.m1, m2_ok=true.m2 == est.m2,
    )


def _run_chunk(args) -> list[TrialRecord]:
    cfg_json, policy, k1, k2, n, start, stop = args
    cfg = ExperimentConfig.from_dict(json.loads(cfg_json))
    ch = Bsc(cfg.eps)
    k = k1 + k2
    out: list[TrialRecord] = []

    if policy == "bz":
        xs, draws = [], []
        for t in range(start, stop):
            rng = substream(cfg.seed, policy, n, k1, k2, t)
            xs.append(rng.random())
            draws.append(bz_draws(rng, n))
        msgs = np.array([quantize(x, k).message for x in xs])
        decoded = bz_run_batch(msgs, k, n, cfg.eps, np.array(draws).reshape(len(xs), n, 2))
        return [_record(t, x, k1, k2, int(m), int(d))
                for t, x, m, d in zip(range(start, stop), xs, msgs, decoded)]

    plan = allocate(n, k, cfg.eps) if policy == "repetition" else None
    fixed = None
    if cfg.fixed_codebook and policy in ("rc", "spc"):
        rng0 = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_POLICY_ID[policy], n, k1, k2)))
        fixed = gen_random_codebook(k, n, rng0) if policy == "rc" else gen_spc_codebook(k1, k2, n, cfg.alpha, rng0)

    for t in range(start, stop):
        rng = substream(cfg.seed, policy, n, k1, k2, t)
        x = rng.random()
        m = quantize(x, k).message
        if policy == "repetition":
            m_hat = repetition_run(x, plan, ch, rng)
        elif policy == "rc":
            cb = fixed or gen_random_codebook(k, n, rng)
            y = transmit(unpack(cb.words[m], n), ch, rng)
            m_hat = ml_decode(pack(y), cb)
        else:
            cb = fixed or gen_spc_codebook(k1, k2, n, cfg.alpha, rng)
            sm = split(m, k1, k2)
            yw = pack(transmit(cb.codeword(sm.m1, sm.m2), ch, rng))
            if cfg.decoder == "sc":
                m1_hat, m2_hat = sc_decode(yw, cb)
            elif cfg.decoder == "jml":
                m1_hat, m2_hat = jml_decode(yw, cb)
            else:
                m1_hat = marginal_ml_m1_decode(yw, cb, ch)
                m2_hat = int(np.argmin(np.bitwise_count(cb.satellites ^ yw ^ cb.clouds[m1_hat]).sum(axis=-1)))
            m_hat = merge(SplitMessage(k1, k2, m1_hat, m2_hat))
        out.append(_record(t, x, k1, k2, m, m_hat))
    return out


def feasible(policy: str, k: int, n: int) -> bool:
    """Block and repetition policies need N >= k (distinct codewords / one use per bit)."""
    return policy == "bz" or n >= k


def worker_count() -> int:
    env = os.environ.get("UEPQ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    if len(values) < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def aggregate(policy: str, k1: int, k2: int, n: int, cfg: ExperimentConfig,
              records: list[TrialRecord]) -> AggregateStats:
    cq = np.array([r.quantized_cost for r in records])
    sq = np.array([r.squared_cost for r in records])
    block = np.array([r.decoded != r.message for r in records], dtype=float)
    m1_err = np.array([not r.m1_ok for r in records], dtype=float)
    m2_cond = np.array([not r.m2_ok for r in records if r.m1_ok], dtype=float)
    mean_cq, se_cq = _mean_se(cq)
    mean_sq, se_sq = _mean_se(sq)
    p_blk, se_blk = _mean_se(block)
    p_m1, se_m1 = _mean_se(m1_err)
    p_m2, se_m2 = _mean_se(m2_cond) if len(m2_cond) else (math.nan, math.nan)
    return AggregateStats(policy, n, k1, k2, cfg.eps, cfg.alpha, len(records), cfg.seed,
                          mean_cq, se_cq, mean_sq, se_sq, p_blk, p_m1, p_m2,
                          se_blk, se_m1, se_m2, records)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[AggregateStats]:
    """Run every (policy, point) of cfg and aggregate in trial order."""
    workers = worker_count() if workers is None else max(1, workers)
    cfg_json = cfg.to_json()
    jobs = []
    for policy in cfg.policies:
        for k1, k2, n in cfg.points():
            if not feasible(policy, k1 + k2, n):
                log.warning("skipping %s at N=%d: needs N >= k=%d", policy, n, k1 + k2)
                continue
            chunks = [(cfg_json, policy, k1, k2, n, s, min(s + _CHUNK, cfg.trials))
                      for s in range(0, cfg.trials, _CHUNK)]
            jobs.append(((policy, k1, k2, n), chunks))

    flat = [c for _, chunks in jobs for c in chunks]
    if workers == 1:
        results = [_run_chunk(c) for c in flat]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, flat))

    out, i = [], 0
    for (policy, k1, k2, n), chunks in jobs:
        records = [r for res in results[i:i + len(chunks)] for r in res]
        i += len(chunks)
        out.append(aggregate(policy, k1, k2, n, cfg, records))
        log.info("%s N=%d k=(%d,%d): mean c_q %.3g", policy, n, k1, k2, out[-1].mean_cq)
    return out


def to_csv(stats: list[AggregateStats], cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# uepq {__version__} seed={cfg.seed} config={cfg.to_json()}\n")
    buf.write(CSV_HEADER + "\n")
    for s in stats:
        buf.write(s.csv_row() + "\n")
    return buf.getvalue()


def fig8_rates(eps: float = 0.3, alpha: float = 0.1) -> tuple[float, float]:
    r2 = 0.9 * c2(alpha, eps)
    return 0.5 * (capacity(eps) - r2), r2


@dataclass(frozen=True)
class CurveRequest:
    name: str
    eps: float
    curves: tuple[tuple[str, dict], ...]


def preset(name: str):
    """Parameterizations of the published experiments and exponent plots."""
    if name == "fig8":
        return ExperimentConfig(policies=("rc", "spc"), eps=0.3, alpha=0.1,
                                k_pairs=((5, 4), (6, 5), (6, 6), (7, 7), (8, 8)),
                                rates=fig8_rates(0.3, 0.1), trials=3000, decoder="marginal")
    if name == "fig9":
        return ExperimentConfig(policies=("rc", "spc", "bz"), eps=0.3, alpha=0.1,
                                k_pairs=((6, 6),), n_values=FIG9_SCHEDULE, trials=3000, decoder="marginal")
    eps, alpha = 0.45, 0.11
    full = c2(alpha, eps)
    if name == "exponent_fig5":
        return CurveRequest(name, eps, (("Er_shift", {"r2": full}), ("Emsbs_sc", {"alpha": alpha})))
    if name == "exponent_fig6":
        return CurveRequest(name, eps, (("Er_shift", {"r2": 2.0 * full / 3.0}), ("Emsbs_sc", {"alpha": alpha})))
    if name == "exponent_fig7":
        return CurveRequest(name, eps, (("Er", {}), ("Eq_spc", {})))
    if name == "exponent_fig10":
        return CurveRequest(name, eps, (("Er_shift", {"r2": full}), ("Emsbs_sc", {"alpha": alpha}),
                                        ("2R", {})))
    raise ValueError(f"unknown preset {name!r}")


PRESETS = ("fig8", "fig9", "exponent_fig5", "exponent_fig6", "exponent_fig7", "exponent_fig10")
