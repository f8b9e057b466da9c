import json
import math

import numpy as np
import pytest

from uepq import harness
from uepq.harness import (
    CSV_HEADER, FIG9_SCHEDULE, ConfigError, CurveRequest, ExperimentConfig, fig8_rates, preset, run_experiment,
    substream, to_csv, worker_count,
)
from uepq.numerics import LN2, c2, capacity


def small_cfg(**kw):
    base = dict(policies=("bz", "repetition", "rc", "spc"), eps=0.2, alpha=0.1, k_pairs=((3, 3),),
                n_values=(20, 40), trials=60, seed=17, decoder="marginal")
    base.update(kw)
    return ExperimentConfig(**base)


def test_determinism_across_workers_and_chunks(monkeypatch):
    cfg = small_cfg()
    one = to_csv(run_experiment(cfg, workers=1), cfg)
    two = to_csv(run_experiment(cfg, workers=2), cfg)
    monkeypatch.setattr(harness, "_CHUNK", 7)
    chunked = to_csv(run_experiment(cfg, workers=1), cfg)
    assert one == two == chunked


def test_csv_layout():
    cfg = small_cfg(policies=("rc",), n_values=(20,), trials=5)
    lines = to_csv(run_experiment(cfg, workers=1), cfg).splitlines()
    assert lines[0].startswith("# uepq ") and "seed=17" in lines[0]
    assert json.loads(lines[0].split("config=", 1)[1])["trials"] == 5
    assert lines[1] == CSV_HEADER
    assert len(lines[2].split(",")) == len(CSV_HEADER.split(","))


@pytest.mark.parametrize("decoder", ["sc", "jml", "marginal"])
def test_noiseless_runs_are_exact(decoder):
    # long blocks so sparse satellites are distinct with overwhelming probability
    cfg = small_cfg(eps=0.0, decoder=decoder, n_values=(200,))
    for s in run_experiment(cfg, workers=1):
        assert s.p_block_err == 0 and s.p_m1_err == 0 and s.p_m2_err_given_m1 == 0 and s.mean_cq == 0


def test_record_costs_match_distance_identity():
    cfg = small_cfg(eps=0.3)
    for s in run_experiment(cfg, workers=1):
        k = s.k1 + s.k2
        for r in s.records:
            assert r.quantized_cost == 2.0 ** (-2 * k) * r.distance**2
            assert r.distance == abs(r.message - r.decoded)


def test_mean_cost_non_increasing_in_n():
    cfg = ExperimentConfig(policies=("rc", "bz"), eps=0.3, k_pairs=((4, 4),), n_values=(20, 60, 120),
                           trials=400, seed=2)
    stats = run_experiment(cfg, workers=1)
    for policy in ("rc", "bz"):
        seq = [s for s in stats if s.policy == policy]
        for a, b in zip(seq, seq[1:]):
            assert b.mean_cq <= a.mean_cq + 3 * math.hypot(a.se_cq, b.se_cq)


def test_stderr_definition():
    cfg = small_cfg(policies=("rc",), n_values=(20,), eps=0.3, trials=50)
    s = run_experiment(cfg, workers=1)[0]
    cq = np.array([r.quantized_cost for r in s.records])
    assert s.se_cq == pytest.approx(cq.std(ddof=1) / math.sqrt(50))
    assert 0 <= s.p_block_err <= 1


def test_infeasible_points_are_skipped():
    cfg = small_cfg(policies=("rc", "bz"), n_values=(4,), trials=3)
    stats = run_experiment(cfg, workers=1)
    assert [s.policy for s in stats] == ["bz"]


def test_substreams_differ():
    a = substream(0, "rc", 40, 3, 3, 0).random()
    assert a != substream(0, "rc", 40, 3, 3, 1).random()
    assert a != substream(0, "spc", 40, 3, 3, 0).random()
    assert a != substream(1, "rc", 40, 3, 3, 0).random()
    assert a == substream(0, "rc", 40, 3, 3, 0).random()


@pytest.mark.parametrize("kw,field", [
    (dict(policies=("nope",)), "policies"),
    (dict(eps=0.5), "eps"),
    (dict(alpha=0.0), "alpha"),
    (dict(trials=0), "trials"),
    (dict(decoder="map"), "decoder"),
    (dict(k_pairs=((3, 0),)), "k_pairs"),
    (dict(k_pairs=((15, 6),)), "k_pairs"),
    (dict(n_values=None), "n_values"),
])
def test_config_validation(kw, field):
    with pytest.raises(ConfigError) as info:
        small_cfg(**kw)
    assert info.value.field == field


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"policies": ["rc"], "n_values": [10], "bogus": 1})
    cfg = small_cfg()
    assert ExperimentConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_fig8_preset():
    cfg = preset("fig8")
    r1, r2 = fig8_rates()
    assert r2 == pytest.approx(0.9 * c2(0.1, 0.3))
    assert r1 == pytest.approx(0.5 * (capacity(0.3) - r2))
    assert cfg.eps == 0.3 and cfg.alpha == 0.1 and cfg.trials == 3000
    assert cfg.k_pairs == ((5, 4), (6, 5), (6, 6), (7, 7), (8, 8))
    for k1, k2, n in cfg.points():
        assert (k1 + k2) * LN2 / n <= r1 + r2 < (k1 + k2) * LN2 / (n - 1)


def test_fig9_preset():
    cfg = preset("fig9")
    assert set(cfg.policies) == {"rc", "spc", "bz"}
    assert cfg.k_pairs == ((6, 6),) and cfg.n_values == FIG9_SCHEDULE
    assert 200 in FIG9_SCHEDULE and min(FIG9_SCHEDULE) >= 12


def test_exponent_presets():
    full = c2(0.11, 0.45)
    fig5 = preset("exponent_fig5")
    assert isinstance(fig5, CurveRequest) and fig5.eps == 0.45
    assert dict(fig5.curves)["Er_shift"]["r2"] == pytest.approx(full)
    assert dict(preset("exponent_fig6").curves)["Er_shift"]["r2"] == pytest.approx(2 * full / 3)
    assert [k for k, _ in preset("exponent_fig7").curves] == ["Er", "Eq_spc"]
    with pytest.raises(ValueError):
        preset("fig11")


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("UEPQ_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("UEPQ_THREADS")
    assert worker_count() >= 1
