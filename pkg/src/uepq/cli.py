"""Command-line front end: ``uepq {exponents,simulate,codebook,selftest}``.

Exit codes: 0 success, 2 configuration error, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .block import dump_codebook, gen_random_codebook, gen_spc_codebook
from .exponents import _CURVES, canonical_kind, emit_curve
from .harness import (
    DECODERS, POLICIES, PRESETS, ConfigError, CurveRequest, ExperimentConfig, preset, run_experiment, to_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_SELFTEST = 0, 2, 3


def _csv_list(cast):
    def parse(text: str):
        try:
            return tuple(cast(v) for v in text.split(",") if v.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uepq", description="Noisy twenty-questions querying policies.")
    parser.add_argument("--version", action="version", version=f"uepq {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("exponents", help="write error-exponent curves as CSV")
    ex.add_argument("--preset", choices=[p for p in PRESETS if p.startswith("exponent_")] + ["fig5", "fig6", "fig7", "fig10"])
    ex.add_argument("--kind", help=f"curve kind, one of {sorted(_CURVES)} (case and '_' ignored)")
    ex.add_argument("--eps", type=float)
    ex.add_argument("--alpha", type=float)
    ex.add_argument("--r2", type=float, help="partial rate of the less important bits (nats)")
    ex.add_argument("--grid", type=int, default=200)
    ex.add_argument("--out", help="output file for --kind (default stdout) or directory for --preset (default .)")

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment and write its CSV")
    sim.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sim.add_argument("--preset", choices=["fig8", "fig9"])
    sim.add_argument("--policy", type=_csv_list(str), help=f"comma list from {POLICIES}")
    sim.add_argument("--eps", type=float)
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--k", type=int, help="total resolution bits (k1=k, k2=0)")
    sim.add_argument("--k1", type=int)
    sim.add_argument("--k2", type=int)
    sim.add_argument("--n", type=_csv_list(int), help="comma list of query budgets N")
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--decoder", choices=DECODERS)
    sim.add_argument("--fixed-codebook", action="store_true", help="reuse one codebook across trials")
    sim.add_argument("--workers", type=int, help="worker processes (default: UEPQ_THREADS or CPU count)")
    sim.add_argument("--out", help="output CSV (default stdout)")

    cb = sub.add_parser("codebook", help="generate and dump a codebook")
    cb.add_argument("--kind", choices=["rc", "spc"], default="rc")
    cb.add_argument("--k", type=int)
    cb.add_argument("--k1", type=int)
    cb.add_argument("--k2", type=int)
    cb.add_argument("--n", type=int, required=True)
    cb.add_argument("--alpha", type=float, default=0.1)
    cb.add_argument("--seed", type=int, default=0)
    cb.add_argument("--out", help="output file (default stdout)")

    sub.add_parser("selftest", help="run the fast invariant checks")
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _curve_text(curve, grid: int) -> str:
    prov = json.dumps({"kind": curve.label, "eps": curve.channel_eps, "grid": grid, **curve.params},
                      sort_keys=True, separators=(",", ":"))
    return f"# uepq {__version__} config={prov}\n" + curve.to_csv()


def cmd_exponents(args) -> int:
    if (args.preset is None) == (args.kind is None):
        raise ConfigError("kind", "give exactly one of --preset or --kind")
    if args.preset is not None:
        name = args.preset if args.preset.startswith("exponent_") else f"exponent_{args.preset}"
        req: CurveRequest = preset(name)
        eps = req.eps if args.eps is None else args.eps
        outdir = Path(args.out or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        for kind, params in req.curves:
            curve = emit_curve(kind, eps, grid=args.grid, **params)
            path = outdir / f"{name}_{canonical_kind(kind)}.csv"
            path.write_text(_curve_text(curve, args.grid))
            _report(curve, str(path))
        return EXIT_OK
    if args.eps is None:
        raise ConfigError("eps", "--kind needs --eps")
    if not (0.0 < args.eps < 0.5):
        raise ConfigError("eps", "must lie in (0, 1/2)")
    try:
        key = canonical_kind(args.kind)
    except (KeyError, ValueError) as exc:
        raise ConfigError("kind", str(exc)) from exc
    try:
        curve = emit_curve(key, args.eps, grid=args.grid, alpha=args.alpha, r2=args.r2)
    except ValueError as exc:
        raise ConfigError("kind", str(exc)) from exc
    _write(_curve_text(curve, args.grid), args.out)
    _report(curve, args.out or "<stdout>")
    return EXIT_OK


def _report(curve, where: str) -> None:
    rates = curve.rates
    print(f"{curve.label}: {len(rates)} points, rate domain [{rates[0]:.6g}, {rates[-1]:.6g}] -> {where}",
          file=sys.stderr)
    for note in curve.notes:
        print(f"  note: {note}", file=sys.stderr)


def _simulate_config(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("config", "give at most one of --config or --preset")
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from exc
        if not isinstance(base, dict):
            raise ConfigError("config", "top level must be a JSON object")
    elif args.preset:
        base = asdict(preset(args.preset))

    if args.policy is not None:
        base["policies"] = args.policy
    for name in ("eps", "alpha", "trials", "seed", "decoder"):
        value = getattr(args, name)
        if value is not None:
            base[name] = value
    if args.fixed_codebook:
        base["fixed_codebook"] = True
    if args.k is not None and (args.k1 is not None or args.k2 is not None):
        raise ConfigError("k", "give either --k or --k1/--k2")
    if args.k is not None:
        base["k_pairs"] = ((args.k, 0),)
    elif args.k1 is not None or args.k2 is not None:
        if args.k1 is None or args.k2 is None:
            raise ConfigError("k1", "--k1 and --k2 go together")
        base["k_pairs"] = ((args.k1, args.k2),)
    if args.n is not None:
        base["n_values"] = args.n
        base["rates"] = None
    try:
        return ExperimentConfig.from_dict(base)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from exc


def cmd_simulate(args) -> int:
    cfg = _simulate_config(args)
    stats = run_experiment(cfg, workers=args.workers)
    for s in stats:
        s.records = []
    _write(to_csv(stats, cfg), args.out)
    return EXIT_OK


def cmd_codebook(args) -> int:
    if args.kind == "rc":
        if args.k is None:
            raise ConfigError("k", "random codebook needs --k")
        try:
            cb = gen_random_codebook(args.k, args.n, args.seed)
        except ValueError as exc:
            raise ConfigError("k", str(exc)) from exc
    else:
        if args.k1 is None or args.k2 is None:
            raise ConfigError("k1", "superposition codebook needs --k1 and --k2")
        try:
            cb = gen_spc_codebook(args.k1, args.k2, args.n, args.alpha, args.seed)
        except ValueError as exc:
            raise ConfigError("k1", str(exc)) from exc
    if args.out is None:
        dump_codebook(cb, sys.stdout)
    else:
        with open(args.out, "w") as fh:
            dump_codebook(cb, fh)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all
    return EXIT_OK if run_all() else EXIT_SELFTEST


COMMANDS = {"exponents": cmd_exponents, "simulate": cmd_simulate,
            "codebook": cmd_codebook, "selftest": cmd_selftest}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
