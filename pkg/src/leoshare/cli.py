"""Command-line interface.

Subcommands:
  sweep       density-ratio sweep (analytic, optionally + Monte Carlo), CSV/JSON out
  validate    check a config file; prints diagnostics, exit 0 iff clean
  thresholds  closed-form density-ratio thresholds for both families
  mc-check    analytic-vs-Monte-Carlo agreement table across all four configurations

Exit codes: 0 success, 1 validation/agreement failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .analytic import NumericsError, density_ratio_threshold, ergodic_se
from .config import (
    ConfigError,
    QuadratureConfig,
    Sharing,
    collect_diagnostics,
    parse_config_file,
)
from .montecarlo import estimate
from .presets import PRESET_NAMES, preset
from .sweep import SweepSpec, run_sweep, write_csv, write_summary

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

DEFAULT_GRID = "1:1e4:9"
MC_CHECK_RATIOS = {"ul": (10.0, 100.0, 1000.0), "dl": (1.0, 10.0, 10.0**1.5)}


def _load_params(args):
    if args.config:
        params, _ = parse_config_file(args.config)
        return params
    return preset(args.preset)


def _parse_grid(text: str):
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {text!r}; expected LO:HI:N (log-spaced ratios)") from exc
    if lo <= 0 or hi < lo or n < 1 or (hi == lo and n > 1):
        raise ConfigError(f"bad grid spec {text!r}: need 0 < LO <= HI and N >= 1")
    if n == 1:
        return (lo,)
    step = (math.log10(hi) - math.log10(lo)) / (n - 1)
    return tuple(10.0 ** (math.log10(lo) + k * step) for k in range(n))


def _cmd_sweep(args) -> int:
    params = _load_params(args)
    spec = SweepSpec(
        params=params,
        grid=_parse_grid(args.grid),
        families=tuple(args.families),
        trials=args.trials,
        master_seed=args.seed,
        workers=args.workers,
        quadrature=QuadratureConfig(gamma_transform=args.transform),
    )
    result = run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(result.rows, out / "sweep.csv")
    summary = write_summary(result, out / "summary.json")
    print(f"{'config':<8}{'ratio':>12}{'analytic_se':>14}{'mc_se':>12}{'mc_stderr':>12}")
    for row in result.rows:
        print(f"{row.config:<8}{row.ratio:>12.4g}{row.analytic_se:>14.6g}"
              f"{row.mc_se:>12.4g}{row.mc_stderr:>12.2g}")
    for fam, verdict in summary["verdicts"].items():
        print(f"[{fam}] {verdict}")
    print(f"wrote {out / 'sweep.csv'} and {out / 'summary.json'}")
    if result.errors:
        for err in result.errors:
            print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_validate(args) -> int:
    diags = collect_diagnostics(args.config)
    for d in diags:
        print(d)
    if any(d.severity == "error" for d in diags):
        return EXIT_VALIDATION
    print("configuration is valid")
    return EXIT_OK


def _cmd_thresholds(args) -> int:
    params = _load_params(args)
    for family in ("ul", "dl"):
        try:
            value = density_ratio_threshold(params, family)
        except ValueError as exc:
            print(f"{family}: n/a ({exc})")
            continue
        print(f"{family}: sharing with uplink terrestrial networks is advantageous for "
              f"lambda_ut/lambda_b <= {value:.4g}")
    return EXIT_OK


def _cmd_mc_check(args) -> int:
    params = _load_params(args)
    quad = QuadratureConfig(gamma_transform=args.transform)
    failures = 0
    print(f"{'config':<8}{'ratio':>10}{'analytic':>14}{'mc':>14}{'stderr':>12}"
          f"{'|dev|/se':>10}{'rel dev':>10}  verdict")
    for family, ratios in MC_CHECK_RATIOS.items():
        for sharing in (s for s in Sharing if s.family == family):
            for k, ratio in enumerate(ratios):
                cfg = params.scenario(sharing, ratio)
                analytic = ergodic_se(cfg, quad)
                seed = args.seed + 1000 * k
                est = estimate(cfg, args.trials, master_seed=seed, workers=args.workers)
                mc, err = est.ergodic_se.value, est.ergodic_se.stderr
                dev = abs(analytic - mc)
                rel = dev / abs(mc) if mc else math.inf
                ok = dev <= max(3.0 * err, 0.05 * abs(mc))
                failures += 0 if ok else 1
                print(f"{sharing.value:<8}{ratio:>10.4g}{analytic:>14.6g}{mc:>14.6g}"
                      f"{err:>12.2g}{dev / err if err else math.inf:>10.2f}{rel:>10.2%}"
                      f"  {'ok' if ok else 'FAIL'}")
    if failures:
        print(f"{failures} case(s) outside max(3 s.e., 5% relative)", file=sys.stderr)
        return EXIT_VALIDATION
    print("all cases within max(3 s.e., 5% relative)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leoshare",
        description="Ergodic spectral efficiency of LEO satellite networks under "
                    "spectrum sharing with terrestrial networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p):
        p.add_argument("--config", help="INI config file (overrides --preset)")
        p.add_argument("--preset", choices=PRESET_NAMES, default="handheld",
                       help="built-in parameter set (default: handheld)")

    p_sweep = sub.add_parser("sweep", help="run a density-ratio sweep")
    add_source(p_sweep)
    p_sweep.add_argument("--grid", default=DEFAULT_GRID,
                         help=f"LO:HI:N log-spaced density ratios (default {DEFAULT_GRID})")
    p_sweep.add_argument("--trials", type=int, default=0,
                         help="Monte Carlo trials per grid point (0 = analytic only)")
    p_sweep.add_argument("--seed", type=int, default=1, help="master seed")
    p_sweep.add_argument("--out", default="out", help="output directory")
    p_sweep.add_argument("--families", nargs="+", choices=("ul", "dl"), default=("ul", "dl"))
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--transform", choices=("rational", "log"), default="rational")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_thr = sub.add_parser("thresholds", help="closed-form density-ratio thresholds")
    add_source(p_thr)
    p_thr.set_defaults(func=_cmd_thresholds)

    p_mc = sub.add_parser("mc-check", help="analytic-vs-Monte-Carlo agreement table")
    add_source(p_mc)
    p_mc.add_argument("--trials", type=int, default=20000)
    p_mc.add_argument("--seed", type=int, default=7)
    p_mc.add_argument("--workers", type=int, default=1)
    p_mc.add_argument("--transform", choices=("rational", "log"), default="rational")
    p_mc.set_defaults(func=_cmd_mc_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
