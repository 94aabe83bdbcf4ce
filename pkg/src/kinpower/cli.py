"""Command-line entry point.

Subcommands: ``lr``, ``power``, ``power-curve``, ``subpop-bias``,
``synth-freqs``, ``validate``. Exit codes: 0 success, 2 validation
failure, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import engine, ibd, lrstats, synth, tables
from .power import (DEFAULT_CURVE_GRID, DEFAULT_TEST_ALPHAS, null_threshold,
                    power, power_curve, power_diff_ci, power_report,
                    power_reports_json, subpop_power, write_diff_cis_csv,
                    write_power_curves_csv, write_power_reports_csv)
from .errors import KinpowerError

TESTS = {
    "parent-child": (ibd.UNRELATED, ibd.PARENT_CHILD),
    "full-sib": (ibd.UNRELATED, ibd.FULL_SIB),
    "half-sib-paper": (ibd.UNRELATED, ibd.HALF_SIB_PAPER),
    "half-sib-standard": (ibd.UNRELATED, ibd.HALF_SIB_STANDARD),
}

DESK_SCALE_B = 100_000
PAPER_SCALE_B = 1_000_000


@dataclass
class RunSpec:
    """Resolved parameters of one simulation run."""

    table: tables.FrequencyTable
    test: str
    theta0: ibd.ThetaIBD
    theta1: ibd.ThetaIBD
    alphas: list[float]
    B: int
    seed: int
    statistics: tuple[str, ...]
    cb_weights: str
    workers: int
    out: Path
    null_same_subpop: bool


def _parse_theta(text: str) -> ibd.ThetaIBD:
    parts = [float(tok) for tok in text.split(",")]
    if len(parts) != 3:
        raise KinpowerError(f"theta needs 3 comma-separated values, got {text!r}")
    return ibd.ThetaIBD(*parts)


def _load_table(args) -> tables.FrequencyTable:
    meta = None
    if args.meta:
        with open(args.meta, encoding="utf-8") as fh:
            meta = tables.load_table_meta(fh)
    with open(args.freqs, encoding="utf-8") as fh:
        return tables.load_frequency_table(fh, meta=meta, floor=args.floor)


def _resolve_thetas(args):
    if args.test == "custom":
        if args.theta0 is None or args.theta1 is None:
            raise KinpowerError("--test custom requires --theta0 and --theta1")
        return _parse_theta(args.theta0), _parse_theta(args.theta1)
    theta0, theta1 = TESTS[args.test]
    if args.theta0 is not None:
        theta0 = _parse_theta(args.theta0)
    if args.theta1 is not None:
        theta1 = _parse_theta(args.theta1)
    return theta0, theta1


def _resolve_alphas(args) -> list[float]:
    if args.alpha:
        alphas = [float(tok) for chunk in args.alpha for tok in chunk.split(",")]
    elif args.test in DEFAULT_TEST_ALPHAS:
        alphas = [DEFAULT_TEST_ALPHAS[args.test]]
    else:
        raise KinpowerError("--alpha is required for custom tests")
    for a in alphas:
        if not (0.0 < a < 1.0):
            raise KinpowerError(f"alpha {a} not in (0, 1)")
    return alphas


def _build_runspec(args) -> RunSpec:
    table = _load_table(args)
    theta0, theta1 = _resolve_thetas(args)
    statistics = tuple(s.strip().upper() for s in args.stats.split(",")) \
        if args.stats else lrstats.STATISTICS
    unknown = set(statistics) - set(lrstats.STATISTICS)
    if unknown:
        raise KinpowerError(f"unknown statistics {sorted(unknown)}")
    B = args.B if args.B else (PAPER_SCALE_B if args.paper_scale else DESK_SCALE_B)
    out = Path(args.out)
    return RunSpec(
        table=table, test=args.test, theta0=theta0, theta1=theta1,
        alphas=_resolve_alphas(args), B=B, seed=args.seed,
        statistics=statistics, cb_weights=args.cb_weights,
        workers=args.workers, out=out,
        null_same_subpop=args.null_same_subpop,
    )


def _sim_config(spec: RunSpec, keep_genotypes: bool = False) -> engine.SimConfig:
    return engine.SimConfig(
        table=spec.table, theta0=spec.theta0, theta1=spec.theta1,
        B=spec.B, seed=spec.seed, statistics=spec.statistics,
        workers=spec.workers, cb_weights=spec.cb_weights,
        null_same_subpop=spec.null_same_subpop,
        keep_genotypes=keep_genotypes,
    )


def cmd_lr(args) -> int:
    table = _load_table(args)
    theta0, theta1 = _resolve_thetas(args)
    with open(args.profile1, encoding="utf-8") as fh:
        profile1 = tables.load_profile_csv(fh)
    with open(args.profile2, encoding="utf-8") as fh:
        profile2 = tables.load_profile_csv(fh)
    breakdown = lrstats.lr_all((profile1, profile2), theta0, theta1, table,
                               cb_weights=args.cb_weights)
    print(f"test: {args.test}  theta0={theta0.as_tuple()}  theta1={theta1.as_tuple()}")
    print("per-subpop log-LR:")
    for name, value in zip(breakdown.subpops, breakdown.per_subpop_log_lr):
        print(f"  {name:>12s}  log={value: .6f}  linear={math.exp(value):.4f}")
    print("statistics:")
    for stat in lrstats.STATISTICS:
        value = breakdown.stats[stat]
        linear = math.exp(value) if math.isfinite(value) else (
            0.0 if value < 0 else math.inf)
        print(f"  {stat:>5s}  log={value: .6f}  linear={linear:.4f}")
    return 0


def cmd_power(args) -> int:
    spec = _build_runspec(args)
    cfg = _sim_config(spec)
    null = engine.simulate_null(cfg)
    alt = engine.simulate_alt(cfg)
    reports = [
        power_report(null, alt, stat, alpha)
        for stat in spec.statistics
        for alpha in spec.alphas
    ]
    spec.out.mkdir(parents=True, exist_ok=True)
    (spec.out / "power_report.csv").write_text(
        write_power_reports_csv(reports), encoding="utf-8")
    (spec.out / "power_report.json").write_text(
        power_reports_json(reports), encoding="utf-8")
    if args.dump_samples:
        (spec.out / "null_samples.csv").write_text(
            engine.dump_samples(null), encoding="utf-8")
        (spec.out / "alt_samples.csv").write_text(
            engine.dump_samples(alt), encoding="utf-8")
    for r in reports:
        print(f"{r.statistic} alpha={r.alpha:g} threshold={r.threshold:.6g} "
              f"power={r.power:.4f} CI=({r.ci_low:.4f}, {r.ci_high:.4f})")
    return 0


def cmd_power_curve(args) -> int:
    spec = _build_runspec(args)
    grid = spec.alphas if args.alpha else list(DEFAULT_CURVE_GRID)
    grid = sorted(grid)
    cfg = _sim_config(spec)
    null = engine.simulate_null(cfg)
    alt = engine.simulate_alt(cfg)
    curves = [
        power_curve(null.statistics[s], alt.statistics[s], grid, statistic=s)
        for s in spec.statistics
    ]
    spec.out.mkdir(parents=True, exist_ok=True)
    (spec.out / "power_curves.csv").write_text(
        write_power_curves_csv(curves), encoding="utf-8")
    print(f"wrote {spec.out / 'power_curves.csv'} "
          f"({len(curves)} statistics x {len(grid)} grid points)")
    return 0


def cmd_subpop_bias(args) -> int:
    spec = _build_runspec(args)
    if spec.table.n_subpops < 2:
        raise KinpowerError("subpop-bias requires >=2 subpopulations")
    grid = sorted(spec.alphas if args.alpha else list(DEFAULT_CURVE_GRID))
    cfg = _sim_config(spec)
    null = engine.simulate_null(cfg)
    alt = engine.simulate_alt(cfg)
    spec.out.mkdir(parents=True, exist_ok=True)

    names = alt.subpop_names
    for stat in spec.statistics:
        curves = []
        for k, name in enumerate(names):
            mask = alt.subpop_tags == k
            curves.append(power_curve(
                null.statistics[stat], alt.statistics[stat][mask], grid,
                statistic=name))
        (spec.out / f"subpop_curves_{stat}.csv").write_text(
            write_power_curves_csv(curves), encoding="utf-8")

        alpha = spec.alphas[0] if args.alpha else DEFAULT_TEST_ALPHAS.get(
            spec.test, grid[-1])
        c = null_threshold(null.statistics[stat], alpha)
        per = [subpop_power(alt, stat, c, k) for k in range(len(names))]
        diffs = [
            power_diff_ci(per[i][0], per[i][1], per[j][0], per[j][1],
                             subpop_i=names[i], subpop_j=names[j])
            for i in range(len(names)) for j in range(i + 1, len(names))
        ]
        (spec.out / f"diff_ci_{stat}.csv").write_text(
            write_diff_cis_csv(diffs), encoding="utf-8")

        # self-test: per-subpop powers recombine exactly to the global power
        global_power, _ = power(alt.statistics[stat], c)
        recombined = sum(est * n for est, n, _ in per) / alt.B
        print(f"{stat}: recombination identity "
              f"{'ok' if abs(recombined - global_power) < 1e-9 else 'FAILED'} "
              f"(global={global_power:.6f}, recombined={recombined:.6f})")
    return 0


def cmd_synth_freqs(args) -> int:
    proportions = None
    if args.proportions:
        proportions = [float(tok) for tok in args.proportions.split(",")]
    sizes = None
    if args.sample_sizes:
        sizes = [int(tok) for tok in args.sample_sizes.split(",")]
    table = synth.synth_frequency_table(
        n_subpops=args.subpops, n_loci=args.loci, n_alleles=args.alleles,
        divergence=args.divergence, seed=args.seed,
        proportions=proportions, sample_sizes=sizes, floor=args.floor or 1e-5,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "freqs.csv").write_text(tables.dump_frequency_table(table), encoding="utf-8")
    (out / "meta.txt").write_text(tables.dump_table_meta(table), encoding="utf-8")
    print(f"wrote {out / 'freqs.csv'} and {out / 'meta.txt'} "
          f"(K={table.n_subpops}, m={table.n_loci})")
    return 0


def cmd_validate(args) -> int:
    table = _load_table(args)
    print(f"ok: {table.n_subpops} subpops, {table.n_loci} loci, "
          f"floor={table.floor:g}")
    for sp in table.subpops:
        size = "" if sp.sample_size is None else f", n={sp.sample_size}"
        print(f"  {sp.name}: proportion={sp.proportion:.6g}{size}")
    return 0


def _add_table_args(p):
    p.add_argument("--freqs", required=True, help="frequency CSV path")
    p.add_argument("--meta", help="companion metadata file")
    p.add_argument("--floor", type=float, default=None,
                   help="frequency floor (default from metadata, else 1e-5)")


def _add_test_args(p):
    p.add_argument("--test", default="full-sib",
                   choices=list(TESTS) + ["custom"])
    p.add_argument("--theta0", help="z0,z1,z2 for the null relationship")
    p.add_argument("--theta1", help="z0,z1,z2 for the alternative relationship")
    p.add_argument("--cb-weights", default="auto",
                   choices=["auto", "census", "samples", "equal"])


def _add_sim_args(p):
    p.add_argument("--alpha", action="append", default=[],
                   help="false positive rate(s), comma separated; repeatable")
    p.add_argument("--B", type=int, default=None, help="replicate count")
    p.add_argument("--paper-scale", action="store_true",
                   help="use B=1,000,000 when --B is not given")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stats", help="comma-separated subset of "
                   + ",".join(lrstats.STATISTICS))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--null-same-subpop", action="store_true",
                   help="force both null individuals into one subpopulation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinpower",
        description="Likelihood-ratio kinship tests and Monte Carlo power "
                    "analysis over structured populations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lr", help="LR statistics for two profiles")
    p.add_argument("profile1", help="first profile CSV (locus,allele1,allele2)")
    p.add_argument("profile2", help="second profile CSV")
    _add_table_args(p)
    _add_test_args(p)
    p.set_defaults(func=cmd_lr)

    p = sub.add_parser("power", help="null thresholds, power, exact CIs")
    _add_table_args(p)
    _add_test_args(p)
    _add_sim_args(p)
    p.add_argument("--dump-samples", action="store_true",
                   help="also write the raw log-LR sample matrices")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("power-curve", help="power versus FPR curves")
    _add_table_args(p)
    _add_test_args(p)
    _add_sim_args(p)
    p.set_defaults(func=cmd_power_curve)

    p = sub.add_parser("subpop-bias",
                       help="per-subpopulation power and difference-in-power CIs")
    _add_table_args(p)
    _add_test_args(p)
    _add_sim_args(p)
    p.set_defaults(func=cmd_subpop_bias)

    p = sub.add_parser("synth-freqs", help="generate a synthetic frequency table")
    p.add_argument("--subpops", type=int, default=4)
    p.add_argument("--loci", type=int, default=15)
    p.add_argument("--alleles", type=int, default=8)
    p.add_argument("--divergence", type=float, default=0.1)
    p.add_argument("--proportions", help="comma-separated mixing proportions")
    p.add_argument("--sample-sizes", help="comma-separated per-subpop counts")
    p.add_argument("--floor", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_synth_freqs)

    p = sub.add_parser("validate", help="load and validate a frequency table")
    _add_table_args(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KinpowerError, FileNotFoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
