"""Command-line entry point: ``dualga run | bench | landscape | ttest``.

Exit codes: 0 success, 1 I/O failure, 2 bad configuration, 3 contract violation.
"""

import argparse
import sys
from pathlib import Path

from ._validation import ConfigError, ContractViolation
from .engine import GaParams
from .harness import load_config, parse_strategy, read_results_csv, run_experiment, sr2_indicators, t_test
from .landscape import DEFAULT_MAX_BITS, double_local_optima, enumerate_local_optima, write_landscape_csv
from .objectives import get_problem
from .strategies import StrategyConfig, run_strategy

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_CONTRACT = 0, 1, 2, 3


def _cmd_run(args):
    config = load_config(args.config)
    results = run_experiment(config, out_dir=args.out, runs=args.runs, timestamp=not args.no_timestamp,
                             n_jobs=args.jobs)
    print(f"{'cell':<20} {'strategy':<14} {'GNTO':>6} {'SR':>7} {'SR2':>7}  MBF")
    for name, res in results.items():
        print(f"{name:<20} {res.strategy:<14} {res.gnto_label:>6} {res.sr:>7.1f} {res.sr2:>7.1f}  {res.mbf:.6g}")
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_bench(args):
    problem = get_problem(args.problem)
    skw = parse_strategy(args.strategy)
    for key in ("starter", "coding1", "coding2"):
        value = getattr(args, key)
        if value is not None:
            skw[key] = value
    params = GaParams.for_problem(problem, max_gen=args.max_gen)
    cfg = StrategyConfig.for_problem(problem, **skw)
    record = run_strategy(problem, params, cfg, args.seed)
    first = "-" if record.first_success is None else record.first_success
    print(f"problem={problem.id} strategy={record.strategy} seed={args.seed}")
    print(f"best_fitness={record.final_best_fitness!r} first_success={first} evaluations={record.evaluations}")
    print("best_x=" + " ".join(f"{v:.6g}" for v in record.best_x))
    for event in record.trace if args.trace else ():
        print(f"  g={event.generation:<5} {event.kind:<24} -> {event.coding_after} {event.detail}")
    return EXIT_OK


def _cmd_landscape(args):
    codings = ("sc", "gc") if args.coding == "both" else (args.coding,)
    reports = [enumerate_local_optima(args.problem, args.bits_per_param, c, max_bits=args.max_bits)
               for c in codings]
    for rep in reports:
        print(f"{rep.problem} N={rep.bits_per_param} {rep.coding}: {rep.count} local optima")
    if len(reports) == 2:
        print(f"double local optima: {double_local_optima(*reports)[0]}")
    if args.out:
        write_landscape_csv(args.out, reports)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_ttest(args):
    first_a, final_a = read_results_csv(args.a)
    first_b, final_b = read_results_csv(args.b)
    if args.metric == "sr2":
        if args.reference_gen is None:
            raise ConfigError("reference-gen: required for metric sr2; allowed: an integer generation")
        rep = t_test(sr2_indicators(first_a, args.reference_gen), sr2_indicators(first_b, args.reference_gen), "sr2")
    else:
        rep = t_test(final_a, final_b, "mbf")
    marks = " ".join(f"{c}:{'yes' if s else 'no'}" for c, s in zip((1.96, 2.58, 3.29), rep.significant))
    print(f"metric={rep.metric} t={rep.t:.4f} df={rep.df} {marks}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dualga", description="Dual-coding genetic algorithm experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", type=Path)
    run.add_argument("--runs", type=int, help="override the config's run count")
    run.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    run.add_argument("--jobs", type=int, help="parallel worker processes")
    run.set_defaults(func=_cmd_run)

    bench = sub.add_parser("bench", help="single seeded run")
    bench.add_argument("--problem", required=True)
    bench.add_argument("--strategy", default="smga")
    bench.add_argument("--starter", choices=("sc", "gc"))
    bench.add_argument("--coding1", choices=("sc", "gc"))
    bench.add_argument("--coding2", choices=("sc", "gc"))
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-gen", type=int)
    bench.add_argument("--trace", action="store_true", help="print encoding-change events")
    bench.set_defaults(func=_cmd_bench)

    land = sub.add_parser("landscape", help="exhaustive local-optimum census")
    land.add_argument("--problem", default="f6")
    land.add_argument("--bits-per-param", type=int, default=8)
    land.add_argument("--coding", choices=("sc", "gc", "both"), default="both")
    land.add_argument("--out", type=Path)
    land.add_argument("--max-bits", type=int, default=DEFAULT_MAX_BITS)
    land.set_defaults(func=_cmd_landscape)

    tt = sub.add_parser("ttest", help="compare two results.csv files")
    tt.add_argument("--a", required=True, type=Path)
    tt.add_argument("--b", required=True, type=Path)
    tt.add_argument("--metric", choices=("sr2", "mbf"), default="mbf")
    tt.add_argument("--reference-gen", type=int)
    tt.set_defaults(func=_cmd_ttest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
