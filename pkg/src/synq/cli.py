"""Command-line interface.

Subcommands: run, sweep, eval-grid, lqr-oracle, pe-check. Exit codes:
0 success, 1 configuration error, 2 divergence, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import glob
import os
import sys

from .errors import (ConfigurationError, DivergenceError, ExcitationError,
                     SolverError)
from .harness import (analyze_pe_log, eval_grid_from_summary, load_config,
                      lqr_oracle_from_config, run_experiment)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synq",
        description="Synchronous integral Q-learning experiments and oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("config", help="path to a .cfg experiment file")
    run_p.add_argument("--out-dir", default=None)
    run_p.add_argument("--seed-override", type=int, default=None)
    run_p.add_argument("--quiet", action="store_true")

    sweep_p = sub.add_parser("sweep", help="run every config in a directory")
    sweep_p.add_argument("config_dir")
    sweep_p.add_argument("--out-dir", default=None)
    sweep_p.add_argument("--workers", type=int, default=None)
    sweep_p.add_argument("--seed-override", type=int, default=None)
    sweep_p.add_argument("--quiet", action="store_true")

    grid_p = sub.add_parser("eval-grid", help="recompute oracle errors from a summary")
    grid_p.add_argument("summary", help="path to a *_summary.json file")
    grid_p.add_argument("--out-dir", default=None)
    grid_p.add_argument("--quiet", action="store_true")

    lqr_p = sub.add_parser("lqr-oracle", help="print the Riccati solution for a config")
    lqr_p.add_argument("config")

    pe_p = sub.add_parser("pe-check", help="analyze the PE column of a CSV log")
    pe_p.add_argument("log", help="path to a *_log.csv file")
    pe_p.add_argument("--threshold", type=float, default=1e-8)

    return parser


def _run_one(config_path: str, out_dir, seed_override, quiet: bool) -> int:
    cfg = load_config(config_path)
    run_experiment(cfg, out_dir=out_dir, seed_override=seed_override, quiet=quiet)
    return EXIT_OK


def _sweep_worker(args):
    config_path, out_dir, seed_override, quiet = args
    try:
        return config_path, _run_one(config_path, out_dir, seed_override, quiet), ""
    except Exception as err:  # classified by the parent
        return config_path, _classify(err), str(err)


def _classify(err: Exception) -> int:
    if isinstance(err, DivergenceError):
        return EXIT_DIVERGED
    if isinstance(err, (ConfigurationError, SolverError, ExcitationError)):
        return EXIT_CONFIG
    if isinstance(err, OSError):
        return EXIT_IO
    raise err


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run_one(args.config, args.out_dir, args.seed_override,
                            args.quiet)

        if args.command == "sweep":
            paths = sorted(glob.glob(os.path.join(args.config_dir, "*.cfg")))
            if not paths:
                raise ConfigurationError(
                    f"no .cfg files found in {args.config_dir!r}"
                )
            jobs = [(p, args.out_dir, args.seed_override, args.quiet)
                    for p in paths]
            worst = EXIT_OK
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=args.workers) as pool:
                for path, code, msg in pool.map(_sweep_worker, jobs):
                    status = "ok" if code == EXIT_OK else f"failed ({msg})"
                    print(f"{path}: {status}")
                    worst = max(worst, code)
            return worst

        if args.command == "eval-grid":
            report = eval_grid_from_summary(args.summary, out_dir=args.out_dir)
            if not args.quiet:
                print(f"max |V_est - V*|  = {report.max_value_error:.6e}")
                print(f"mean |V_est - V*| = {report.mean_value_error:.6e}")
                print(f"max |mu_est - mu*|  = {report.max_policy_error:.6e}")
                print(f"mean |mu_est - mu*| = {report.mean_policy_error:.6e}")
            return EXIT_OK

        if args.command == "lqr-oracle":
            cfg = load_config(args.config)
            sol = lqr_oracle_from_config(cfg)
            print(f"iterations: {sol.iterations}")
            print(f"P =\n{sol.P}")
            print(f"K =\n{sol.K}")
            print(f"riccati residual: {sol.residual:.3e}")
            return EXIT_OK

        if args.command == "pe-check":
            stats = analyze_pe_log(args.log, threshold=args.threshold)
            for key in ("reports", "explore_end", "explore_windows",
                        "explore_beta1_min", "explore_beta1_median",
                        "below_threshold_explore", "after_windows",
                        "after_beta1_min", "below_threshold_after"):
                print(f"{key}: {stats[key]}")
            return EXIT_OK

        raise ConfigurationError(f"unknown command {args.command!r}")
    except DivergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigurationError, SolverError, ExcitationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
