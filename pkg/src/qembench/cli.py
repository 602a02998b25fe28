"""Command-line entry points for the benchmark harness."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .bench import (
    ExperimentConfig,
    MitigationReport,
    aggregate,
    copy_sweep,
    load_rows,
    run_experiment,
    run_oracle_suite,
    write_report,
)


def _load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    return ExperimentConfig.from_file(path)


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    report = run_experiment(config)
    write_report(report, args.out)
    for s in report.aggregates():
        print(
            f"Q={s.q} g={s.g} budget={s.budget:.0e} {s.method:>8}: "
            f"mean={s.mean_abs_error:.4f} max={s.max_abs_error:.4f}"
        )
    print(f"wrote results to {args.out}")
    return 0


def _cmd_copy_sweep(args) -> int:
    config = _load_config(args.config)
    report = copy_sweep(config, range(args.m_min, args.m_max + 1))
    write_report(report, args.out)
    for s in report.aggregates():
        print(
            f"Q={s.q} g={s.g} budget={s.budget:.0e} {s.method:>6}: "
            f"mean={s.mean_abs_error:.4f} max={s.max_abs_error:.4f}"
        )
    print(f"wrote results to {args.out}")
    return 0


def _cmd_oracle_check(args) -> int:
    records = run_oracle_suite(n_circuits=args.circuits, p=args.strength)
    failed = 0
    for rec in records:
        status = "PASS" if rec["passed"] else "FAIL"
        failed += not rec["passed"]
        print(
            f"[{status}] circuit {rec['circuit']} (Q={rec['q']}) {rec['method']:>6}: "
            f"|error| = {rec['abs_error']:.2e}"
        )
    print(f"{len(records) - failed}/{len(records)} checks passed")
    return 1 if failed else 0


def _cmd_export(args) -> int:
    rows = load_rows(Path(args.results) / "results.csv")
    if args.format == "json":
        json.dump([vars(r) for r in rows], sys.stdout, indent=2)
        print()
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["q", "g", "budget", "method", "mean_abs_error", "max_abs_error"])
        for s in aggregate(rows):
            writer.writerow([s.q, s.g, s.budget, s.method, s.mean_abs_error, s.max_abs_error])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qembench", description="Noisy-circuit error-mitigation benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment sweep")
    p_run.add_argument("--config", help="JSON or TOML experiment config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("copy-sweep", help="VD error versus copy number")
    p_sweep.add_argument("--config", help="JSON or TOML experiment config")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--m-min", type=int, default=2)
    p_sweep.add_argument("--m-max", type=int, default=6)
    p_sweep.set_defaults(func=_cmd_copy_sweep)

    p_oracle = sub.add_parser(
        "oracle-check", help="closed-form global-depolarizing mitigation checks"
    )
    p_oracle.add_argument("--circuits", type=int, default=10)
    p_oracle.add_argument("--strength", type=float, default=0.02)
    p_oracle.set_defaults(func=_cmd_oracle_check)

    p_export = sub.add_parser("export", help="re-emit persisted results")
    p_export.add_argument("--results", required=True, help="directory with results.csv")
    p_export.add_argument("--format", choices=("csv", "json"), default="csv")
    p_export.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
