"""verify <scenario|all> --config PATH --out DIR --seed INT [--tol-scale F] [--no-timestamp]

Exit codes: 0 pass, 1 residual failure, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .config import load_config
from .runner import EXIT_CONFIG, overall_exit, run_scenario, write_report
from .scenarios import list_scenarios


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run verification scenarios and write JSON reports.")
    p.add_argument("scenario", help="scenario name or 'all' (" + ", ".join(list_scenarios()) + ")")
    p.add_argument("--config", required=True, help="YAML configuration file")
    p.add_argument("--out", required=True, help="output directory for reports and sweep CSVs")
    p.add_argument("--seed", required=True, type=int, help="seed for randomized inputs")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every configurable tolerance")
    p.add_argument("--no-timestamp", action="store_true", help="omit timing fields for byte-identical reports")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    names = list_scenarios() if args.scenario == "all" else [args.scenario]
    if args.scenario != "all" and args.scenario not in list_scenarios():
        print(f"unknown scenario {args.scenario!r}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.tol_scale > 0:
        print("--tol-scale must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    reports = []
    for name in names:
        rep = run_scenario(name, cfg, args.seed, args.tol_scale)
        write_report(rep, args.out, with_timing=not args.no_timestamp)
        print(rep.table(), flush=True)
        reports.append(rep)
    code = overall_exit(reports)
    if len(reports) > 1:
        passed = sum(r.passed for r in reports)
        print(f"{passed}/{len(reports)} scenarios passed; exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
