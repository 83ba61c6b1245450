"""Command line interface for the experiment driver.

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ConfigError, load_config
from .costs import ACCOUNTINGS
from .experiments import report_table1, run, sweep_beta, sweep_size, sweep_snr

SWEEP_OF_COMMAND = {
    "run": "none",
    "sweep-snr": "snr",
    "sweep-beta": "beta",
    "sweep-size": "size",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lisim",
        description="Distributed uplink processing simulator for panelized antenna surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("run", "single-point Monte Carlo run"),
        ("sweep-snr", "sweep the SNR grid"),
        ("sweep-beta", "sweep reduction factors for both algorithms"),
        ("sweep-size", "rerun at several surface sizes"),
        ("table1", "closed-form cost table at the reference design point"),
        ("validate-config", "check a config file and exit"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="path to the key=value config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the config output path")
        p.add_argument("--workers", type=int, help="parallel realization workers")
        p.add_argument("--accounting", choices=ACCOUNTINGS, help="tree-level cost accounting")
    return parser


def _load(args) -> object:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.accounting is not None:
        overrides["accounting"] = args.accounting
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    expected = SWEEP_OF_COMMAND.get(args.command)
    if expected is not None and cfg.sweep != expected:
        cfg = dataclasses.replace(cfg, sweep=expected)
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "table1":
            out = args.out or "table1.csv"
            rows = report_table1(out)
            for row in rows:
                print(
                    f"{row['method']:>4} {row['metric']:<14} "
                    f"all-levels={row['computed_all_levels']:.6g} "
                    f"paper-compat={row['computed_paper_compat']:.6g} "
                    f"published={row['published']:.6g}"
                )
            print(f"wrote {out}")
            return 0
        if args.command == "validate-config":
            if not args.config:
                raise ConfigError("--config is required for validate-config")
            load_config(args.config)
            print("config ok")
            return 0
        cfg = _load(args)
        from .config import validate_config

        validate_config(cfg)
        action = {
            "run": run,
            "sweep-snr": sweep_snr,
            "sweep-beta": sweep_beta,
            "sweep-size": sweep_size,
        }[args.command]
        action(cfg)
        print(f"wrote results for {args.command} (base path {cfg.out})")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
