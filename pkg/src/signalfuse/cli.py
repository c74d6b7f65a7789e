"""Command-line entry point.

Subcommands run pipeline stages against the CSV contracts in the output
directory; ``all`` runs the full chain. Exit codes: 1 for configuration
errors, 2 for data errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import RunConfig, apply_overrides, load_config
from .errors import ConfigError, DataError, NumericalError
from .pipeline import STAGES, run_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signalfuse",
        description=(
            "Backtest an index trading strategy that fuses news sentiment, "
            "technical indicators, and time-series forecasts."
        ),
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("ingest", "validate and canonicalize price/sentiment/news files"),
        ("label", "compute daily returns and 3-class labels"),
        ("signals", "compute indicator, forecaster, and sentiment signals"),
        ("backtest", "simulate strategies and the buy-and-hold benchmark"),
        ("evaluate", "score signal accuracy against realized classes"),
        ("report", "render return tables and figure data"),
        ("all", "run the full pipeline"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--prices", help="price CSV (date,open,high,low,close,adj_close,volume)")
        p.add_argument("--sentiment", help="sentiment CSV from the scorer")
        p.add_argument("--news", help="raw news CSV")
        p.add_argument("--from", dest="window_from", help="test window start (ISO date)")
        p.add_argument("--to", dest="window_to", help="test window end (ISO date)")
        p.add_argument("--lag", type=int, help="sentiment lag in trading days (0, 1, or 2)")
        p.add_argument("--execution", choices=("next_day", "same_day"), help="trade timing")
        p.add_argument("--capital", type=float, help="initial capital")
        p.add_argument("--seed", type=int, help="random seed recorded with the run")
        p.add_argument("--out", help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            if not args.prices:
                raise ConfigError("either --config or --prices is required")
            cfg = RunConfig(prices=args.prices)
        cfg = apply_overrides(cfg, args)
        if args.command == "all":
            run_all(cfg)
        else:
            STAGES[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
