"""Command-line entry point: ``breakclause {price,par,sweep,preset}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, dump_config, load_config
from .numerics import NumericalError
from .presets import UnknownPreset, get_preset, presets
from .report import Table
from .scenarios import RunError, par_table, price_table, run_report

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("--seed", type=int, default=None, help="RNG seed for the Monte-Carlo cross-check")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="breakclause", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("price", "value the instrument with and without its break schedule"),
        ("par", "solve par strike or par rate with and without breaks"),
        ("sweep", "run the report named in the config's run block"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("config", type=Path)
    p = sub.add_parser("preset", parents=[common], help="run or print a named scenario")
    p.add_argument("name", help=f"one of: {', '.join(presets())}")
    p.add_argument("--emit-config", action="store_true", help="print the scenario as YAML and exit")
    return parser


def _emit(cfg: ScenarioConfig, table: Table, out: Path) -> None:
    path = table.write(out)
    print(f"wrote {path}")
    if cfg.run.report == "sweep" and cfg.run.plot:
        from .plotting import plot_sweep

        print(f"wrote {plot_sweep(cfg, table, out)}")


def run(args: argparse.Namespace) -> int:
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1", "<command line>")
    if args.command == "preset":
        cfg = get_preset(args.name)
        if args.emit_config:
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
        _emit(cfg, run_report(cfg, args.threads, args.seed), args.out)
        return EXIT_OK
    cfg = load_config(args.config)
    if args.command == "price":
        table = price_table(cfg, args.seed)
        sys.stdout.write(table.to_csv())
    elif args.command == "par":
        table = par_table(cfg)
        sys.stdout.write(table.to_csv())
    else:
        table = run_report(cfg, args.threads, args.seed)
    _emit(cfg, table, args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, UnknownPreset) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RunError, NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
