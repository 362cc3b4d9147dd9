"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import sys

from ..errors import ColumnNotFound, ConfigError, EvbcError, NumericalError
from .config import load_config
from .experiments import COMMANDS
from .svg import EmptyPlot, emit_svg
from .table import CsvTable

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evbc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        p.add_argument("--config", required=True, help="key = value configuration file")
        p.add_argument("--out", help="CSV destination (default: config 'output', else stdout)")
    p = sub.add_parser("plot", help="Render CSV columns as an SVG line plot.")
    p.add_argument("--table", required=True, help="CSV produced by another subcommand")
    p.add_argument("--x", required=True, help="x column")
    p.add_argument("--y", required=True, action="append",
                   help="y column(s); repeat or comma-separate")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--title", default="")
    p.add_argument("--out", help="SVG destination (default: stdout)")
    return parser


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _plot(args) -> str:
    try:
        with open(args.table) as fh:
            table = CsvTable.from_csv(fh.read())
    except (OSError, ValueError) as exc:
        raise ConfigError("--table", str(exc)) from None
    y_cols = [c.strip() for arg in args.y for c in arg.split(",") if c.strip()]
    return emit_svg(table, args.x, y_cols, log_y=args.log_y, title=args.title)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            _write(_plot(args), args.out)
        else:
            cfg = load_config(args.config)
            table = COMMANDS[args.command](cfg)
            _write(table.to_csv(), args.out or cfg.output)
    except (ConfigError, ColumnNotFound, EmptyPlot) as exc:
        print(f"evbc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"evbc: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EvbcError as exc:
        print(f"evbc: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
