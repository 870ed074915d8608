"""Main entry point for the quantum market game simulator.

Usage:
    python main.py simulate  --config configs/reference.conf --out runs/reference
    python main.py spectrum  runs/reference/trajectory.csv --column r --transform integrate
    python main.py spectrum  runs/reference/trajectory.csv --column K --transform kinetic
    python main.py density   runs/eps0/trajectory.csv --column K
    python main.py staircase runs/reference/trajectory.csv
    python main.py stats     runs/reference/trajectory.csv --column r
    python main.py compare   runs/reference/trajectory.csv --column K --market vix.csv

Every configuration key is also a flag (``--sigma 0.02``, ``--hbar-s 1``);
flags override the ``--config`` file, which overrides the defaults.
Exit codes: 0 success, 1 usage, 2 input/config error, 3 numerical failure.
"""

import argparse
import json
import logging
import sys

import commands
from config import CONFIG_KEYS, DEFAULT_DATE_COLUMN, DEFAULT_VALUE_COLUMN, build_run_config, load_config_file
from exceptions import GameError, UsageError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class ArgumentParser(argparse.ArgumentParser):
    """Routes usage errors to exit code 1 instead of argparse's 2."""

    def error(self, message):
        raise UsageError(message)


def setup_logging(verbose: bool = False, log_file: str = None) -> None:
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT, handlers=handlers)


def _common_flags() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' config file")
    common.add_argument("--log-file", help="also write the log to this file")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    keys = common.add_argument_group("configuration keys")
    for key, spec in CONFIG_KEYS.items():
        keys.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None, metavar="VALUE", help=spec.help)
    return common


def build_parser() -> ArgumentParser:
    common = _common_flags()
    parser = ArgumentParser(prog="main.py", description="Quantum market game simulator and multifractal toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="simulate a trajectory")

    p = sub.add_parser("spectrum", parents=[common], help="large-deviation spectrum of a column")
    p.add_argument("input")
    p.add_argument("--column", required=True)
    p.add_argument("--transform", choices=commands.SIGNAL_TRANSFORMS, default="integrate")

    p = sub.add_parser("density", parents=[common], help="log histogram and power-law fit")
    p.add_argument("input")
    p.add_argument("--column", default="K")

    p = sub.add_parser("staircase", parents=[common], help="cumulative intrinsic time")
    p.add_argument("input")

    p = sub.add_parser("stats", parents=[common], help="moments and volatility clustering")
    p.add_argument("input")
    p.add_argument("--column", default="r")

    p = sub.add_parser("compare", parents=[common], help="simulated vs market spectrum")
    p.add_argument("input", help="simulated trajectory CSV")
    p.add_argument("--column", default="K")
    p.add_argument("--sim-transform", choices=commands.SIGNAL_TRANSFORMS, default="levels")
    p.add_argument("--market", required=True, help="market CSV (date and value columns)")
    p.add_argument("--date-column", default=DEFAULT_DATE_COLUMN)
    p.add_argument("--value-column", default=DEFAULT_VALUE_COLUMN)
    p.add_argument("--market-transform", choices=("levels", "log_returns"), default="levels")
    p.add_argument("--date-format", help="strptime format, e.g. %%d-%%m-%%Y")
    return parser


def run_command(args, cfg):
    if args.command == "simulate":
        return commands.cmd_simulate(cfg)
    if args.command == "spectrum":
        return commands.cmd_spectrum(cfg, args.input, args.column, args.transform)
    if args.command == "density":
        return commands.cmd_density(cfg, args.input, args.column)
    if args.command == "staircase":
        return commands.cmd_staircase(cfg, args.input)
    if args.command == "stats":
        return commands.cmd_stats(cfg, args.input, args.column)
    return commands.cmd_compare(
        cfg,
        args.input,
        args.column,
        args.market,
        date_column=args.date_column,
        value_column=args.value_column,
        market_transform=args.market_transform,
        sim_transform=args.sim_transform,
        date_format=args.date_format,
    )


def _fail(code: int, message) -> int:
    print(f"error[{code}]: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(UsageError.exit_code, e)
    except SystemExit as e:  # --help
        return e.code or 0

    setup_logging(args.verbose, args.log_file)
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = build_run_config(file_values, {key: getattr(args, key) for key in CONFIG_KEYS})
        summary = run_command(args, cfg)
    except GameError as e:
        logger.error(f"{args.command} failed: {e}")
        return _fail(e.exit_code, e)
    except Exception as e:
        logger.error(f"{args.command} failed unexpectedly: {e}", exc_info=True)
        return _fail(3, e)

    print(f"{args.command} 完成！统计: {json.dumps(summary, ensure_ascii=False, sort_keys=True)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
