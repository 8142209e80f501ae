"""
Command-line front end: argument parsing, settings overrides and dispatch.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from config import EXIT_INPUT_ERROR, GREEN, RESET, YELLOW
from core.errors import UncertaintyError
from core.settings_store import settings
from cli.executor import executor
from cli.run_config import FORMATS, RunConfig


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; argparse's own 2 would read as a violated inequality."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{YELLOW}[CLI] {message}{RESET}", file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)


def _fock_oracle(value: str) -> int:
    key, _, number = value.partition("=")
    if key != "dim" or not number.isdigit():
        raise argparse.ArgumentTypeError(f"expected dim=<int>, got '{value}'")
    return int(number)


def _grid(value: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated counts, got '{value}'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="Write the report here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--hbar", type=float, default=None)
    common.add_argument("--tol", type=float, default=None, help="Slack on inequality margins")
    common.add_argument("--verbose", action="store_true")

    parser = _Parser(prog="uncertainty-lab", description="Covariance-free uncertainty relations toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", parents=[common], help="Evaluate every applicable inequality")
    verify.add_argument("--state", type=Path, required=True)
    verify.add_argument("--tuple", type=Path, default=None)
    verify.add_argument("--fock-oracle", type=_fock_oracle, default=None, metavar="dim=N")

    counter = sub.add_parser("counterexample", parents=[common],
                             help="Reproduce the violation of the naive triple product bound")
    counter.add_argument("--fock-oracle", type=_fock_oracle, default=None, metavar="dim=N")

    for name, help_text in (("scan", "Sweep a parameter grid"), ("optimize", "Minimize margin or ratio")):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("--problem", type=Path, required=True)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--fock-oracle", type=_fock_oracle, default=None, metavar="dim=N")
        if name == "scan":
            cmd.add_argument("--grid", type=_grid, default=None, help="Counts per parameter, e.g. 10,5")

    sub.add_parser("catalog", parents=[common], help="List the inequality ids")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        state=getattr(args, "state", None),
        tuple=getattr(args, "tuple", None),
        problem=getattr(args, "problem", None),
        out=args.out,
        format=args.format,
        hbar=args.hbar,
        tol=args.tol,
        seed=getattr(args, "seed", None),
        fock_dim=getattr(args, "fock_oracle", None),
        grid=getattr(args, "grid", None),
        verbose=args.verbose,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except UncertaintyError as e:
        print(f"{YELLOW}[CLI] {e}{RESET}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    overridden = config.verbose or config.tol is not None
    if config.verbose:
        settings.override("output.verbose", True)
    if config.tol is not None:
        settings.override("tolerances.ineq", config.tol)
    try:
        result = executor.execute(config)
    finally:
        if overridden:
            settings.reset_to_defaults()

    color = GREEN if result["success"] else YELLOW
    print(f"{color}[CLI] {result['message']}{RESET}", file=sys.stderr)
    return result["exit_code"]
