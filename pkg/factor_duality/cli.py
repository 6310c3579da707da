import argparse
import sys
from collections.abc import Sequence

from . import __version__
from .errors import FactorDualityError
from .modules import equidist, fit, floor_identity, rho, sieve, smooth, verify
from .modules import sum as sum_

SUBCOMMANDS = {
    "sieve": sieve,
    "verify": verify,
    "sum": sum_,
    "floor-identity": floor_identity,
    "equidist": equidist,
    "smooth": smooth,
    "rho": rho,
    "fit": fit,
}


def construct_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factor-duality")

    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    subparsers = parser.add_subparsers(
        dest="command",
        description="valid subcommands",
        required=True,
    )
    for module in SUBCOMMANDS.values():
        module.add_subcommand(subparsers)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Exit status: 0 on success, 1 on an identity mismatch, 2 on a usage error."""
    parser = construct_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    try:
        return SUBCOMMANDS[args.command].execute(args)
    except FactorDualityError as e:
        print(e, file=sys.stderr)
        return 2


def main():
    sys.exit(run())
