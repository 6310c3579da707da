import argparse
import time
from fractions import Fraction

from ..asymptotics import (
    ALPHA_MAX,
    COARSEST_STEP,
    QUADRATURE_ORDER,
    build_rho_table,
    rho_step_halving_error,
)
from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_positive_int,
    write_csv,
)


def parse_step(value: str) -> float:
    """A step such as 0.015625 or 1/64."""
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"'{value}' is not a number.") from None


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "rho",
        help="Tabulate the Dickman function on a grid.",
    )
    parser.add_argument(
        "--alpha-max",
        type=float,
        default=10.0,
        help=f"Tabulate rho on [0, alpha_max], alpha_max <= {ALPHA_MAX:g}.",
    )
    parser.add_argument(
        "--step",
        type=parse_step,
        default=COARSEST_STEP,
        help=f"Grid step 1/N, at most {COARSEST_STEP}.",
    )
    parser.add_argument(
        "--order",
        type=parse_positive_int,
        default=QUADRATURE_ORDER,
        help="Number of Gauss-Legendre nodes per grid cell.",
    )
    add_common_arguments(parser)


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(
        args,
        alpha_max=args.alpha_max,
        step=args.step,
        order=args.order,
    )
    table = build_rho_table(args.alpha_max, args.step, args.order)
    halving_error = rho_step_halving_error(args.alpha_max, args.step)
    rows = [
        [float(alpha), float(value)]
        for alpha, value in zip(table.alphas, table.values, strict=True)
        if alpha <= args.alpha_max
    ]
    header = [
        *config.header(),
        ("step_halving_error", halving_error),
        ("wall_time", time.perf_counter() - start),
    ]
    write_csv(args.output, header, ["alpha", "rho"], rows)
    return 0
