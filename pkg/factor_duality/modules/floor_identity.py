import time

from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_int_list,
    parse_positive_int,
    report_mismatches,
    write_csv,
)
from ..partial_sums import FLOOR_IDENTITY_LIMIT, floor_identity_check


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "floor-identity",
        help="Compare sum mu(n) omega(n)^k floor(x/n) with its closed form in "
        "terms of the counts of n <= x with exactly j prime factors.",
    )
    parser.add_argument(
        "--x",
        "-x",
        type=parse_int_list,
        default=[10**2, 10**3, 10**4, 10**5],
        help=f"Comma separated values of x <= {FLOOR_IDENTITY_LIMIT:.0e}.",
    )
    parser.add_argument(
        "--k-max",
        "-k",
        type=parse_positive_int,
        default=5,
        help="Check every power 1 <= k <= k_max.",
    )
    add_common_arguments(parser)


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(
        args,
        x=",".join(map(str, args.x)),
        k_max=args.k_max,
    )
    rows = []
    for x in args.x:
        for k in range(1, args.k_max + 1):
            lhs, rhs = floor_identity_check(x, k, sweep=config.sweep)
            rows.append([x, k, lhs, rhs, lhs == rhs])
        config.progress(f"floor-identity: x = {x} done")

    header = [*config.header(), ("wall_time", time.perf_counter() - start)]
    write_csv(args.output, header, ["x", "k", "lhs", "rhs", "equal"], rows)
    report_mismatches(
        [f"x = {x}, k = {k}: {a} != {b}" for x, k, a, b, equal in rows if not equal],
    )
    return 0 if all(row[-1] for row in rows) else 1
