import time

from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_int_list,
    parse_positive_int,
    write_csv,
)
from ..counting import equidist


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "equidist",
        help="Count 2 <= n <= x by the residue class of their k-th largest "
        "prime factor.",
    )
    parser.add_argument(
        "--x",
        "-x",
        type=parse_int_list,
        default=[10**5, 10**6],
        help="Comma separated values of x.",
    )
    parser.add_argument(
        "--modulus",
        "-l",
        type=parse_positive_int,
        required=True,
        help="Modulus l >= 2.",
    )
    parser.add_argument(
        "--k",
        "-k",
        type=parse_positive_int,
        default=1,
        help="Order of the prime factor, 1 is the largest.",
    )
    add_common_arguments(parser)


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(args, x=",".join(map(str, args.x)))
    for x in args.x:
        config.check_size(x)
    rows = []
    for x in args.x:
        report = equidist(x, args.modulus, args.k, sweep=config.sweep)
        deviations = report.deviations
        for j, count in report.counts.items():
            coprime = j in deviations
            rows.append(
                [
                    x,
                    j,
                    coprime,
                    count,
                    deviations[j] if coprime else None,
                    count * report.phi / x - 1 if coprime else None,
                    report.envelope,
                ],
            )
        rows.append([x, "unit", False, report.unit, None, None, report.envelope])
        config.progress(
            f"equidist: x = {x} done, relative deviation "
            f"{report.relative_deviation:.3g}",
        )

    header = [*config.header(), ("wall_time", time.perf_counter() - start)]
    write_csv(
        args.output,
        header,
        ["x", "class", "coprime", "count", "deviation", "relative", "envelope"],
        rows,
    )
    return 0
