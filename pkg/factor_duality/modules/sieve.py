import time
from dataclasses import dataclass
from functools import reduce

import numpy as np

from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_positive_int,
    write_csv,
)
from ..sieve import ArithTable, build_table


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "sieve",
        help="Summary statistics of the arithmetic table over 1..x, "
        "or one row per integer with --dump.",
    )
    parser.add_argument(
        "--x-max",
        "-x",
        type=parse_positive_int,
        required=True,
        help="Top of the range 1..x.",
    )
    parser.add_argument(
        "--dump",
        default=False,
        action="store_true",
        help="Write mu, omega, the smallest and the largest prime factor and "
        "the factorization of every n instead of the summary.",
    )
    add_common_arguments(parser)


@dataclass
class TableStats:
    numbers: int = 0
    primes: int = 0
    squarefree: int = 0
    mertens: int = 0
    max_omega: int = 0

    def __add__(self, other: "TableStats") -> "TableStats":
        return TableStats(
            numbers=self.numbers + other.numbers,
            primes=self.primes + other.primes,
            squarefree=self.squarefree + other.squarefree,
            mertens=self.mertens + other.mertens,
            max_omega=max(self.max_omega, other.max_omega),
        )


def table_stats(table: ArithTable) -> TableStats:
    return TableStats(
        numbers=len(table),
        primes=int(np.count_nonzero((table.omega == 1) & (table.spf == table.numbers))),
        squarefree=int(np.count_nonzero(table.mu)),
        mertens=int(table.mu.sum(dtype=np.int64)),
        max_omega=int(table.omega.max()),
    )


def format_factors(factors: list[tuple[int, int]]) -> str:
    return "*".join(
        f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(factors)
    )


def execute(args) -> int:
    config = ExperimentConfig.from_args(args, dump=args.dump)
    config.check_size(args.x_max)
    start = time.perf_counter()

    if args.dump:
        config.sweep.check(args.x_max)
        table = build_table(1, args.x_max + 1, segment_size=config.segment_size)
        columns = ["n", "mu", "omega", "spf", "largest_prime", "factors"]
        largest = table.kth_largest_array(1)
        rows = [
            [
                n,
                table.mu_of(n),
                table.omega_of(n),
                table.spf_of(n),
                int(largest[i]),
                format_factors(table.factors(n)),
            ]
            for i, n in enumerate(range(1, args.x_max + 1))
        ]
    else:
        stats = reduce(
            TableStats.__add__,
            config.sweep.run(table_stats, args.x_max),
            TableStats(),
        )
        columns = ["statistic", "value"]
        rows = [[name, value] for name, value in vars(stats).items()]

    header = [*config.header(), ("wall_time", time.perf_counter() - start)]
    write_csv(args.output, header, columns, rows)
    return 0
