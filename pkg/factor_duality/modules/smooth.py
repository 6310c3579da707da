import time
from itertools import product

from ..asymptotics import COARSEST_STEP, li_series, smooth_vs_rho
from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_int_list,
    parse_positive_int,
    write_csv,
)
from ..counting import omega_histogram, prime_pi, psi_k, psi_smooth, repeat_count
from .rho import parse_step

FUNCTIONS = ["psi", "psi-k", "pi-k", "repeat", "prime-pi", "psi-rho"]


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "smooth",
        help="Smooth number counts and counts by number of prime factors.",
    )
    parser.add_argument(
        "function",
        choices=FUNCTIONS,
        help="psi: y-smooth n <= x; psi-k: n <= x with P_k(n) <= T; "
        "pi-k: n <= x with exactly k distinct prime factors; repeat: n <= x "
        "where one of the k-1 largest prime factors is repeated; prime-pi: "
        "primes <= x against the li series; psi-rho: psi against x rho(alpha).",
    )
    parser.add_argument(
        "--x",
        "-x",
        type=parse_int_list,
        required=True,
        help="Comma separated values of x.",
    )
    parser.add_argument(
        "--bound",
        "-y",
        type=parse_int_list,
        default=[10],
        help="Comma separated smoothness bounds y (or T for psi-k).",
    )
    parser.add_argument(
        "--k",
        "-k",
        type=parse_int_list,
        default=[1],
        help="Comma separated orders k.",
    )
    parser.add_argument(
        "--nu",
        type=parse_positive_int,
        default=4,
        help="Number of terms of the li series (prime-pi).",
    )
    parser.add_argument(
        "--step",
        type=parse_step,
        default=COARSEST_STEP,
        help="Grid step of the Dickman function (psi-rho), such as 1/64.",
    )
    add_common_arguments(parser)


def count_rows(args, config: ExperimentConfig):
    sweep = config.sweep
    function = args.function
    for x in args.x:
        if function == "psi":
            for y in args.bound:
                yield [function, x, y, 1, psi_smooth(x, y, sweep).count]
        elif function == "psi-k":
            for bound, k in product(args.bound, args.k):
                yield [function, x, bound, k, psi_k(x, bound, k, sweep).count]
        elif function == "pi-k":
            histogram = omega_histogram(x, sweep)
            for k in args.k:
                count = histogram[k] if k < len(histogram) else 0
                yield [function, x, None, k, count]
        elif function == "repeat":
            for k in args.k:
                yield [function, x, None, k, repeat_count(x, k, sweep)]
        elif function == "prime-pi":
            count = prime_pi(x, sweep)
            prediction = li_series(x, args.nu)
            yield [function, x, None, args.nu, count, prediction, count / prediction]
        else:
            for y in args.bound:
                count, prediction, ratio = smooth_vs_rho(x, y, args.step, sweep)
                yield [function, x, y, 1, count, prediction, ratio]
        config.progress(f"{function}: x = {x} done")


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(
        args,
        function=args.function,
        x=",".join(map(str, args.x)),
        bound=",".join(map(str, args.bound)),
    )
    config.k = None
    config.extra["k"] = ",".join(map(str, args.k))
    for x in args.x:
        config.check_size(x)
    columns = ["function", "x", "bound", "k", "count", "prediction", "ratio"]
    rows = [
        row + [None] * (len(columns) - len(row)) for row in count_rows(args, config)
    ]

    header = [*config.header(), ("wall_time", time.perf_counter() - start)]
    write_csv(args.output, header, columns, rows)
    return 0
