import time

from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_checkpoints,
    parse_int,
    parse_positive_int,
    write_csv,
)
from ..partial_sums import (
    EXACT_LIMIT,
    RESTRICTED,
    PartialSumSeries,
    Selector,
    SumKind,
    compute_series,
)


def add_sum_arguments(parser):
    parser.add_argument(
        "--kind",
        type=Selector.from_string,
        required=True,
        metavar="KIND",
        help=f"One of: {', '.join(s.value for s in Selector)}.",
    )
    parser.add_argument(
        "--k",
        "-k",
        type=parse_int,
        default=1,
        help="Power of omega(n) (omega(n)^(k-1) for restricted sums, "
        "the power of log n for log_power_harmonic).",
    )
    parser.add_argument(
        "--j",
        "-j",
        type=parse_positive_int,
        default=1,
        help="Residue class of the smallest prime factor (restricted sums).",
    )
    parser.add_argument(
        "--modulus",
        "-l",
        type=parse_positive_int,
        default=3,
        help="Modulus of the residue class (restricted sums).",
    )
    parser.add_argument(
        "--x-max",
        "-x",
        type=parse_positive_int,
        required=True,
        help="Sum over n <= x_max.",
    )
    parser.add_argument(
        "--checkpoints",
        "-c",
        default="geom",
        help="'geom' (four points per decade from 100 up to x_max), 'geom:N' "
        "for N points per decade or a comma separated list such as 10,1e3.",
    )


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "sum",
        help="Checkpointed Mertens-type partial sums.",
    )
    add_sum_arguments(parser)
    parser.add_argument(
        "--exact",
        default=False,
        action="store_true",
        help=f"Exact rational arithmetic (x_max <= {EXACT_LIMIT}).",
    )
    add_common_arguments(parser)


def kind_from_args(args) -> SumKind:
    if args.kind in RESTRICTED:
        return SumKind(args.kind, k=args.k, j=args.j, modulus=args.modulus)
    return SumKind(args.kind, k=args.k)


def series_from_args(args, config: ExperimentConfig, exact: bool = False):
    config.check_size(args.x_max)
    kind = kind_from_args(args)
    if not kind.restricted:
        config.j = config.modulus = None
    checkpoints = parse_checkpoints(args.checkpoints, args.x_max)
    config.checkpoints = checkpoints
    config.extra["kind"] = str(kind)
    return compute_series(
        kind,
        args.x_max,
        checkpoints,
        sweep=config.sweep,
        exact=exact,
        verbose=config.verbose,
    )


def series_header(config: ExperimentConfig, series: PartialSumSeries, start: float):
    return [
        *config.header(),
        ("wall_times", ",".join(f"{t:.3f}" for t in series.wall_times)),
        ("wall_time", time.perf_counter() - start),
    ]


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(args, exact=args.exact)
    series = series_from_args(args, config, exact=args.exact)
    rows = [
        [x, value if isinstance(value, int) else float(value), bound]
        for x, value, bound in zip(
            series.checkpoints,
            series.values,
            series.error_bounds,
            strict=True,
        )
    ]
    write_csv(
        args.output,
        series_header(config, series, start),
        ["x", "value", "error_bound"],
        rows,
    )
    return 0
