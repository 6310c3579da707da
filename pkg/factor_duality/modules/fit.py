import time
from argparse import ArgumentTypeError

from ..asymptotics import MODEL_PRESETS, fit_leading_term, parse_model
from ..common import ExperimentConfig, add_common_arguments, parse_int, write_csv
from ..errors import InvalidCheckpointsError
from .sum import add_sum_arguments, series_from_args


def parse_window(value: str) -> tuple[int, int]:
    """`lo:hi`, both ends included."""
    lo, sep, hi = value.partition(":")
    if not sep:
        raise InvalidCheckpointsError(value, "the window has to be given as lo:hi.")
    try:
        return parse_int(lo), parse_int(hi)
    except ArgumentTypeError as e:
        raise InvalidCheckpointsError(value, str(e)) from None


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "fit",
        help="Least-squares fit of a leading-term model to a partial sum series.",
    )
    add_sum_arguments(parser)
    parser.add_argument(
        "--model",
        "-m",
        default="inverse-log",
        help=f"A preset ({', '.join(MODEL_PRESETS)}) or terms 'd:e,...' for "
        "(log log x)^d / (log x)^e, prefixed by 'x*' to multiply by x.",
    )
    parser.add_argument(
        "--window",
        "-w",
        default=None,
        help="Only fit checkpoints in lo:hi.",
    )
    add_common_arguments(parser)


def execute(args) -> int:
    start = time.perf_counter()
    model = parse_model(args.model)
    window = parse_window(args.window) if args.window else None
    config = ExperimentConfig.from_args(args, model=model.descriptor)
    series = series_from_args(args, config)
    report = fit_leading_term(series, model, window)

    fitted = report.predict(report.checkpoints).tolist()
    values = dict(zip(series.checkpoints, series.values, strict=True))
    rows = [
        [x, float(values[x]), fit, residual]
        for x, fit, residual in zip(
            report.checkpoints,
            fitted,
            report.residuals,
            strict=True,
        )
    ]
    header = [
        *config.header(),
        *(
            (f"coefficient[{d}:{e}]", c)
            for (d, e), c in zip(model.terms, report.coefficients, strict=True)
        ),
        ("residual_norm", report.residual_norm),
        ("wall_time", time.perf_counter() - start),
    ]
    write_csv(args.output, header, ["x", "value", "fitted", "residual"], rows)
    return 0
