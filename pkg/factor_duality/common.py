import argparse
import csv
import os
import re
import sys
from collections.abc import Iterable, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .errors import BigRunRequiredError, InvalidCheckpointsError
from .partial_sums import check_checkpoints, default_checkpoints
from .sieve import DEFAULT_SEGMENT_SIZE, SIEVE_CEILING, Sweep

THREADS_ENV = "FACTOR_DUALITY_THREADS"
# experiments above this need --big
BIG_LIMIT = 10**7

_INTEGER = re.compile(r"^\s*(\d+(?:_\d+)*)(?:[eE]\+?(\d+))?\s*$")


def parse_int(value: str) -> int:
    """A nonnegative integer, also written as `1e7` or `10_000`."""
    match = _INTEGER.match(value)
    if match is None:
        raise argparse.ArgumentTypeError(f"'{value}' is not a nonnegative integer.")
    mantissa, exponent = match.groups()
    return int(mantissa.replace("_", "")) * 10 ** int(exponent or 0)


def parse_positive_int(value: str) -> int:
    number = parse_int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"'{value}' has to be at least 1.")
    return number


def parse_int_list(value: str) -> list[int]:
    return [parse_int(part) for part in value.split(",") if part.strip()]


def parse_checkpoints(grid: str, x_max: int) -> list[int]:
    """`geom`, `geom:N` (N points per decade) or a comma separated list."""
    if grid == "geom":
        return default_checkpoints(x_max)
    if grid.startswith("geom:"):
        try:
            per_decade = parse_positive_int(grid[len("geom:") :])
        except argparse.ArgumentTypeError as e:
            raise InvalidCheckpointsError(grid, str(e)) from None
        return default_checkpoints(x_max, per_decade=per_decade)
    try:
        checkpoints = parse_int_list(grid)
    except argparse.ArgumentTypeError as e:
        raise InvalidCheckpointsError(grid, str(e)) from None
    return check_checkpoints(checkpoints, x_max)


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        return parse_positive_int(value)
    except argparse.ArgumentTypeError:
        print(
            f"Ignoring {THREADS_ENV}={value}, it is not a positive integer.",
            file=sys.stderr,
        )
        return 1


def add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--threads",
        "-t",
        type=parse_positive_int,
        default=default_threads(),
        help="Number of worker processes for the segment sweep "
        f"(default: ${THREADS_ENV} or 1).",
    )
    parser.add_argument(
        "--segment-size",
        type=parse_positive_int,
        default=DEFAULT_SEGMENT_SIZE,
        help="Number of integers sieved per segment.",
    )
    parser.add_argument(
        "--ceiling",
        type=parse_positive_int,
        default=SIEVE_CEILING,
        help="Largest x any sweep may reach.",
    )
    parser.add_argument(
        "--output",
        "-o",
        default="-",
        help="Output file, if not specified, output is written to STDOUT.",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        default=False,
        action="store_true",
        help="Report progress on STDERR.",
    )
    parser.add_argument(
        "--big",
        default=False,
        action="store_true",
        help=f"Allow experiments with x above {BIG_LIMIT:.0e}.",
    )


@dataclass
class ExperimentConfig:
    """Everything that determines an experiment's output, echoed into the CSV."""

    subcommand: str
    x_max: int | None = None
    checkpoints: list[int] | None = None
    k: int | None = None
    j: int | None = None
    modulus: int | None = None
    segment_size: int = DEFAULT_SEGMENT_SIZE
    threads: int = 1
    ceiling: int = SIEVE_CEILING
    output: str = "-"
    seed: int | None = None
    big: bool = False
    verbose: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, **extra: Any) -> "ExperimentConfig":
        return cls(
            subcommand=args.command,
            x_max=getattr(args, "x_max", None),
            k=getattr(args, "k", None),
            j=getattr(args, "j", None),
            modulus=getattr(args, "modulus", None),
            segment_size=args.segment_size,
            threads=args.threads,
            ceiling=args.ceiling,
            output=args.output,
            seed=getattr(args, "seed", None),
            big=args.big,
            verbose=args.verbose,
            extra=extra,
        )

    @property
    def sweep(self) -> Sweep:
        return Sweep(
            segment_size=self.segment_size,
            threads=self.threads,
            ceiling=self.ceiling,
        )

    def check_size(self, x: int) -> None:
        if x > BIG_LIMIT and not self.big:
            raise BigRunRequiredError(x, BIG_LIMIT)

    def header(self) -> list[tuple[str, Any]]:
        entries: list[tuple[str, Any]] = [
            ("version", __version__),
            ("subcommand", self.subcommand),
        ]
        for name in ("x_max", "k", "j", "modulus", "seed"):
            value = getattr(self, name)
            if value is not None:
                entries.append((name, value))
        if self.checkpoints is not None:
            entries.append(("checkpoints", ",".join(map(str, self.checkpoints))))
        entries.extend(self.extra.items())
        entries.append(("segment_size", self.segment_size))
        entries.append(("threads", self.threads))
        return entries

    def progress(self, message: str) -> None:
        if self.verbose:
            print(message, file=sys.stderr)


@contextmanager
def smart_open(filename=None, *args, **kwargs):
    fh = open(filename, *args, **kwargs) if filename and filename != "-" else sys.stdout

    try:
        yield fh
    finally:
        if fh is not sys.stdout:
            fh.close()


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(
    filename: str,
    header: Sequence[tuple[str, Any]],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    """`# key=value` lines, one header row, then the data rows."""
    with smart_open(filename, "wt", newline="") as fh:
        for key, value in header:
            fh.write(f"# {key}={format_value(value)}\n")
        writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        writer.writerows([format_value(v) for v in row] for row in rows)


def report_mismatches(mismatches: Sequence[Any], limit: int = 10) -> None:
    """Print the first `limit` counterexamples to STDERR."""
    if not mismatches:
        return
    print(f"{len(mismatches)} mismatches, the first ones:", file=sys.stderr)
    for mismatch in mismatches[:limit]:
        print(f"  {mismatch}", file=sys.stderr)
