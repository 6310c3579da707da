import time
from collections import Counter

import yaml

from ..common import (
    ExperimentConfig,
    add_common_arguments,
    parse_int,
    parse_positive_int,
    report_mismatches,
    write_csv,
)
from ..duality import (
    Mismatch,
    alternating_stirling_sum,
    cross_validate_deltas,
    delta_table,
    divisor_power_sum,
    inversion_roundtrip,
    omega_power_decomposition,
    standard_weights,
    stirling_identity_holds,
    verify_range,
)
from ..sieve import build_table

IDENTITIES = ["duality", "divisor-identity", "stirling", "inversion"]
# m = 0..POWER_POINTS - 1 for the omega power decomposition
POWER_POINTS = 12


def add_subcommand(subparsers):
    parser = subparsers.add_parser(
        "verify",
        help="Check exact identities over a range and list every mismatch.",
    )
    parser.add_argument(
        "identity",
        choices=IDENTITIES,
        help="duality: both duality identities in both orientations for a "
        "family of prime weights; divisor-identity: the Möbius-weighted "
        "omega power sums over squarefree divisors; stirling: the Stirling "
        "number identities; inversion: Möbius inversion of the k-th largest "
        "prime factor weights.",
    )
    parser.add_argument(
        "--n-max",
        "-n",
        type=parse_positive_int,
        default=20000,
        help="Check every n <= n_max.",
    )
    parser.add_argument(
        "--k-max",
        "-k",
        type=parse_positive_int,
        default=5,
        help="Check every order 1 <= k <= k_max (2 <= k for stirling).",
    )
    parser.add_argument(
        "--seed",
        type=parse_int,
        default=0,
        help="Seed of the random rational weight table.",
    )
    parser.add_argument(
        "--statistics",
        "-s",
        metavar="FILE",
        default=None,
        help="Write statistics to this file.",
    )
    add_common_arguments(parser)


def check_duality(args, config: ExperimentConfig) -> tuple[int, list[Mismatch]]:
    weights = standard_weights(args.n_max, args.seed)
    config.extra["weights"] = ",".join(map(str, weights))
    return verify_range(args.n_max, args.k_max, weights, sweep=config.sweep)


def check_divisor_identity(
    args,
    config: ExperimentConfig,
) -> tuple[int, list[Mismatch]]:
    config.sweep.check(args.n_max)
    table = build_table(1, args.n_max + 1, segment_size=config.segment_size)
    checks = 0
    mismatches = []
    for k in range(1, args.k_max + 1):
        deltas = delta_table(k)
        for n in range(1, args.n_max + 1):
            lhs = divisor_power_sum(n, k, table)
            rhs = deltas[table.omega_of(n)]
            checks += 1
            if lhs != rhs:
                mismatches.append(Mismatch("divisor-identity", n, k, "", "", lhs, rhs))
        for j, expected, computed in cross_validate_deltas(k, table):
            mismatches.append(
                Mismatch("delta-witness", j, k, "", "", computed, expected),
            )
        config.progress(f"divisor-identity: k = {k} done")
    return checks, mismatches


def check_stirling(args, config: ExperimentConfig) -> tuple[int, list[Mismatch]]:
    checks = 0
    mismatches = []
    for k in range(2, args.k_max + 1):
        total = alternating_stirling_sum(k)
        checks += 2
        if total != 0:
            mismatches.append(Mismatch("alternating-sum", 0, k, "", "", total, 0))
        if not stirling_identity_holds(k):
            mismatches.append(Mismatch("power-expansion", 0, k, "", "", 0, 1))
    for k in range(0, args.k_max + 1):
        for m in range(POWER_POINTS):
            value = omega_power_decomposition(k, m)
            checks += 1
            if value != m**k:
                mismatches.append(
                    Mismatch("omega-power", m, k, "", "", value, m**k),
                )
    return checks, mismatches


def check_inversion(args, config: ExperimentConfig) -> tuple[int, list[Mismatch]]:
    config.sweep.check(args.n_max)
    table = build_table(1, args.n_max + 1, segment_size=config.segment_size)
    weights = standard_weights(args.n_max, args.seed)
    config.extra["weights"] = ",".join(map(str, weights))
    checks = 0
    mismatches = []
    for f in weights:
        for k in range(1, args.k_max + 1):
            checks += args.n_max
            mismatches.extend(
                Mismatch("inversion", n, k, str(f), "", "", "")
                for n in inversion_roundtrip(args.n_max, k, f, table)
            )
        config.progress(f"inversion: weight {f} done")
    return checks, mismatches


CHECKS = {
    "duality": check_duality,
    "divisor-identity": check_divisor_identity,
    "stirling": check_stirling,
    "inversion": check_inversion,
}


def write_statistics(
    filename: str,
    args,
    checks: int,
    mismatches: list[Mismatch],
) -> None:
    per_identity = Counter(m.identity for m in mismatches)
    statistics = {
        "identity": args.identity,
        "n_max": args.n_max,
        "k_max": args.k_max,
        "seed": args.seed,
        "checks": checks,
        "mismatches": len(mismatches),
        "mismatches_per_identity": dict(per_identity),
    }
    with open(filename, "w") as out:
        yaml.dump(statistics, out, sort_keys=False)


def execute(args) -> int:
    start = time.perf_counter()
    config = ExperimentConfig.from_args(
        args,
        identity=args.identity,
        n_max=args.n_max,
        k_max=args.k_max,
    )
    if args.identity != "stirling":
        config.check_size(args.n_max)
    checks, mismatches = CHECKS[args.identity](args, config)

    header = [
        *config.header(),
        ("checks", checks),
        ("mismatches", len(mismatches)),
        ("wall_time", time.perf_counter() - start),
    ]
    write_csv(
        args.output,
        header,
        ["identity", "n", "k", "weight", "side", "lhs", "rhs"],
        (
            [m.identity, m.n, m.k, m.weight, m.side, m.lhs, m.rhs]
            for m in mismatches
        ),
    )
    if args.statistics is not None:
        write_statistics(args.statistics, args, checks, mismatches)
    report_mismatches(mismatches)
    return 1 if mismatches else 0
