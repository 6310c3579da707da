"""
Checkpointed partial sums of mu(n) against powers of omega(n), with optional
restriction of the smallest prime factor p_1(n) to a residue class.

Integer sums are accumulated exactly. Real sums are summed with `math.fsum`
piece by piece (a piece ends at a checkpoint or a segment boundary) and the
pieces are added in ascending order with Neumaier compensation, so the result
only depends on the checkpoints and the segment size, never on the number of
workers.
"""

import math
import sys
import time
from bisect import bisect_left
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import partial
from itertools import pairwise

import numpy as np

from .counting import omega_histogram
from .duality import binomial, check_order, check_residue, delta_table
from .errors import (
    CeilingExceededError,
    InvalidCheckpointsError,
    UnknownSumKindError,
    UnsupportedOrderError,
)
from .sieve import ArithTable, Sweep, build_table

# omega(n) <= 9 below 10^9, so omega^10 * floor(x/n) still fits into int64
MAX_POWER = 10
MAX_LOG_POWER = 6
EXACT_LIMIT = 10**4
FLOOR_IDENTITY_LIMIT = 10**7
INT64_LIMIT = 2**63 - 1
EPSILON = sys.float_info.epsilon

Value = int | float | Fraction


class Selector(Enum):
    mertens = "mertens"
    harmonic = "harmonic"
    M_omega_k = "M_omega_k"
    m_omega_k = "m_omega_k"
    restricted = "restricted"
    restricted_harmonic = "restricted_harmonic"
    floor_weighted = "floor_weighted"
    frac_weighted = "frac_weighted"
    restricted_floor = "restricted_floor"
    restricted_frac = "restricted_frac"
    binomial_restricted_harmonic = "binomial_restricted_harmonic"
    log_power_harmonic = "log_power_harmonic"

    @staticmethod
    def from_string(name: str) -> "Selector":
        try:
            return Selector(name)
        except ValueError:
            raise UnknownSumKindError(name, [s.value for s in Selector]) from None

    def __str__(self) -> str:
        return self.value


RESTRICTED = {
    Selector.restricted,
    Selector.restricted_harmonic,
    Selector.restricted_floor,
    Selector.restricted_frac,
    Selector.binomial_restricted_harmonic,
}
# weight 1/n
HARMONIC = {
    Selector.harmonic,
    Selector.m_omega_k,
    Selector.restricted_harmonic,
    Selector.binomial_restricted_harmonic,
}
# weight floor(x/n) or {x/n}, evaluated anew at every checkpoint
FLOOR = {Selector.floor_weighted, Selector.restricted_floor}
FRAC = {Selector.frac_weighted, Selector.restricted_frac}
# no omega factor at all
PLAIN = {Selector.mertens, Selector.harmonic, Selector.log_power_harmonic}


@dataclass(frozen=True)
class SumKind:
    """
    Which sum to compute.

    Unrestricted sums use omega(n)^k, restricted ones omega(n)^(k-1) (and the
    binomial sum C(omega(n) - 1, k - 1)), always with mu(n). For
    `log_power_harmonic`, k is the power of log n. Restricted sums run over
    n >= 2 with p_1(n) = j mod `modulus`; with `coprime=False` non-reduced
    classes and `modulus = 1` (every n >= 2) are accepted as well.
    """

    selector: Selector
    k: int = 1
    j: int = 0
    modulus: int = 0
    coprime: bool = True

    def __post_init__(self) -> None:
        if self.selector is Selector.log_power_harmonic:
            if not 0 <= self.k <= MAX_LOG_POWER:
                raise UnsupportedOrderError("j", self.k, 0, MAX_LOG_POWER)
        elif self.selector not in PLAIN:
            check_order(self.k, upper=MAX_POWER)
        if self.restricted:
            if self.coprime or self.modulus != 1:
                check_residue(self.j, self.modulus, coprime=self.coprime)

    @property
    def restricted(self) -> bool:
        return self.selector in RESTRICTED

    @property
    def power(self) -> int:
        """Exponent of omega(n) in the summand."""
        if self.selector in PLAIN:
            return 0
        return self.k - 1 if self.restricted else self.k

    @property
    def integral(self) -> bool:
        return self.selector in FLOOR or self.selector in {
            Selector.mertens,
            Selector.M_omega_k,
            Selector.restricted,
        }

    def __str__(self) -> str:
        params = []
        if self.selector not in PLAIN or self.selector is Selector.log_power_harmonic:
            params.append(f"k={self.k}")
        if self.restricted:
            params.append(f"j={self.j}")
            params.append(f"l={self.modulus}")
        return f"{self.selector}({','.join(params)})" if params else str(self.selector)


@dataclass
class PartialSumSeries:
    kind: SumKind
    checkpoints: list[int]
    values: list[Value]
    error_bounds: list[float] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.checkpoints)

    def value_at(self, x: int) -> Value:
        return self.values[self.checkpoints.index(x)]


class CompensatedSum:
    """Neumaier summation of already rounded pieces, tracking an error bound."""

    __slots__ = ("total", "compensation", "magnitude")

    def __init__(self) -> None:
        self.total = 0.0
        self.compensation = 0.0
        self.magnitude = 0.0

    def add(self, value: float, magnitude: float) -> None:
        total = self.total + value
        if abs(self.total) >= abs(value):
            self.compensation += (self.total - total) + value
        else:
            self.compensation += (value - total) + self.total
        self.total = total
        self.magnitude += magnitude + abs(value)

    @property
    def value(self) -> float:
        return self.total + self.compensation

    def error_bound(self, term_ulps: int = 1) -> float:
        return EPSILON * (term_ulps + 2) * self.magnitude


def default_checkpoints(x_max: int, per_decade: int = 4) -> list[int]:
    """round(10^(2 + i / per_decade)) up to x_max, always ending with x_max."""
    checkpoints = []
    i = 0
    while (c := round(10 ** (2 + i / per_decade))) < x_max:
        checkpoints.append(c)
        i += 1
    checkpoints.append(x_max)
    return checkpoints


def check_checkpoints(checkpoints: Sequence[int], x_max: int) -> list[int]:
    checkpoints = [int(c) for c in checkpoints]
    grid = ",".join(map(str, checkpoints))
    if not checkpoints:
        raise InvalidCheckpointsError(grid, "no checkpoints given.")
    if any(b <= a for a, b in pairwise(checkpoints)):
        raise InvalidCheckpointsError(grid, "checkpoints have to increase.")
    if checkpoints[0] < 1 or checkpoints[-1] > x_max:
        raise InvalidCheckpointsError(
            grid,
            f"checkpoints have to lie in [1, {x_max}].",
        )
    return checkpoints


def _coefficients(table: ArithTable, kind: SumKind) -> np.ndarray:
    """mu(n) times the omega factor of `kind`, 0 where n is excluded."""
    omega_max = int(table.omega.max())
    if kind.selector is Selector.binomial_restricted_harmonic:
        lookup = [binomial(w - 1, kind.k - 1) for w in range(omega_max + 1)]
    else:
        lookup = [w**kind.power for w in range(omega_max + 1)]
    coefficients = table.mu * np.array(lookup, dtype=np.int64)[table.omega]
    if kind.restricted:
        keep = (table.spf % kind.modulus == kind.j % kind.modulus) & (
            table.numbers >= 2
        )
        coefficients[~keep] = 0
    return coefficients


def _real_terms(table: ArithTable, kind: SumKind, a: np.ndarray) -> np.ndarray:
    n = table.numbers.astype(np.float64)
    if kind.selector is Selector.log_power_harmonic:
        return a * np.log(n) ** kind.k / n
    return a / n


def _exact_dot(a: np.ndarray, q: np.ndarray) -> int:
    """sum(a * q) as an exact Python integer."""
    nonzero = a != 0
    a, q = a[nonzero], q[nonzero]
    if not len(a):
        return 0
    bound = int(np.abs(a).max()) * int(q.max())
    if bound * len(a) <= INT64_LIMIT:
        return int(np.dot(a, q))
    if bound <= INT64_LIMIT:
        return sum((a * q).tolist())
    return sum(x * y for x, y in zip(a.tolist(), q.tolist(), strict=True))


@dataclass
class _SegmentSums:
    # (checkpoint position closed by the piece or None, value, sum of |terms|)
    pieces: list[tuple[int | None, Value, float]]
    # floor(x/n) weighted part for every checkpoint, 0 below the segment
    floors: list[int]


def _sum_segment(
    table: ArithTable,
    kind: SumKind,
    checkpoints: tuple[int, ...],
) -> _SegmentSums:
    a = _coefficients(table, kind)
    selector = kind.selector
    floors = [0] * len(checkpoints)
    first = bisect_left(checkpoints, table.lo)
    if selector in FLOOR or selector in FRAC:
        numbers = table.numbers
        for position in range(first, len(checkpoints)):
            c = checkpoints[position]
            stop = min(c + 1, table.hi) - table.lo
            floors[position] = _exact_dot(a[:stop], c // numbers[:stop])

    if selector in FLOOR:
        # only marks where the checkpoints are complete
        terms = np.zeros_like(a)
    else:
        terms = a if kind.integral else _real_terms(table, kind, a)
    pieces: list[tuple[int | None, Value, float]] = []
    start = 0
    for position in range(first, len(checkpoints)):
        c = checkpoints[position]
        if c >= table.hi:
            break
        stop = c - table.lo + 1
        pieces.append((position, *_piece(terms[start:stop], kind.integral)))
        start = stop
    if start < len(table):
        pieces.append((None, *_piece(terms[start:], kind.integral)))
    return _SegmentSums(pieces=pieces, floors=floors)


def _piece(terms: np.ndarray, integral: bool) -> tuple[Value, float]:
    if integral:
        return int(terms.sum()), 0.0
    values = terms.tolist()
    return math.fsum(values), math.fsum(map(abs, values))


def _log_term_ulps(kind: SumKind) -> int:
    return kind.k + 2 if kind.selector is Selector.log_power_harmonic else 1


def compute_series(
    kind: SumKind,
    x_max: int,
    checkpoints: Sequence[int] | None = None,
    sweep: Sweep | None = None,
    exact: bool = False,
    verbose: bool = False,
) -> PartialSumSeries:
    """
    Partial sums of `kind` at every checkpoint (default: a geometric grid with
    four points per decade from 100 up to x_max) in one pass over 1..x_max.

    With `exact=True` (x_max <= 10^4) rational sums are returned as `Fraction`
    and the log-power sum is correctly rounded.
    """
    sweep = sweep or Sweep()
    sweep.check(x_max)
    checkpoints = check_checkpoints(
        default_checkpoints(x_max) if checkpoints is None else checkpoints,
        x_max,
    )
    if exact:
        return _compute_exact(kind, checkpoints)

    start_time = time.perf_counter()
    values: list[Value] = [0] * len(checkpoints)
    bounds = [0.0] * len(checkpoints)
    times = [0.0] * len(checkpoints)
    floors = [0] * len(checkpoints)
    integer_total = 0
    real_total = CompensatedSum()
    task = partial(_sum_segment, kind=kind, checkpoints=tuple(checkpoints))
    for segment in sweep.run(task, checkpoints[-1]):
        floors = [f + g for f, g in zip(floors, segment.floors, strict=True)]
        for position, value, magnitude in segment.pieces:
            if kind.integral:
                integer_total += value
            else:
                real_total.add(value, magnitude)
            if position is None:
                continue
            values[position] = integer_total if kind.integral else real_total.value
            bounds[position] = real_total.error_bound(_log_term_ulps(kind))
            times[position] = time.perf_counter() - start_time
            if verbose:
                print(f"{kind}: x = {checkpoints[position]} done", file=sys.stderr)

    if kind.selector in FLOOR:
        values = list(floors)
    elif kind.selector in FRAC:
        values = [
            c * h - f for c, h, f in zip(checkpoints, values, floors, strict=True)
        ]
        bounds = [
            c * b + EPSILON * abs(v)
            for c, b, v in zip(checkpoints, bounds, values, strict=True)
        ]
    return PartialSumSeries(
        kind=kind,
        checkpoints=checkpoints,
        values=values,
        error_bounds=bounds,
        wall_times=times,
    )


def _compute_exact(kind: SumKind, checkpoints: list[int]) -> PartialSumSeries:
    if checkpoints[-1] > EXACT_LIMIT:
        raise CeilingExceededError(checkpoints[-1], EXACT_LIMIT, "x (exact mode)")
    start_time = time.perf_counter()
    table = build_table(1, checkpoints[-1] + 1)
    coefficients = _coefficients(table, kind).tolist()
    selector = kind.selector

    values: list[Value] = []
    times = []
    integer_total = 0
    harmonic_total = Fraction(0)
    log_terms = []
    done = 0
    for c in checkpoints:
        for n in range(done + 1, c + 1):
            a = coefficients[n - 1]
            if not a:
                continue
            if selector is Selector.log_power_harmonic:
                log_terms.append(a * math.log(n) ** kind.k / n)
            elif kind.integral:
                integer_total += a
            else:
                harmonic_total += Fraction(a, n)
        done = c

        if selector in FLOOR or selector in FRAC:
            floor_part = sum(a * (c // n) for n, a in enumerate(coefficients[:c], 1))
        if selector in FLOOR:
            values.append(floor_part)
        elif selector in FRAC:
            values.append(c * harmonic_total - floor_part)
        elif selector is Selector.log_power_harmonic:
            values.append(math.fsum(log_terms))
        elif kind.integral:
            values.append(integer_total)
        else:
            values.append(harmonic_total)
        times.append(time.perf_counter() - start_time)
    return PartialSumSeries(
        kind=kind,
        checkpoints=checkpoints,
        values=values,
        error_bounds=[0.0] * len(checkpoints),
        wall_times=times,
    )


def restricted_partition(
    kind: SumKind,
    x: int,
    sweep: Sweep | None = None,
    exact: bool = False,
) -> tuple[dict[int, Value], Value]:
    """
    The restricted sum of `kind` at x for every class j = 1..l (reduced or not)
    together with the same sum over all n >= 2. The classes add up to the total.
    """
    if not kind.restricted:
        raise UnknownSumKindError(
            str(kind.selector),
            [str(s) for s in Selector if s in RESTRICTED],
        )

    def at_x(j: int, modulus: int) -> Value:
        variant = SumKind(kind.selector, k=kind.k, j=j, modulus=modulus, coprime=False)
        return compute_series(variant, x, [x], sweep=sweep, exact=exact).values[0]

    classes = {j: at_x(j, kind.modulus) for j in range(1, kind.modulus + 1)}
    return classes, at_x(1, 1)


def floor_identity_check(
    x: int,
    k: int,
    sweep: Sweep | None = None,
) -> tuple[int, int]:
    """
    Both sides of

        sum_{n <= x} mu(n) omega(n)^k floor(x/n)
            = sum_{j=1}^{k} delta_{j,k} #{n <= x : omega(n) = j}

    computed independently: the left side from the floor-weighted sweep, the
    right side from the omega histogram and the delta recurrence.
    """
    if x > FLOOR_IDENTITY_LIMIT:
        raise CeilingExceededError(x, FLOOR_IDENTITY_LIMIT)
    kind = SumKind(Selector.floor_weighted, k=k)
    lhs = compute_series(kind, x, [x], sweep=sweep).values[0]
    histogram = omega_histogram(x, sweep)
    deltas = delta_table(k)
    top = min(k, len(histogram) - 1)
    rhs = sum(deltas[j] * histogram[j] for j in range(1, top + 1))
    return lhs, rhs


def frac_weighted_sum(
    x: int,
    k: int,
    restriction: tuple[int, int] | None = None,
    sweep: Sweep | None = None,
) -> float:
    """sum_{n <= x} mu(n) omega(n)^k {x/n}, optionally only where p_1(n) = j mod l."""
    if restriction is None:
        kind = SumKind(Selector.frac_weighted, k=k)
    else:
        j, modulus = restriction
        kind = SumKind(Selector.restricted_frac, k=k + 1, j=j, modulus=modulus)
    return float(compute_series(kind, x, [x], sweep=sweep).values[0])


def log_power_harmonic(x: int, j: int, sweep: Sweep | None = None) -> float:
    """sum_{n <= x} mu(n) (log n)^j / n"""
    kind = SumKind(Selector.log_power_harmonic, k=j)
    return compute_series(kind, x, [x], sweep=sweep).values[0]
