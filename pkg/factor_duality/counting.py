"""
Exact counting functions over 1..x: smooth numbers by their k-th largest prime
factor, integers by number of distinct prime factors, repeated top prime
factors and the residue classes of P_k(n).

Every count is a sum of per-segment integer tallies, so the result does not
depend on the segment size or the number of workers.
"""

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .duality import PrimeWeight, check_order
from .errors import InvalidResidueError, UnsupportedOrderError
from .sieve import UNIT, ArithTable, Sweep


@dataclass(frozen=True)
class SmoothCount:
    x: int
    y: int
    k: int
    count: int


@dataclass(frozen=True)
class EquidistReport:
    """
    Counts of 2 <= n <= x by the residue of P_k(n) mod `modulus`.

    `counts[j]` for 1 <= j <= modulus holds N_k(x; modulus, j) (the class of 0
    is stored under j = modulus). Integers with omega(n) < k go to `unit`.
    """

    x: int
    modulus: int
    k: int
    counts: dict[int, int]
    unit: int

    @property
    def coprime_classes(self) -> list[int]:
        return [j for j in self.counts if math.gcd(j, self.modulus) == 1]

    @property
    def phi(self) -> int:
        return len(self.coprime_classes)

    @property
    def expected(self) -> float:
        return self.x / self.phi

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.unit

    @property
    def deviations(self) -> dict[int, float]:
        return {j: self.counts[j] - self.expected for j in self.coprime_classes}

    @property
    def envelope(self) -> float:
        """x (log log x)^k / log x, or nan where log log x is undefined."""
        if self.x < 3:
            return math.nan
        log_x = math.log(self.x)
        return self.x * math.log(log_x) ** self.k / log_x

    @property
    def relative_deviation(self) -> float:
        return max(
            abs(self.counts[j] * self.phi / self.x - 1) for j in self.coprime_classes
        )


def _from_two(table: ArithTable) -> slice:
    return slice(max(0, 2 - table.lo), len(table))


def _omega_tally(table: ArithTable) -> np.ndarray:
    return np.bincount(table.omega)


def _count_kth_smooth(table: ArithTable, bound: int, k: int) -> int:
    return int(np.count_nonzero(table.kth_largest_array(k) <= bound))


def _count_repeats(table: ArithTable, k: int) -> int:
    return int(np.count_nonzero(table.repeat_in_top_k_array(k)))


def _count_primes(table: ArithTable) -> int:
    return int(np.count_nonzero((table.omega == 1) & (table.spf == table.numbers)))


def _class_tally(table: ArithTable, modulus: int, k: int) -> tuple[np.ndarray, int]:
    largest = table.kth_largest_array(k)[_from_two(table)]
    has_factor = largest != UNIT
    classes = np.bincount(largest[has_factor] % modulus, minlength=modulus)
    return classes, int(np.count_nonzero(~has_factor))


def _weight_sum(table: ArithTable, f: PrimeWeight, k: int) -> float:
    values = f.evaluate_array(table.kth_largest_array(k)[_from_two(table)])
    return math.fsum(values.tolist())


def _add_padded(total: np.ndarray, part: np.ndarray) -> np.ndarray:
    if len(part) > len(total):
        total, part = part, total
    total = total.copy()
    total[: len(part)] += part
    return total


def omega_histogram(x: int, sweep: Sweep | None = None) -> list[int]:
    """`[#{n <= x : omega(n) = r} for r in 0..max omega]`"""
    sweep = sweep or Sweep()
    total = np.zeros(1, dtype=np.int64)
    for part in sweep.run(_omega_tally, x):
        total = _add_padded(total, part)
    return total.tolist()


def pi_k(x: int, k: int, sweep: Sweep | None = None) -> int:
    if k < 0:
        raise UnsupportedOrderError("k", k, 0, 64)
    histogram = omega_histogram(x, sweep)
    return histogram[k] if k < len(histogram) else 0


def prime_pi(x: int, sweep: Sweep | None = None) -> int:
    sweep = sweep or Sweep()
    return sum(sweep.run(_count_primes, x))


def psi_k(x: int, bound: int, k: int, sweep: Sweep | None = None) -> SmoothCount:
    """Number of n <= x with P_k(n) <= bound; P_k(n) = 1 counts as below."""
    check_order(k, upper=64)
    if not 1 <= bound <= x:
        raise UnsupportedOrderError("T", bound, 1, x)
    sweep = sweep or Sweep()
    count = sum(sweep.run(partial(_count_kth_smooth, bound=bound, k=k), x))
    return SmoothCount(x=x, y=bound, k=k, count=count)


def psi_smooth(x: int, y: int, sweep: Sweep | None = None) -> SmoothCount:
    """Psi(x, y), the number of y-smooth n <= x, including n = 1."""
    if not 2 <= y <= x:
        raise UnsupportedOrderError("y", y, 2, x)
    return psi_k(x, y, 1, sweep)


def repeat_count(x: int, k: int, sweep: Sweep | None = None) -> int:
    """Number of n <= x where the square of one of P_1(n)..P_{k-1}(n) divides n."""
    check_order(k, lower=2, upper=64)
    sweep = sweep or Sweep()
    return sum(sweep.run(partial(_count_repeats, k=k), x))


def equidist(
    x: int,
    modulus: int,
    k: int,
    sweep: Sweep | None = None,
) -> EquidistReport:
    if modulus < 2:
        raise InvalidResidueError(1, modulus, "the modulus has to be at least 2")
    check_order(k, upper=64)
    sweep = sweep or Sweep()
    classes = np.zeros(modulus, dtype=np.int64)
    unit = 0
    for part, part_unit in sweep.run(
        partial(_class_tally, modulus=modulus, k=k),
        x,
    ):
        classes += part
        unit += part_unit
    counts = {j: int(classes[j % modulus]) for j in range(1, modulus + 1)}
    return EquidistReport(x=x, modulus=modulus, k=k, counts=counts, unit=unit)


def weight_average(
    x: int,
    f: PrimeWeight,
    k: int,
    sweep: Sweep | None = None,
) -> float:
    """(1/x) sum_{2 <= n <= x} f(P_k(n))"""
    check_order(k, upper=64)
    sweep = sweep or Sweep()
    return math.fsum(sweep.run(partial(_weight_sum, f=f, k=k), x)) / x
