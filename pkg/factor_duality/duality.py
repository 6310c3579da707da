"""
Exact checks of the duality identities between the k-th largest and the
k-th smallest prime factors, of the Möbius-weighted divisor power sums and of
the Stirling-number recurrences behind them.

All arithmetic is exact: Python integers, and `Fraction` wherever a weight
takes rational values.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, partial
from math import comb, factorial, gcd, prod

import numpy as np

from .errors import (
    InvalidResidueError,
    UnitArgumentError,
    UnknownPrimeError,
    UnsupportedOrderError,
)
from .sieve import (
    UNIT,
    ArithTable,
    Sweep,
    primes_up_to,
    subsets_descending,
)

Number = int | Fraction

# k! and the Stirling numbers grow quickly, orders are capped here
MAX_ORDER = 20


class Side(Enum):
    largest = "largest"
    smallest = "smallest"

    def __str__(self) -> str:
        return self.name

    @staticmethod
    def from_string(s: str) -> "Side":
        try:
            return Side[s]
        except KeyError:
            raise ValueError(f"Unknown side '{s}'") from None


class WeightKind(Enum):
    one = "one"
    residue = "residue"
    table = "table"


def check_residue(j: int, modulus: int, coprime: bool = True) -> None:
    if modulus < 2:
        raise InvalidResidueError(j, modulus, "the modulus has to be at least 2.")
    if not 1 <= j <= modulus:
        raise InvalidResidueError(j, modulus, "the residue has to satisfy 1 <= j <= l.")
    if coprime and gcd(j, modulus) != 1:
        raise InvalidResidueError(j, modulus, "j and l have to be coprime.")


@dataclass(frozen=True)
class PrimeWeight:
    """A bounded function on primes; the unit sentinel always maps to 0."""

    kind: WeightKind
    label: str
    residue: int = 0
    modulus: int = 0
    values: dict[int, Fraction] = field(default_factory=dict, compare=False)
    bound: Fraction = Fraction(1)

    @classmethod
    def one(cls) -> "PrimeWeight":
        return cls(WeightKind.one, "one")

    @classmethod
    def residue_indicator(
        cls,
        j: int,
        modulus: int,
        coprime: bool = True,
    ) -> "PrimeWeight":
        check_residue(j, modulus, coprime=coprime)
        return cls(WeightKind.residue, f"{j}mod{modulus}", residue=j, modulus=modulus)

    @classmethod
    def from_table(
        cls,
        values: Mapping[int, Number],
        bound: Number = 1,
        label: str = "table",
    ) -> "PrimeWeight":
        table = {int(p): Fraction(v) for p, v in values.items()}
        bound = Fraction(bound)
        for p, v in table.items():
            if abs(v) > bound:
                raise ValueError(
                    f"Weight {v} at prime {p} exceeds the declared bound {bound}.",
                )
        return cls(WeightKind.table, label, values=table, bound=bound)

    @classmethod
    def random_table(
        cls,
        primes: Sequence[int],
        seed: int,
        max_denominator: int = 16,
    ) -> "PrimeWeight":
        """Seeded rational values in [-1, 1] for every prime in `primes`."""
        rng = np.random.default_rng(seed)
        denominators = rng.integers(1, max_denominator + 1, size=len(primes))
        numerators = rng.integers(-denominators, denominators + 1)
        return cls.from_table(
            {
                p: Fraction(int(a), int(b))
                for p, a, b in zip(primes, numerators, denominators, strict=True)
            },
            label=f"random{seed}",
        )

    def __call__(self, p: int) -> Number:
        if p == UNIT:
            return 0
        if self.kind is WeightKind.one:
            return 1
        if self.kind is WeightKind.residue:
            return int(p % self.modulus == self.residue % self.modulus)
        try:
            return self.values[p]
        except KeyError:
            raise UnknownPrimeError(p) from None

    def evaluate_array(self, primes: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an array of primes or UNIT entries."""
        if self.kind is WeightKind.one:
            return (primes != UNIT).astype(np.int64)
        if self.kind is WeightKind.residue:
            hit = (primes % self.modulus == self.residue % self.modulus)
            return (hit & (primes != UNIT)).astype(np.int64)
        unique, inverse = np.unique(primes, return_inverse=True)
        values = np.array([float(self(p)) for p in unique.tolist()])
        return values[inverse]

    def __str__(self) -> str:
        return self.label


def standard_weights(n_max: int, seed: int) -> list[PrimeWeight]:
    """Constant one, every coprime residue indicator mod 3, 4, 5 and a random table."""
    weights = [PrimeWeight.one()]
    for modulus in (3, 4, 5):
        weights.extend(
            PrimeWeight.residue_indicator(j, modulus)
            for j in range(1, modulus)
            if gcd(j, modulus) == 1
        )
    weights.append(PrimeWeight.random_table(primes_up_to(n_max).tolist(), seed))
    return weights


def binomial(m: int, r: int) -> int:
    if r < 0 or m < r:
        return 0
    return comb(m, r)


def check_order(k: int, lower: int = 1, upper: int = MAX_ORDER, name="k") -> None:
    if not lower <= k <= upper:
        raise UnsupportedOrderError(name, k, lower, upper)


def _weight_values(f: PrimeWeight, primes: Sequence[int]) -> dict[int, Number]:
    values = {p: f(p) for p in primes}
    values[UNIT] = f(UNIT)
    return values


def _direct_sum(
    subsets: Sequence[tuple[int, ...]],
    k: int,
    values: Mapping[int, Number],
    side: Side,
) -> Number:
    total: Number = 0
    for subset in subsets:
        if len(subset) >= k:
            kth = subset[k - 1] if side is Side.largest else subset[-k]
        else:
            kth = UNIT
        term = values[kth]
        total += -term if len(subset) % 2 else term
    return total


def _direct_rhs(primes: Sequence[int], k: int, values, side: Side) -> Number:
    extreme = primes[-1] if side is Side.largest else primes[0]
    return (-1) ** k * binomial(len(primes) - 1, k - 1) * values[extreme]


def _inverted_sum(
    subsets: Sequence[tuple[int, ...]],
    k: int,
    values: Mapping[int, Number],
    side: Side,
) -> Number:
    total: Number = 0
    for subset in subsets:
        # side names the k-th factor on the right: P_k(n) pairs with p_1(d)
        extreme = subset[-1] if side is Side.largest else subset[0]
        term = binomial(len(subset) - 1, k - 1) * values[extreme]
        total += -term if len(subset) % 2 else term
    return total


def _inverted_rhs(primes: Sequence[int], k: int, values, side: Side) -> Number:
    if len(primes) >= k:
        kth = primes[k - 1] if side is Side.largest else primes[-k]
    else:
        kth = UNIT
    return (-1) ** k * values[kth]


def _proper_subsets(primes: Sequence[int]) -> list[tuple[int, ...]]:
    # every squarefree divisor d > 1, as its descending prime tuple
    return list(subsets_descending(primes))[1:]


def _identity_input(name: str, n: int, k: int, table: ArithTable):
    if n < 2:
        raise UnitArgumentError(name, n)
    check_order(k)
    primes = table.distinct_primes(n)
    return primes, _proper_subsets(primes)


def duality_direct(
    n: int,
    k: int,
    f: PrimeWeight,
    side: Side,
    table: ArithTable,
) -> tuple[Number, Number]:
    primes, subsets = _identity_input("duality_direct", n, k, table)
    values = _weight_values(f, primes)
    return _direct_sum(subsets, k, values, side), _direct_rhs(primes, k, values, side)


def duality_inverted(
    n: int,
    k: int,
    f: PrimeWeight,
    side: Side,
    table: ArithTable,
) -> tuple[Number, Number]:
    primes, subsets = _identity_input("duality_inverted", n, k, table)
    values = _weight_values(f, primes)
    return (
        _inverted_sum(subsets, k, values, side),
        _inverted_rhs(primes, k, values, side),
    )


@dataclass(frozen=True)
class Mismatch:
    identity: str
    n: int
    k: int
    weight: str
    side: str
    lhs: Number
    rhs: Number


def _verify_segment(
    table: ArithTable,
    k_max: int,
    weights: Sequence[PrimeWeight],
) -> tuple[int, list[Mismatch]]:
    checks = 0
    mismatches = []
    for n in range(max(table.lo, 2), table.hi):
        primes = table.distinct_primes(n)
        subsets = _proper_subsets(primes)
        for f in weights:
            values = _weight_values(f, primes)
            for k in range(1, k_max + 1):
                for side in Side:
                    for identity, lhs_of, rhs_of in (
                        ("direct", _direct_sum, _direct_rhs),
                        ("inverted", _inverted_sum, _inverted_rhs),
                    ):
                        lhs = lhs_of(subsets, k, values, side)
                        rhs = rhs_of(primes, k, values, side)
                        checks += 1
                        if lhs != rhs:
                            mismatches.append(
                                Mismatch(identity, n, k, str(f), str(side), lhs, rhs),
                            )
    return checks, mismatches


def verify_range(
    n_max: int,
    k_max: int,
    weights: Sequence[PrimeWeight],
    sweep: Sweep | None = None,
) -> tuple[int, list[Mismatch]]:
    """
    Check both duality identities, both sides, for every 2 <= n <= n_max,
    1 <= k <= k_max and weight. Returns the number of checks and the
    mismatches ordered by n, weight, k, side and identity.
    """
    check_order(k_max)
    task = partial(_verify_segment, k_max=k_max, weights=list(weights))
    checks = 0
    mismatches: list[Mismatch] = []
    sweep = sweep or Sweep()
    for segment_checks, segment_mismatches in sweep.run(task, n_max):
        checks += segment_checks
        mismatches.extend(segment_mismatches)
    return checks, mismatches


def inversion_roundtrip(
    n_max: int,
    k: int,
    f: PrimeWeight,
    table: ArithTable,
) -> list[int]:
    """
    Möbius-invert h(n) = (-1)^k f(P_k(n)) over 1..n_max and return every n
    where the result differs from mu(n) C(omega(n) - 1, k - 1) f(p_1(n)).
    """
    check_order(k)
    table.index(1)
    table.index(n_max)
    mu = table.mu[:n_max].tolist()
    omega = table.omega[:n_max].tolist()
    largest_k = table.kth_largest_array(k)[:n_max].tolist()
    smallest = table.kth_smallest_array(1)[:n_max].tolist()

    h = [0] + [(-1) ** k * f(p) for p in largest_k]
    inverted: list[Number] = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        if h[d] == 0:
            continue
        for m in range(1, n_max // d + 1):
            if mu[m - 1]:
                inverted[d * m] += mu[m - 1] * h[d]

    mismatches = []
    for n in range(2, n_max + 1):
        i = n - 1
        summand = mu[i] * binomial(omega[i] - 1, k - 1) * f(smallest[i])
        if inverted[n] != summand:
            mismatches.append(n)
    return mismatches


def divisor_power_sum(n: int, k: int, table: ArithTable) -> int:
    check_order(k)
    return sum(
        (-1) ** len(subset) * len(subset) ** k
        for subset in subsets_descending(table.distinct_primes(n))
    )


def generating_identity_check(
    n: int,
    z: Number,
    table: ArithTable,
) -> tuple[Fraction, Fraction]:
    primes = table.distinct_primes(n)
    if not primes:
        raise UnitArgumentError("generating_identity_check", n)
    z = Fraction(z)
    lhs = sum(
        ((-z) ** len(subset) for subset in subsets_descending(primes)),
        Fraction(0),
    )
    return lhs, (1 - z) ** len(primes)


@dataclass(frozen=True)
class DeltaTable:
    k: int
    deltas: tuple[int, ...]

    def __getitem__(self, j: int) -> int:
        """delta_{j,k}, zero outside of 1 <= j <= k."""
        return self.deltas[j - 1] if 1 <= j <= self.k else 0


def delta_table(k: int) -> DeltaTable:
    check_order(k)
    row = DeltaTable(1, (-1,))
    for m in range(2, k + 1):
        row = DeltaTable(
            m,
            tuple(j * (row[j] - row[j - 1]) for j in range(1, m + 1)),
        )
    return row


def primorials(limit: int, count: int) -> list[int]:
    """The first `count` primorials 2, 6, 30, ... that are below `limit`."""
    witnesses = []
    value = 1
    for p in primes_up_to(max(count * 8, 30)).tolist()[:count]:
        value *= p
        if value >= limit:
            break
        witnesses.append(value)
    return witnesses


def cross_validate_deltas(k: int, table: ArithTable) -> list[tuple[int, int, int]]:
    """
    Compare the recurrence with divisor_power_sum on primorial witnesses
    (omega = j) inside the table, including j = k + 1 where the sum vanishes.
    Returns (j, expected, computed) for every disagreement.
    """
    deltas = delta_table(k)
    failures = []
    for j, witness in enumerate(primorials(table.hi, k + 1), start=1):
        if witness < table.lo:
            continue
        computed = divisor_power_sum(witness, k, table)
        if computed != deltas[j]:
            failures.append((j, deltas[j], computed))
    return failures


@dataclass(frozen=True)
class StirlingTable:
    """Stirling numbers of the second kind S_{k,j}, rows 1..k_max."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def k_max(self) -> int:
        return len(self.rows)

    def __getitem__(self, key: tuple[int, int]) -> int:
        k, j = key
        if not 1 <= j <= k:
            return 0
        return self.rows[k - 1][j - 1]


@lru_cache(maxsize=4)
def stirling_table(k_max: int) -> StirlingTable:
    # one row beyond MAX_ORDER is needed by omega_power_decomposition
    check_order(k_max, upper=MAX_ORDER + 1)
    table = StirlingTable(((1,),))
    for k in range(2, k_max + 1):
        row = tuple(
            j * table[k - 1, j] + table[k - 1, j - 1] for j in range(1, k + 1)
        )
        table = StirlingTable((*table.rows, row))
    return table


def stirling_row(k: int) -> list[int]:
    check_order(k)
    return list(stirling_table(k).rows[k - 1])


def falling(a: int, m: int) -> int:
    """a (a - 1) ... (a - m + 1), the empty product for m = 0."""
    return prod(a - i for i in range(m))


def stirling_identity_holds(k: int) -> bool:
    """x^(k-1) = sum_j S_{k,j} (x - 1)(x - 2)...(x - j + 1) at x = 1..k+1."""
    row = stirling_row(k)
    return all(
        x ** (k - 1)
        == sum(s * falling(x - 1, j - 1) for j, s in enumerate(row, start=1))
        for x in range(1, k + 2)
    )


def alternating_stirling_sum(k: int) -> int:
    check_order(k, lower=2)
    row = stirling_row(k)
    return sum(
        (-1) ** (j - 1) * factorial(j - 1) * s
        for j, s in enumerate(row, start=1)
    )


def omega_power_decomposition(k: int, m: int) -> int:
    """
    Evaluate m^k through its Stirling expansion in shifted falling factorials,
    m^k = sum_{j=1}^{k+1} S_{k+1,j} (m - 1)(m - 2)...(m - j + 1).
    """
    check_order(k, lower=0)
    if m < 0:
        raise ValueError(f"The evaluation point has to be nonnegative, got {m}.")
    table = stirling_table(k + 1)
    return sum(
        table[k + 1, j] * falling(m - 1, j - 1) for j in range(1, k + 2)
    )
