import math
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial
from itertools import combinations
from typing import NewType, TypeVar

import numpy as np

from .errors import (
    CeilingExceededError,
    InvalidRangeError,
    OutOfRangeError,
    RangeTooLargeError,
    UnitArgumentError,
    UnsupportedOrderError,
)

PrimeOrUnit = NewType("PrimeOrUnit", int)

# P_k(n) and p_k(n) for omega(n) < k; every PrimeWeight maps it to 0.
UNIT = PrimeOrUnit(1)

MAX_HI = 2**63
DEFAULT_SEGMENT_SIZE = 2**22
DEFAULT_MEMORY_BUDGET = 2**26

T = TypeVar("T")


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, as a read-only int64 array."""
    if limit < 2:
        primes = np.array([], dtype=np.int64)
    else:
        is_prime = np.ones(limit + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if is_prime[p]:
                is_prime[p * p :: p] = False
        primes = np.flatnonzero(is_prime).astype(np.int64)
    primes.flags.writeable = False
    return primes


@dataclass(frozen=True, eq=False)
class ArithTable:
    """
    Per-integer arithmetic data for every n in [lo, hi).

    The distinct prime factors of all n are kept in one pool:
    `pool_primes[offsets[i]:offsets[i + 1]]` holds the primes of `lo + i` in
    descending order, `pool_exponents` the matching exponents.
    """

    lo: int
    hi: int
    mu: np.ndarray
    omega: np.ndarray
    spf: np.ndarray
    offsets: np.ndarray
    pool_primes: np.ndarray
    pool_exponents: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo

    def __contains__(self, n: int) -> bool:
        return self.lo <= n < self.hi

    @property
    def numbers(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    def index(self, n: int) -> int:
        if n not in self:
            raise OutOfRangeError(n, self.lo, self.hi)
        return n - self.lo

    def factors(self, n: int) -> list[tuple[int, int]]:
        i = self.index(n)
        start, stop = self.offsets[i], self.offsets[i + 1]
        return list(
            zip(
                self.pool_primes[start:stop].tolist(),
                self.pool_exponents[start:stop].tolist(),
                strict=True,
            ),
        )

    def distinct_primes(self, n: int) -> list[int]:
        i = self.index(n)
        return self.pool_primes[self.offsets[i] : self.offsets[i + 1]].tolist()

    def mu_of(self, n: int) -> int:
        return int(self.mu[self.index(n)])

    def omega_of(self, n: int) -> int:
        return int(self.omega[self.index(n)])

    def spf_of(self, n: int) -> int:
        return int(self.spf[self.index(n)])

    def _pick(self, positions: np.ndarray, valid: np.ndarray) -> np.ndarray:
        out = np.full(len(self), UNIT, dtype=np.int64)
        out[valid] = self.pool_primes[positions[valid]]
        return out

    def kth_largest_array(self, k: int) -> np.ndarray:
        """P_k(n) for every n in the table, UNIT where omega(n) < k."""
        return self._pick(self.offsets[:-1] + (k - 1), self.omega >= k)

    def kth_smallest_array(self, k: int) -> np.ndarray:
        """p_k(n) for every n in the table, UNIT where omega(n) < k."""
        return self._pick(self.offsets[1:] - k, self.omega >= k)

    def repeat_in_top_k_array(self, k: int) -> np.ndarray:
        repeats = np.zeros(len(self), dtype=bool)
        starts = self.offsets[:-1]
        for i in range(k - 1):
            valid = self.omega > i
            if not valid.any():
                break
            repeats[valid] |= self.pool_exponents[starts[valid] + i] >= 2
        return repeats

    @staticmethod
    def concat(tables: Sequence["ArithTable"]) -> "ArithTable":
        """Join tables of adjacent ranges, given in ascending order."""
        if len(tables) == 1:
            return tables[0]
        shifted = []
        base = 0
        for table in tables:
            shifted.append(table.offsets[1:] + base)
            base += len(table.pool_primes)
        return ArithTable(
            lo=tables[0].lo,
            hi=tables[-1].hi,
            mu=np.concatenate([t.mu for t in tables]),
            omega=np.concatenate([t.omega for t in tables]),
            spf=np.concatenate([t.spf for t in tables]),
            offsets=np.concatenate([np.zeros(1, dtype=np.int64), *shifted]),
            pool_primes=np.concatenate([t.pool_primes for t in tables]),
            pool_exponents=np.concatenate([t.pool_exponents for t in tables]),
        )


def _sieve_segment(lo: int, hi: int) -> ArithTable:
    size = hi - lo
    numbers = np.arange(lo, hi, dtype=np.int64)
    rest = numbers.copy()
    omega = np.zeros(size, dtype=np.int8)
    squarefree = np.ones(size, dtype=bool)
    spf = np.zeros(size, dtype=np.int64)
    hit_index: list[np.ndarray] = []
    hit_prime: list[np.ndarray] = []
    hit_exponent: list[np.ndarray] = []

    for p in primes_up_to(math.isqrt(hi - 1)).tolist():
        start = -(-lo // p) * p
        if start >= hi:
            continue
        idx = np.arange(start - lo, size, p, dtype=np.int64)
        exponents = np.ones(len(idx), dtype=np.int8)
        # positions (into idx) still divisible by the current prime power
        pos = np.arange(len(idx))
        q = p * p
        while q < hi and len(pos):
            pos = pos[numbers[idx[pos]] % q == 0]
            exponents[pos] += 1
            q *= p
        rest[idx] //= np.power(p, exponents.astype(np.int64))
        omega[idx] += 1
        squarefree[idx[exponents > 1]] = False
        fresh = idx[spf[idx] == 0]
        spf[fresh] = p
        hit_index.append(idx)
        hit_prime.append(np.full(len(idx), p, dtype=np.int64))
        hit_exponent.append(exponents)

    # whatever is left is a single prime above sqrt(hi)
    large = np.flatnonzero(rest > 1)
    omega[large] += 1
    fresh = large[spf[large] == 0]
    spf[fresh] = rest[fresh]
    spf[spf == 0] = UNIT
    hit_index.append(large)
    hit_prime.append(rest[large])
    hit_exponent.append(np.ones(len(large), dtype=np.int8))

    index = np.concatenate(hit_index)
    # hits were collected by ascending prime, so the reversed order is
    # descending and a stable sort by n keeps it within each n
    order = np.argsort(index[::-1], kind="stable")
    pool_primes = np.concatenate(hit_prime)[::-1][order]
    pool_exponents = np.concatenate(hit_exponent)[::-1][order]
    offsets = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(index, minlength=size), out=offsets[1:])

    mu = np.where(squarefree, 1 - 2 * (omega % 2), 0).astype(np.int8)
    return ArithTable(
        lo=lo,
        hi=hi,
        mu=mu,
        omega=omega,
        spf=spf,
        offsets=offsets,
        pool_primes=pool_primes,
        pool_exponents=pool_exponents,
    )


def check_range(lo: int, hi: int, budget: int) -> None:
    if not 1 <= lo < hi <= MAX_HI:
        raise InvalidRangeError(lo, hi)
    if math.isqrt(hi - 1) > budget:
        raise RangeTooLargeError(lo, hi, budget)


def segment_bounds(lo: int, hi: int, segment_size: int) -> Iterator[tuple[int, int]]:
    for start in range(lo, hi, segment_size):
        yield start, min(start + segment_size, hi)


def build_table(
    lo: int,
    hi: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> ArithTable:
    check_range(lo, hi, memory_budget)
    if hi - lo > memory_budget:
        raise RangeTooLargeError(lo, hi, memory_budget)
    return ArithTable.concat(
        [_sieve_segment(a, b) for a, b in segment_bounds(lo, hi, segment_size)],
    )


def _apply_to_segment(func: Callable[[ArithTable], T], bounds: tuple[int, int]) -> T:
    return func(_sieve_segment(*bounds))


def map_segments(
    func: Callable[[ArithTable], T],
    lo: int,
    hi: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> Iterator[T]:
    """
    Sieve [lo, hi) segment by segment and apply `func` to every segment table.

    With `threads > 1` the segments are sieved and reduced in worker
    processes (`func` has to be picklable); results are always yielded in
    ascending segment order.
    """
    check_range(lo, hi, memory_budget)
    if segment_size > memory_budget:
        raise RangeTooLargeError(lo, lo + segment_size, memory_budget)
    bounds = list(segment_bounds(lo, hi, segment_size))
    task = partial(_apply_to_segment, func)
    if threads <= 1 or len(bounds) == 1:
        yield from map(task, bounds)
    else:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            yield from executor.map(task, bounds)


def _check_order(k: int, lower: int = 1) -> None:
    if k < lower:
        raise UnsupportedOrderError("k", k, lower, MAX_HI)


def kth_largest_prime(n: int, k: int, table: ArithTable) -> PrimeOrUnit:
    _check_order(k)
    primes = table.distinct_primes(n)
    return PrimeOrUnit(primes[k - 1]) if len(primes) >= k else UNIT


def kth_smallest_prime(n: int, k: int, table: ArithTable) -> PrimeOrUnit:
    _check_order(k)
    primes = table.distinct_primes(n)
    return PrimeOrUnit(primes[-k]) if len(primes) >= k else UNIT


def subsets_descending(primes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All subsets of a descending prime list, each kept descending."""
    for r in range(len(primes) + 1):
        yield from combinations(primes, r)


def squarefree_divisors(n: int, table: ArithTable) -> list[int]:
    return sorted(
        math.prod(subset)
        for subset in subsets_descending(table.distinct_primes(n))
    )


def has_repeat_in_top_k(n: int, k: int, table: ArithTable) -> bool:
    if n < 2:
        raise UnitArgumentError("has_repeat_in_top_k", n)
    _check_order(k, lower=2)
    return any(e >= 2 for _, e in table.factors(n)[: k - 1])


SIEVE_CEILING = 10**9


@dataclass(frozen=True)
class Sweep:
    """How a range 1..x is swept: segment length, worker count and ceiling."""

    segment_size: int = DEFAULT_SEGMENT_SIZE
    threads: int = 1
    ceiling: int = SIEVE_CEILING
    memory_budget: int = DEFAULT_MEMORY_BUDGET

    def check(self, x: int, what: str = "x") -> None:
        if x < 1:
            raise InvalidRangeError(1, x + 1)
        if x > self.ceiling:
            raise CeilingExceededError(x, self.ceiling, what)

    def run(self, func: Callable[[ArithTable], T], x: int) -> Iterator[T]:
        """Apply `func` to the segment tables covering 1..x, in ascending order."""
        self.check(x)
        return map_segments(
            func,
            1,
            x + 1,
            segment_size=self.segment_size,
            threads=self.threads,
            memory_budget=self.memory_budget,
        )
