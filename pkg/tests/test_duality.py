from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from sympy.functions.combinatorial.numbers import stirling

from factor_duality.duality import (
    PrimeWeight,
    Side,
    alternating_stirling_sum,
    cross_validate_deltas,
    delta_table,
    divisor_power_sum,
    duality_direct,
    duality_inverted,
    falling,
    generating_identity_check,
    inversion_roundtrip,
    omega_power_decomposition,
    standard_weights,
    stirling_identity_holds,
    stirling_row,
    verify_range,
)
from factor_duality.errors import (
    InvalidResidueError,
    UnitArgumentError,
    UnknownPrimeError,
    UnsupportedOrderError,
)
from factor_duality.sieve import UNIT, Sweep, build_table, primes_up_to

from . import oracles

N = 10**4


@pytest.fixture(scope="module")
def table():
    return build_table(1, N + 1)


def test_weights():
    one = PrimeWeight.one()
    assert one(UNIT) == 0
    assert one(7) == 1
    indicator = PrimeWeight.residue_indicator(1, 4)
    assert [indicator(p) for p in (UNIT, 2, 3, 5, 13)] == [0, 0, 0, 1, 1]
    assert str(indicator) == "1mod4"
    table = PrimeWeight.from_table({2: Fraction(1, 2), 3: -1})
    assert table(2) == Fraction(1, 2)
    assert table(UNIT) == 0
    with pytest.raises(UnknownPrimeError):
        table(5)
    with pytest.raises(ValueError):
        PrimeWeight.from_table({2: 3})


def test_invalid_residues():
    with pytest.raises(InvalidResidueError):
        PrimeWeight.residue_indicator(2, 4)
    with pytest.raises(InvalidResidueError):
        PrimeWeight.residue_indicator(1, 1)
    with pytest.raises(InvalidResidueError):
        PrimeWeight.residue_indicator(5, 4)
    # also a ValueError
    with pytest.raises(ValueError):
        PrimeWeight.residue_indicator(0, 3)


def test_random_table_is_seeded():
    primes = [2, 3, 5, 7, 11]
    a = PrimeWeight.random_table(primes, seed=3)
    b = PrimeWeight.random_table(primes, seed=3)
    assert a.values == b.values
    assert all(abs(v) <= 1 for v in a.values.values())


def test_evaluate_array(table):
    largest = table.kth_largest_array(2)
    for f in standard_weights(2000, seed=1):
        values = f.evaluate_array(largest)
        for n in (1, 2, 6, 30, 210, 1999):
            assert values[n - 1] == pytest.approx(float(f(int(largest[n - 1]))))


def test_duality_direct_examples(table):
    one = PrimeWeight.one()
    assert duality_direct(30, 2, one, Side.largest, table) == (2, 2)
    assert duality_direct(30, 1, one, Side.smallest, table) == (-1, -1)
    f = PrimeWeight.residue_indicator(1, 3)
    assert duality_direct(13, 2, f, Side.largest, table) == (0, 0)


def test_duality_inverted_examples(table):
    one = PrimeWeight.one()
    assert duality_inverted(30, 2, one, Side.largest, table) == (1, 1)
    assert duality_inverted(30, 3, one, Side.largest, table) == (-1, -1)
    assert duality_inverted(2, 2, one, Side.largest, table) == (0, 0)
    assert duality_inverted(2, 2, one, Side.smallest, table) == (0, 0)


def test_duality_rejects_unit(table):
    with pytest.raises(UnitArgumentError):
        duality_direct(1, 1, PrimeWeight.one(), Side.largest, table)
    with pytest.raises(UnsupportedOrderError):
        duality_inverted(6, 0, PrimeWeight.one(), Side.largest, table)


@pytest.mark.parametrize("side", list(Side))
def test_duality_exact_on_random_weights(table, side):
    f = PrimeWeight.random_table(primes_up_to(2000).tolist(), seed=7)
    for n in range(2, 2001, 37):
        for k in range(1, 5):
            lhs, rhs = duality_direct(n, k, f, side, table)
            assert lhs == rhs
            assert isinstance(lhs, Fraction | int)
            lhs, rhs = duality_inverted(n, k, f, side, table)
            assert lhs == rhs


def test_verify_range_clean():
    weights = standard_weights(3000, seed=0)
    checks, mismatches = verify_range(3000, 5, weights, sweep=Sweep(segment_size=700))
    assert mismatches == []
    # 2 identities * 2 sides for every n >= 2, k and weight
    assert checks == 2 * 2 * 2999 * 5 * len(weights)


def test_verify_range_threads_agree():
    weights = standard_weights(1500, seed=2)
    single = verify_range(1500, 3, weights, sweep=Sweep(segment_size=400))
    pooled = verify_range(1500, 3, weights, sweep=Sweep(segment_size=400, threads=2))
    assert single == pooled


@pytest.mark.big
def test_duality_suite():
    weights = standard_weights(20000, seed=0)
    checks, mismatches = verify_range(20000, 5, weights)
    assert checks > 0
    assert mismatches == []


@pytest.mark.parametrize("k", [1, 2, 3])
def test_inversion_roundtrip(table, k):
    for f in standard_weights(2000, seed=5):
        assert inversion_roundtrip(2000, k, f, table) == []


def test_divisor_power_sum_examples(table):
    assert divisor_power_sum(6, 3, table) == 6
    assert divisor_power_sum(30, 3, table) == -6
    assert divisor_power_sum(1, 4, table) == 0


@pytest.mark.parametrize("k", range(1, 7))
def test_divisor_power_sum_matches_deltas(table, k):
    deltas = delta_table(k)
    for n in range(1, N + 1):
        assert divisor_power_sum(n, k, table) == deltas[table.omega_of(n)]


def test_generating_identity(table):
    assert generating_identity_check(6, 2, table) == (1, 1)
    assert generating_identity_check(30, 0, table) == (1, 1)
    assert generating_identity_check(30, 1, table) == (0, 0)
    lhs, rhs = generating_identity_check(210, Fraction(2, 3), table)
    assert lhs == rhs == Fraction(1, 81)
    with pytest.raises(UnitArgumentError):
        generating_identity_check(1, 2, table)


def test_generating_identity_on_random_pairs(table):
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, N, endpoint=True))
        z = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
        lhs, rhs = generating_identity_check(n, z, table)
        assert lhs == rhs


def test_delta_table():
    assert delta_table(1).deltas == (-1,)
    assert delta_table(2).deltas == (-1, 2)
    assert delta_table(3).deltas == (-1, 6, -6)
    for k in range(1, 10):
        row = delta_table(k)
        assert row[k] == (-1) ** k * factorial(k)
        for j in range(1, k + 1):
            assert row[j] == (-1) ** j * factorial(j) * int(stirling(k, j))


def test_cross_validate_deltas(table):
    for k in range(1, 7):
        assert cross_validate_deltas(k, table) == []


def test_stirling_rows():
    assert stirling_row(1) == [1]
    assert stirling_row(3) == [1, 3, 1]
    assert stirling_row(4) == [1, 7, 6, 1]
    for k in range(1, 21):
        assert stirling_row(k) == [int(stirling(k, j)) for j in range(1, k + 1)]


def test_stirling_identities():
    for k in range(2, 21):
        assert alternating_stirling_sum(k) == 0
    for k in range(1, 21):
        assert stirling_identity_holds(k)
    with pytest.raises(UnsupportedOrderError):
        alternating_stirling_sum(1)
    with pytest.raises(UnsupportedOrderError):
        stirling_row(21)


def test_falling():
    assert falling(5, 0) == 1
    assert falling(5, 2) == 20
    assert falling(2, 3) == 0


def test_omega_power_decomposition():
    assert omega_power_decomposition(2, 5) == 25
    assert omega_power_decomposition(3, 0) == 0
    assert omega_power_decomposition(3, 4) == 64
    assert omega_power_decomposition(0, 0) == 1
    for k in range(0, 21):
        for m in range(0, 10):
            assert omega_power_decomposition(k, m) == m**k


def test_oracle_agreement_on_omega(table):
    for n in range(1, N + 1):
        assert table.omega_of(n) == oracles.omega(n)
