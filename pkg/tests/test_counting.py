import math

import numpy as np
import pytest

from factor_duality.counting import (
    equidist,
    omega_histogram,
    pi_k,
    prime_pi,
    psi_k,
    psi_smooth,
    repeat_count,
    weight_average,
)
from factor_duality.duality import PrimeWeight
from factor_duality.errors import (
    CeilingExceededError,
    InvalidResidueError,
    UnsupportedOrderError,
)
from factor_duality.sieve import UNIT, Sweep, build_table

from . import oracles

X = 10**4
BOUNDS = [2, 3, 5, 10, 30, 100]


def test_psi_smooth_examples():
    assert psi_smooth(30, 5).count == 18
    for x in (2, 17, 100, 1000):
        assert psi_smooth(x, x).count == x


def test_psi_k_example():
    # 1, the 25 primes and the 10 higher prime powers below 100
    assert psi_k(100, 1, 2).count == 36


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_psi_k_matches_oracle(k):
    for bound in BOUNDS:
        expected = sum(
            1 for n in range(1, X + 1) if oracles.kth_largest(n, k) <= bound
        )
        assert psi_k(X, bound, k, Sweep(segment_size=333)).count == expected


def test_pi_k_examples():
    assert pi_k(10, 0) == 1
    assert pi_k(10, 1) == 7
    assert pi_k(10, 2) == 2
    assert pi_k(10, 3) == 0
    for k in range(1, 5):
        assert pi_k(1, k) == 0


def test_omega_histogram():
    histogram = omega_histogram(X, Sweep(segment_size=97))
    assert sum(histogram) == X
    for r, count in enumerate(histogram):
        assert count == sum(1 for n in range(1, X + 1) if oracles.omega(n) == r)


def test_prime_pi():
    assert prime_pi(10) == 4
    assert prime_pi(10**4, Sweep(segment_size=1234, threads=2)) == 1229


def test_repeat_count_examples():
    # 4, 8, 9, 16 and 18; 12 and 20 have an exponent 1 at P_1
    assert repeat_count(20, 2) == 5
    assert repeat_count(3, 2) == 0


@pytest.mark.parametrize("k", [2, 3, 4])
def test_repeat_count_matches_oracle(k):
    expected = sum(1 for n in range(1, X + 1) if oracles.repeats_in_top(n, k))
    assert repeat_count(X, k, Sweep(segment_size=500)) == expected


def test_equidist_partition():
    for modulus in (2, 3, 4, 7):
        for k in (1, 2, 3):
            report = equidist(X, modulus, k)
            assert report.total == X - 1


def test_equidist_modulus_two():
    for x in (2, 10, 1000, 1024):
        report = equidist(x, 2, 1)
        powers_of_two = int(math.log2(x))
        assert report.counts[1] == x - 1 - powers_of_two
        assert report.counts[2] == powers_of_two
        assert report.unit == 0


@pytest.mark.parametrize("modulus", [3, 4, 5])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_equidist_matches_oracle(modulus, k):
    report = equidist(X, modulus, k, Sweep(segment_size=700, threads=2))
    for j in range(1, modulus + 1):
        expected = sum(
            1
            for n in range(2, X + 1)
            if (p := oracles.kth_largest(n, k)) != UNIT and p % modulus == j % modulus
        )
        assert report.counts[j] == expected
    assert report.unit == sum(
        1 for n in range(2, X + 1) if oracles.omega(n) < k
    )
    assert sorted(report.coprime_classes) == [
        j for j in range(1, modulus) if math.gcd(j, modulus) == 1
    ]


def test_equidist_report():
    report = equidist(10**4, 3, 1)
    assert report.phi == 2
    assert report.expected == 5000
    assert set(report.deviations) == {1, 2}
    assert report.relative_deviation < 0.1
    assert math.isnan(equidist(2, 3, 1).envelope)


def test_weight_average():
    assert weight_average(X, PrimeWeight.one(), 1) == pytest.approx((X - 1) / X)
    with_two = sum(1 for n in range(2, X + 1) if oracles.omega(n) >= 2)
    assert weight_average(X, PrimeWeight.one(), 2) == pytest.approx(with_two / X)
    indicator = PrimeWeight.residue_indicator(1, 4)
    expected = sum(1 for n in range(2, X + 1) if oracles.kth_largest(n, 1) % 4 == 1)
    assert weight_average(X, indicator, 1) == pytest.approx(expected / X)


def test_invalid_arguments():
    with pytest.raises(UnsupportedOrderError):
        psi_smooth(30, 1)
    with pytest.raises(UnsupportedOrderError):
        psi_smooth(30, 31)
    with pytest.raises(UnsupportedOrderError):
        psi_k(30, 0, 1)
    with pytest.raises(UnsupportedOrderError):
        repeat_count(30, 1)
    with pytest.raises(UnsupportedOrderError):
        pi_k(30, -1)
    with pytest.raises(InvalidResidueError):
        equidist(30, 1, 1)
    with pytest.raises(CeilingExceededError):
        prime_pi(101, Sweep(ceiling=100))



def log_envelope(x, power):
    """x (log log x)^power / log x"""
    log_x = math.log(x)
    return x * math.log(log_x) ** power / log_x


@pytest.mark.parametrize(
    "x", [10**4, 10**5, pytest.param(10**6, marks=pytest.mark.big)]
)
def test_repeat_rate_envelope(calibration, x):
    rate = calibration["repeat_rate"]
    assert x in rate["x"]
    k = rate["k"]
    count = repeat_count(x, k, Sweep(threads=2))
    squarefree = int(np.count_nonzero(build_table(1, x + 1).mu))
    assert count <= x - squarefree
    # every 4p with p an odd prime repeats its second largest prime
    assert count >= prime_pi(x // 4) - 1
    assert count <= rate["constant"] * log_envelope(x, k - 2)


@pytest.mark.parametrize("x", [10**5, pytest.param(10**6, marks=pytest.mark.big)])
def test_psi_k_bound_shape(calibration, x):
    shape = calibration["psi_k_shape"]
    assert x in shape["x"]
    k = shape["k"]
    sweep = Sweep(threads=2)
    fewer_factors = sum(omega_histogram(x, sweep)[:k])
    previous = 0
    for bound in shape["bounds"]:
        count = psi_k(x, bound, k, sweep).count - fewer_factors
        assert previous <= count
        assert count <= shape["constant"] * log_envelope(x, k - 2) * math.log(bound)
        previous = count


@pytest.mark.big
@pytest.mark.parametrize("modulus,k", [(3, 2), (3, 3), (4, 3), (5, 2)])
def test_equidist_relative_deviation_decreases(calibration, modulus, k):
    trend = calibration["equidist_trend"]
    (reference,) = [
        entry
        for entry in trend["relative_deviation"]
        if (entry["modulus"], entry["k"]) == (modulus, k)
    ]
    deviations = [
        equidist(x, modulus, k, Sweep(threads=4)).relative_deviation
        for x in trend["x"]
    ]
    assert all(a > b for a, b in zip(deviations, deviations[1:]))
    assert deviations == pytest.approx(reference["values"], abs=trend["tolerance"])
