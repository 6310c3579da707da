import math

import numpy as np
import pytest

from factor_duality.asymptotics import (
    MODEL_PRESETS,
    ModelForm,
    build_rho_table,
    check_step,
    dickman_rho,
    fit_leading_term,
    li_series,
    parse_model,
    rho_step_halving_error,
    smooth_vs_rho,
)
from factor_duality.counting import prime_pi, psi_smooth
from factor_duality.errors import (
    AlphaOutOfRangeError,
    StepTooCoarseError,
    UnderdeterminedFitError,
    UnknownModelError,
    UnsupportedOrderError,
)
from factor_duality.partial_sums import (
    PartialSumSeries,
    Selector,
    SumKind,
    compute_series,
    default_checkpoints,
)
from factor_duality.sieve import Sweep, primes_up_to


def test_rho_on_first_interval():
    assert dickman_rho(0) == 1
    assert dickman_rho(0.7) == 1
    assert dickman_rho(1) == 1


def test_rho_closed_form_on_second_interval():
    assert abs(dickman_rho(2) - (1 - math.log(2))) < 1e-10
    for alpha in (1.3, 1.5, 1.77):
        assert dickman_rho(alpha) == pytest.approx(1 - math.log(alpha), abs=1e-10)


def test_rho_known_values():
    assert dickman_rho(3) == pytest.approx(0.0486083882911316, abs=1e-9)
    assert dickman_rho(4) == pytest.approx(0.00491092564776, abs=1e-10)


def test_rho_monotone():
    table = build_rho_table(10)
    after_one = table.values[table.points_per_unit :]
    assert np.all(np.diff(after_one) <= 0)
    assert np.all(table.values > 0)
    assert table.alpha_max == 10


def test_rho_step_halving():
    assert rho_step_halving_error(10) < 1e-9
    coarse = build_rho_table(3, 1 / 64)
    fine = build_rho_table(3, 1 / 256)
    assert dickman_rho(3, 1 / 256) == pytest.approx(fine.values[-1])
    assert abs(coarse.values[-1] - fine.values[-1]) < 1e-8


def test_rho_table_between_grid_points():
    table = build_rho_table(5)
    for alpha in (2.5, 3.01, 4.999):
        below = table(math.floor(alpha * 64) / 64)
        above = table(math.ceil(alpha * 64) / 64)
        assert above <= table(alpha) <= below


def test_rho_errors():
    with pytest.raises(AlphaOutOfRangeError):
        dickman_rho(51)
    with pytest.raises(AlphaOutOfRangeError):
        dickman_rho(-1)
    with pytest.raises(AlphaOutOfRangeError):
        build_rho_table(4)(4.5)
    with pytest.raises(StepTooCoarseError):
        check_step(0.1)
    with pytest.raises(StepTooCoarseError):
        check_step(0.015)
    assert check_step(0.015625) == 64
    assert check_step(1 / 100) == 100


def test_smooth_vs_rho():
    count, prediction, ratio = smooth_vs_rho(1000, 1000)
    assert (count, prediction, ratio) == (1000, 1000.0, 1.0)
    count, prediction, ratio = smooth_vs_rho(10**4, 10)
    assert count == psi_smooth(10**4, 10).count
    assert prediction == pytest.approx(10**4 * dickman_rho(4))
    assert ratio == pytest.approx(count / prediction)
    count, _, _ = smooth_vs_rho(10**4, 100)
    large = primes_up_to(10**4)
    assert count == 10**4 - int(np.sum(10**4 // large[large > 100]))


def test_li_series():
    x = math.exp(10)
    assert li_series(x, 1) == pytest.approx(x / 10)
    log_x = math.log(10**6)
    assert li_series(10**6, 3) == pytest.approx(
        10**6 / log_x + 10**6 / log_x**2 + 2 * 10**6 / log_x**3,
    )
    for nu in range(1, 10):
        step = li_series(10**6, nu + 1) - li_series(10**6, nu)
        assert step == pytest.approx(math.factorial(nu) * 10**6 / log_x ** (nu + 1))


def test_li_series_approaches_prime_pi():
    primes = prime_pi(10**6, Sweep(segment_size=10**5, threads=2))
    assert primes == 78498
    gaps = [abs(li_series(10**6, nu) - primes) for nu in range(1, 5)]
    assert gaps == sorted(gaps, reverse=True)


def test_li_series_errors():
    with pytest.raises(UnsupportedOrderError):
        li_series(50, 1)
    with pytest.raises(UnsupportedOrderError):
        li_series(1000, 0)
    with pytest.raises(UnsupportedOrderError):
        li_series(1000, 11)


def test_parse_model():
    for name, model in MODEL_PRESETS.items():
        assert parse_model(name) is model
    model = parse_model("x*1:2,0:2")
    assert model.x_factor
    assert model.terms == ((1, 2), (0, 2))
    assert model.descriptor == "x*1:2,0:2"
    assert str(parse_model("1:1,0:1")) == "1:1,0:1"
    for descriptor in ("", "abc", "1:-1", "1:1,1:1", "1:2:3"):
        with pytest.raises(UnknownModelError):
            parse_model(descriptor)


def synthetic_series(model: ModelForm, coefficients, x_max=10**7) -> PartialSumSeries:
    checkpoints = default_checkpoints(x_max)
    x = np.array(checkpoints, dtype=float)
    values = (model.basis(x) @ np.array(coefficients)).tolist()
    return PartialSumSeries(
        kind=SumKind(Selector.m_omega_k, k=1),
        checkpoints=checkpoints,
        values=values,
    )


@pytest.mark.parametrize(
    "model,coefficients",
    [
        (parse_model("0:1,0:2"), [-1.0, 0.37]),
        (MODEL_PRESETS["loglog-over-log"], [2.0, -1.25]),
        (MODEL_PRESETS["x-loglog-over-log2"], [-2.0, 0.8]),
        (MODEL_PRESETS["constant"], [0.125]),
    ],
    ids=str,
)
def test_fit_recovers_synthetic_coefficients(model, coefficients):
    series = synthetic_series(model, coefficients)
    report = fit_leading_term(series, model)
    assert report.coefficients == pytest.approx(coefficients, abs=1e-6)
    assert report.checkpoints == series.checkpoints
    scale = max(abs(v) for v in series.values)
    assert report.residual_norm <= 1e-9 * scale
    assert report.predict([10**5]) == pytest.approx(
        model.basis(np.array([1e5])) @ np.array(coefficients),
    )


def test_fit_window():
    model = MODEL_PRESETS["inverse-log"]
    series = synthetic_series(model, [-1.0])
    report = fit_leading_term(series, model, window=(5000, 10**7))
    assert report.checkpoints[0] == 5623
    assert report.checkpoints[-1] == 10**7
    assert report.coefficients == pytest.approx([-1.0], abs=1e-6)


def test_fit_underdetermined():
    model = MODEL_PRESETS["inverse-log"]
    # two decades only
    with pytest.raises(UnderdeterminedFitError):
        fit_leading_term(synthetic_series(model, [1.0], x_max=10**4), model)
    series = synthetic_series(model, [1.0])
    with pytest.raises(UnderdeterminedFitError):
        fit_leading_term(series, model, window=(10**6, 10**7))


def test_fit_on_computed_series():
    kind = SumKind(Selector.m_omega_k, k=1)
    with pytest.raises(UnderdeterminedFitError):
        fit_leading_term(compute_series(kind, 10**4), MODEL_PRESETS["inverse-log"])
    series = compute_series(kind, 2 * 10**5)
    report = fit_leading_term(series, MODEL_PRESETS["inverse-log"])
    assert len(report.residuals) == len(report.checkpoints) == 15
    assert report.kind == "m_omega_k(k=1)"


@pytest.mark.big
def test_smooth_vs_rho_large(calibration):
    window = calibration["smooth_vs_rho"]
    x, y = window["x"], window["y"]
    count, _, ratio = smooth_vs_rho(x, y, sweep=Sweep(threads=4))
    # y = sqrt(x): at most one prime factor above y
    large = primes_up_to(x)
    large = large[large > y]
    assert count == x - int(np.sum(x // large))
    low, high = window["ratio"]
    assert low <= ratio <= high


@pytest.mark.big
def test_fit_m_omega_leading_coefficient():
    series = compute_series(
        SumKind(Selector.m_omega_k, k=1),
        10**7,
        sweep=Sweep(threads=4),
    )
    report = fit_leading_term(series, MODEL_PRESETS["inverse-log"])
    assert -2 < report.coefficients[0] < 0
