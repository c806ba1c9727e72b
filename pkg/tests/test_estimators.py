import math
from fractions import Fraction

import numpy as np
import pytest

from ctspectra.exceptions import SpectraConfigError
from ctspectra.kernels import HanningKernel, Kernel, RectangularKernel
from ctspectra.numerics import integrate_interval
from ctspectra.process_models import covariance
from ctspectra.sampling_sim import (
    SamplePath,
    SamplingScheme,
    SchemeKind,
    SimSeed,
    poisson_times,
    regular_grid,
    simulate_regular,
)
from ctspectra.estimators import (
    EstimatorConfig,
    optimal_rates_regular,
    optimal_window_given_rate,
    optimal_window_poisson,
    periodogram,
    poisson_smoothed_estimator,
    poisson_window,
    regular_config,
    regular_rate_exponents,
    regular_smoothed_periodogram,
    sample_autocovariance,
    sample_autocovariances,
)


class GaussKernel(Kernel):

    name = "gauss"
    char_exponent = 2.0

    def _evaluate(self, x):

        return np.exp(-0.5 * x**2)


def regular_path(values, rho):

    values = np.asarray(values, dtype=float)

    return SamplePath(regular_grid(values.size, rho), values, SamplingScheme.regular(rho))


def test_estimator_config_validation(hanning):

    config = EstimatorConfig(n=10, rho_n=1.0, b_n=0.1, kernel=hanning)

    assert config.snapshot() == {
        "n": 10,
        "rho_n": 1.0,
        "b_n": 0.1,
        "kernel": "hanning",
        "q": 2,
        "p": 8,
    }

    with pytest.raises(SpectraConfigError):
        EstimatorConfig(n=1, rho_n=1.0, b_n=0.1, kernel=hanning)

    with pytest.raises(SpectraConfigError):
        EstimatorConfig(n=10, rho_n=0.0, b_n=0.1, kernel=hanning)

    with pytest.raises(SpectraConfigError):
        EstimatorConfig(n=10, rho_n=1.0, b_n=-0.1, kernel=hanning)


def test_estimator_config_warns_about_wide_window(hanning, capsys):

    EstimatorConfig(n=10, rho_n=2.0, b_n=0.6, kernel=hanning)

    assert "not small" in capsys.readouterr().out


def test_sample_autocovariance_of_constant_series():

    values = np.full(4, 2.0)

    assert sample_autocovariance(values, 1) == pytest.approx(3.0)
    assert sample_autocovariance(values, -1) == pytest.approx(3.0)
    assert sample_autocovariance(values, 0) == pytest.approx(4.0)
    assert sample_autocovariance(values, 3) == pytest.approx(1.0)

    with pytest.raises(SpectraConfigError):
        sample_autocovariance(values, 4)


def test_sample_autocovariances_match_single_lags():

    values = np.random.default_rng(0).standard_normal(50)
    gammas = sample_autocovariances(values, 10)

    assert gammas.shape == (11,)
    for lag in range(11):
        assert gammas[lag] == pytest.approx(sample_autocovariance(values, lag), rel=1e-12)

    with pytest.raises(SpectraConfigError):
        sample_autocovariances(values, 50)


def test_sample_autocovariance_is_nearly_unbiased(car_model):

    estimates = np.array([
        sample_autocovariance(simulate_regular(car_model, 64, 1.0, SimSeed(3, rep)).values, 2)
        for rep in range(2000)
    ])

    expected = (1 - 2 / 64) * covariance(car_model, 2.0)
    error = estimates.std() / math.sqrt(estimates.size)

    assert abs(estimates.mean() - expected) <= 4 * error


def test_regular_estimator_matches_direct_sum(hanning):

    rho, b_n = 1.5, 0.05
    values = np.random.default_rng(3).standard_normal(128)
    path = regular_path(values, rho)
    config = EstimatorConfig(n=128, rho_n=rho, b_n=b_n, kernel=hanning)
    lambdas = np.linspace(-math.pi * rho, math.pi * rho, 41)

    estimate = regular_smoothed_periodogram(path, config, lambdas)

    lags = np.arange(-127, 128)
    gammas = np.array([sample_autocovariance(values, lag) for lag in lags])
    phases = np.exp(-1j * np.outer(lambdas, lags) / rho)
    direct = (phases @ (gammas * hanning(b_n * lags))).real / (2 * math.pi * rho)

    np.testing.assert_allclose(estimate.values, direct, rtol=1e-12, atol=1e-14)
    assert estimate.scheme is SchemeKind.REGULAR
    assert estimate.config["b_n"] == b_n


def test_regular_estimator_is_even_and_band_limited(hanning):

    rho = 2.0
    path = regular_path(np.random.default_rng(4).standard_normal(64), rho)
    config = EstimatorConfig(n=64, rho_n=rho, b_n=0.1, kernel=hanning)
    lambdas = np.array([0.3, 1.7, math.pi * rho])

    positive = regular_smoothed_periodogram(path, config, lambdas).values
    negative = regular_smoothed_periodogram(path, config, -lambdas).values
    outside = regular_smoothed_periodogram(path, config, np.array([7.0, -10.0, 2 * math.pi * rho]))

    np.testing.assert_allclose(positive, negative, rtol=1e-13, atol=1e-15)
    assert positive[-1] != 0.0
    np.testing.assert_array_equal(outside.values, 0.0)


def test_regular_estimator_checks_the_path(hanning):

    path = regular_path(np.zeros(10), 1.0)
    config = EstimatorConfig(n=10, rho_n=2.0, b_n=0.1, kernel=hanning)

    with pytest.raises(SpectraConfigError):
        regular_smoothed_periodogram(path, config, np.array([0.0]))

    with pytest.raises(SpectraConfigError):
        regular_smoothed_periodogram(
            regular_path(np.zeros(10), 2.0), config, np.array([])
        )


def test_demeaning_removes_constant_offset(hanning):

    values = np.random.default_rng(5).standard_normal(100)
    config = EstimatorConfig(n=100, rho_n=1.0, b_n=0.1, kernel=hanning, demean=True)
    lambdas = np.linspace(0.0, 3.0, 7)

    shifted = regular_smoothed_periodogram(regular_path(values + 5.0, 1.0), config, lambdas)
    plain = regular_smoothed_periodogram(regular_path(values, 1.0), config, lambdas)

    np.testing.assert_allclose(shifted.values, plain.values, rtol=1e-9, atol=1e-12)


def test_periodogram_of_constant_series(hanning):

    a, n, rho = 1.5, 16, 2.0
    config = EstimatorConfig(n=n, rho_n=rho, b_n=0.1, kernel=hanning)

    value = periodogram(regular_path(np.full(n, a), rho), config, 0.0)

    assert isinstance(value, float)
    assert value == pytest.approx(n * a**2 / (2 * math.pi * rho), rel=1e-12)


def test_periodogram_parseval(hanning):

    rho = 1.5
    values = np.random.default_rng(6).standard_normal(64)
    path = regular_path(values, rho)
    config = EstimatorConfig(n=64, rho_n=rho, b_n=0.1, kernel=hanning)

    ordinates = periodogram(path, config, np.linspace(-10.0, 10.0, 201))
    total = integrate_interval(
        lambda lam: periodogram(path, config, lam), -math.pi * rho, math.pi * rho
    )

    assert np.all(ordinates >= 0)
    assert total == pytest.approx(np.mean(values**2), rel=1e-6)


def naive_poisson_estimate(times, values, b_n, rho, kernel, lambdas):

    n = times.size
    sums = np.zeros_like(lambdas)
    for i in range(1, n):
        for j in range(n - i):
            gap = times[j + i] - times[j]
            sums += values[j] * values[j + i] * kernel(b_n * gap) * np.cos(lambdas * gap)

    return sums / (math.pi * rho * n)


def test_poisson_estimator_matches_naive_sum(hanning):

    rho, b_n = 1.0, 0.5
    times = poisson_times(200, rho, SimSeed(8))
    values = np.random.default_rng(8).standard_normal(200)
    path = SamplePath(times, values, SamplingScheme.poisson(rho))
    lambdas = np.linspace(0.0, 3.0, 13)

    estimate = poisson_smoothed_estimator(path, b_n, rho, hanning, lambdas)
    naive = naive_poisson_estimate(times, values, b_n, rho, hanning, lambdas)

    np.testing.assert_allclose(estimate.values, naive, rtol=1e-12, atol=1e-14)
    assert estimate.scheme is SchemeKind.POISSON
    assert estimate.config == {"n": 200, "rho": rho, "b_n": b_n, "kernel": "hanning"}


def test_poisson_estimator_single_pair():

    rho, b_n, lam = 2.0, 0.25, 0.8
    times = np.array([0.5, 1.7])
    values = np.array([1.3, -0.4])
    path = SamplePath(times, values, SamplingScheme.poisson(rho))
    kernel = HanningKernel()

    estimate = poisson_smoothed_estimator(path, b_n, rho, kernel, np.array([lam]))
    gap = 1.2
    expected = values[0] * values[1] * kernel(b_n * gap) * math.cos(lam * gap) / (2 * math.pi * rho)

    assert estimate.values[0] == pytest.approx(expected, rel=1e-12)


def test_poisson_estimator_without_close_pairs():

    path = SamplePath(np.array([1.0, 10.0]), np.ones(2), SamplingScheme.poisson(1.0))

    estimate = poisson_smoothed_estimator(path, 1.0, 1.0, RectangularKernel(), np.array([0.0, 1.0]))

    np.testing.assert_array_equal(estimate.values, 0.0)


def test_poisson_estimator_rejects_bad_input(hanning):

    poisson = SamplePath(np.array([1.0, 2.0]), np.ones(2), SamplingScheme.poisson(1.0))

    with pytest.raises(SpectraConfigError):
        poisson_smoothed_estimator(poisson, 0.5, 1.0, GaussKernel(), np.array([0.0]))

    with pytest.raises(SpectraConfigError):
        poisson_smoothed_estimator(regular_path(np.ones(2), 1.0), 0.5, 1.0, hanning, np.array([0.0]))

    with pytest.raises(SpectraConfigError):
        poisson_smoothed_estimator(poisson, 0.5, 3.0, hanning, np.array([0.0]))


def test_regular_rate_exponents():

    assert regular_rate_exponents(8, 2) == (Fraction(1, 21), Fraction(5, 21))
    assert regular_rate_exponents(2, 2) == (Fraction(1, 6), Fraction(1, 3))

    with pytest.raises(SpectraConfigError):
        regular_rate_exponents(1, 2)


def test_optimal_rates_regular():

    rho, b_n = optimal_rates_regular(100, 8, 2, 1.0, 0.25)

    assert rho == pytest.approx(1.2452, abs=1e-4)
    assert b_n == pytest.approx(0.08351, abs=1e-5)

    rho_large, b_large = optimal_rates_regular(10_000, 8, 2, 1.0, 0.25)
    assert rho_large > rho
    assert rho_large * b_large < rho * b_n

    with pytest.raises(SpectraConfigError):
        optimal_rates_regular(100, 8, 2, 0.0, 0.25)


def test_optimal_window_given_rate():

    assert optimal_window_given_rate(100_000, 2.0, 2) == pytest.approx(0.0574, abs=1e-4)
    assert optimal_window_given_rate(100_000, 2.0, 2, constant=3.0) == pytest.approx(3 * 0.0574, abs=3e-4)

    with pytest.raises(SpectraConfigError):
        optimal_window_given_rate(1, 2.0, 2)


def test_optimal_window_poisson():

    assert optimal_window_poisson(100, 2, 0.25) == pytest.approx(0.09953, abs=1e-5)
    assert optimal_window_poisson(1, 2, 0.25) == 0.25
    assert optimal_window_poisson(100, 2.5, 0.25) == optimal_window_poisson(100, 2, 0.25)

    with pytest.raises(SpectraConfigError):
        optimal_window_poisson(100, 2, 0.0)


def test_rate_configs(hanning):

    regular = regular_config(100, hanning)
    poisson = poisson_window(100, hanning, 1.0)

    assert (regular.rho_n, regular.b_n) == pytest.approx((1.2452, 0.08351), abs=1e-4)
    assert poisson.rho_n == 1.0
    assert poisson.b_n == pytest.approx(0.09953, abs=1e-5)
