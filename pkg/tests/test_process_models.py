import math

import numpy as np
import pytest

from ctspectra.exceptions import SpectraConfigError, SpectraModelError
from ctspectra.numerics import integrate_half_line, integrate_real_line
from ctspectra.process_models import (
    CarModel,
    burn_in_time,
    covariance,
    impulse_response,
    model_from_values,
    solve_impulse_coeffs,
    spectral_density,
    tail_decay_constant,
    tail_variance,
)


def closed_form_coeffs(alphas):

    return [
        1.0 / math.prod(alpha_j - alpha_i for alpha_j in alphas if alpha_j != alpha_i)
        for alpha_i in alphas
    ]


def test_coeffs_match_closed_form(car_model):

    coeffs = solve_impulse_coeffs(car_model)

    assert coeffs.c == pytest.approx(closed_form_coeffs(car_model.alphas), rel=1e-9)
    assert coeffs.c == pytest.approx([166.6667, -500.0, 500.0, -166.6667], rel=1e-5)


def test_first_order_coeff_is_one(ou_model):

    assert solve_impulse_coeffs(ou_model).c == pytest.approx((1.0,))


def test_coeffs_sum_to_zero_for_higher_order(car_model):

    assert sum(car_model.coeffs.c) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize(
    "alphas, sigma",
    [
        ((0.5, 0.5), 1.0),
        ((0.5, -1.0), 1.0),
        ((0.0,), 1.0),
        ((), 1.0),
        ((0.5,), 0.0),
        ((0.5,), -2.0),
    ],
)
def test_invalid_models_raise(alphas, sigma):

    with pytest.raises(SpectraModelError):
        CarModel(alphas, sigma)


def test_model_from_values():

    model = model_from_values([1, 2], 3)

    assert model.alphas == (1.0, 2.0)
    assert model.sigma == 3.0
    assert model.order == 2


def test_impulse_response_is_causal(car_model):

    coeffs = car_model.coeffs

    assert impulse_response(car_model, coeffs, -1.0) == 0.0
    assert impulse_response(car_model, coeffs, 0.0) == pytest.approx(0.0, abs=1e-9)
    assert isinstance(impulse_response(car_model, coeffs, 1.0), float)
    assert impulse_response(car_model, coeffs, np.array([-1.0, 1.0])).shape == (2,)


def test_covariance_is_energy_of_impulse_response(car_model):

    coeffs = car_model.coeffs

    energy = integrate_half_line(lambda t: impulse_response(car_model, coeffs, t) ** 2)

    assert covariance(car_model, 0.0) == pytest.approx(energy, rel=1e-6)


def test_covariance_is_lagged_impulse_product(car_model):

    coeffs = car_model.coeffs
    tau = 1.5

    product = integrate_half_line(
        lambda s: impulse_response(car_model, coeffs, s) * impulse_response(car_model, coeffs, s + tau)
    )

    assert covariance(car_model, tau) == pytest.approx(product, rel=1e-6)


def test_covariance_is_even(car_model):

    lags = np.linspace(0.0, 10.0, 11)

    np.testing.assert_array_equal(covariance(car_model, lags), covariance(car_model, -lags))


def test_covariance_at_zero_integrates_spectral_density(car_model):

    total = integrate_real_line(lambda lam: spectral_density(car_model, lam))

    assert covariance(car_model, 0.0) == pytest.approx(total, rel=1e-6)


def test_ou_covariance_closed_form(ou_model):

    # C(tau) = exp(-alpha |tau|) / (2 alpha)
    assert covariance(ou_model, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_sigma_scales_covariance():

    unit = CarModel((0.5, 1.5), 1.0)
    scaled = CarModel((0.5, 1.5), 3.0)

    assert covariance(scaled, 0.7) == pytest.approx(9 * covariance(unit, 0.7), rel=1e-12)
    assert spectral_density(scaled, 0.7) == pytest.approx(9 * spectral_density(unit, 0.7), rel=1e-12)


def test_spectral_density_at_zero(car_model):

    expected = 1 / (2 * math.pi * (0.65 * 0.75 * 0.85 * 0.95) ** 2)

    assert spectral_density(car_model, 0.0) == pytest.approx(expected, rel=1e-12)
    assert spectral_density(car_model, 0.0) == pytest.approx(1.0270, abs=1e-3)


def test_spectral_density_tail(car_model):

    lambdas = np.array([10.0, 100.0, 1000.0])
    p, constant = tail_decay_constant(car_model)
    scaled = lambdas**p * spectral_density(car_model, lambdas) / constant

    assert p == 8
    assert constant == pytest.approx(1 / (2 * math.pi))
    assert scaled[0] == pytest.approx(1.0, rel=0.05)
    assert np.all(np.diff(scaled) > 0)
    assert scaled[-1] == pytest.approx(1.0, rel=1e-5)


def test_spectral_density_shape(car_model):

    assert isinstance(spectral_density(car_model, 1.0), float)
    assert spectral_density(car_model, np.zeros(3)).shape == (3,)


def test_tail_variance(car_model):

    coeffs = car_model.coeffs
    tail = integrate_half_line(lambda t: impulse_response(car_model, coeffs, t) ** 2, lower=5.0)

    assert tail_variance(car_model, 0.0) == pytest.approx(covariance(car_model, 0.0), rel=1e-8)
    assert tail_variance(car_model, 5.0) == pytest.approx(tail, rel=1e-6)
    assert tail_variance(car_model, 10.0) < tail_variance(car_model, 5.0)

    with pytest.raises(SpectraConfigError):
        tail_variance(car_model, -1.0)


def test_burn_in_time(car_model):

    t0 = burn_in_time(car_model, 1e-9)

    assert 15 < t0 < 35
    assert tail_variance(car_model, t0) < 1e-9
    assert tail_variance(car_model, t0 - 1e-3) >= 1e-9


def test_burn_in_grows_with_smaller_tolerance(car_model):

    assert burn_in_time(car_model, 5e-10) > burn_in_time(car_model, 1e-9)


@pytest.mark.parametrize("tol", [0.0, -1e-9, 10.0])
def test_burn_in_rejects_tolerance(car_model, tol):

    with pytest.raises(SpectraConfigError):
        burn_in_time(car_model, tol)


def test_covariance_matrices_are_positive_semidefinite(car_model):

    rng = np.random.default_rng(11)
    variance = covariance(car_model, 0.0)

    for _ in range(20):
        times = np.sort(rng.uniform(0.0, 30.0, size=rng.integers(2, 33)))
        gram = covariance(car_model, times[:, None] - times[None, :])
        assert np.linalg.eigvalsh(gram).min() >= -1e-8 * variance
