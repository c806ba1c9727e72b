"""Continuous time autoregressive CAR(p) models with distinct real roots

The process is X(t) = sigma * integral of h(t - s) dW(s) over (-inf, t], with impulse
response h(t) = sum_i c_i exp(-alpha_i t) on t >= 0. The coefficients c_i make
h(0) = ... = h^(p-2)(0) = 0 and h^(p-1)(0) = 1, which gives the rational spectral density
sigma^2 / (2 pi prod_i (lambda^2 + alpha_i^2)).
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy import linalg

from ctspectra.constants import BURN_IN_RESOLUTION, COEFF_TOL
from ctspectra.exceptions import SpectraConfigError, SpectraModelError


ArrayLike = Union[float, np.ndarray, list[float]]


@dataclass(frozen=True)
class ImpulseCoeffs:
    """Coefficients c_i of the impulse response, ordered like the model alphas

    :type c: tuple
    :param c: Coefficients
    """

    c: tuple[float, ...]

    def as_array(self) -> np.ndarray:

        return np.array(self.c, dtype=float)


@dataclass(frozen=True)
class CarModel:
    """CAR(p) process with distinct positive decay rates

    Raises SpectraModelError if a rate is not positive, rates repeat or sigma <= 0.

    :type alphas: tuple
    :param alphas: Decay rates alpha_i (1/time)
    :type sigma: float
    :param sigma: Driving noise scale
    """

    alphas: tuple[float, ...]
    sigma: float = 1.0

    def __post_init__(self) -> None:

        object.__setattr__(self, "alphas", tuple(float(alpha) for alpha in self.alphas))

        if not self.alphas:
            raise SpectraModelError("A CAR model needs at least one decay rate!")

        if any(not math.isfinite(alpha) or alpha <= 0 for alpha in self.alphas):
            raise SpectraModelError(f"Decay rates must be positive: {self.alphas}")

        if len(set(self.alphas)) != len(self.alphas):
            raise SpectraModelError(
                f"Decay rates must be pairwise distinct, got {self.alphas}"
            )

        if not math.isfinite(self.sigma) or self.sigma <= 0:
            raise SpectraModelError(f"sigma must be positive, got {self.sigma}")

    @property
    def order(self) -> int:

        return len(self.alphas)

    @cached_property
    def coeffs(self) -> ImpulseCoeffs:

        return solve_impulse_coeffs(self)

    @cached_property
    def covariance_weights(self) -> np.ndarray:
        """Weights w_j with C(tau) = sigma^2 sum_j w_j exp(-alpha_j |tau|)

        w_j = c_j sum_i c_i / (alpha_i + alpha_j); grouping the double sum this way keeps
        the terms of order one instead of order max(c)^2.
        """

        alphas = np.array(self.alphas)
        c = self.coeffs.as_array()
        pair_sums = alphas[:, None] + alphas[None, :]

        return c * (c[None, :] / pair_sums).sum(axis=1)

    def __str__(self) -> str:

        rates = ", ".join(f"{alpha:g}" for alpha in self.alphas)

        return f"CAR({self.order}) alphas=({rates}) sigma={self.sigma:g}"


def model_from_values(alphas: list[float], sigma: float = 1.0) -> CarModel:
    """Build a model from plain values, as read from a config file

    :type alphas: list
    :param alphas: Decay rates
    :type sigma: float
    :param sigma: Driving noise scale
    :rtype: CarModel
    :returns: Validated model
    """

    return CarModel(alphas=tuple(alphas), sigma=float(sigma))


def solve_impulse_coeffs(model: CarModel) -> ImpulseCoeffs:
    """Solve the moment system sum_i c_i (-alpha_i)^k = delta_{k, p-1}

    The p x p system is solved through a dense LU factorization. Raises
    SpectraModelError if the system is singular (repeated rates).

    :type model: CarModel
    :param model: Process model
    :rtype: ImpulseCoeffs
    :returns: Impulse response coefficients
    """

    alphas = np.array(model.alphas)
    order = len(alphas)

    moments = np.vander(-alphas, order, increasing=True).T
    rhs = np.zeros(order)
    rhs[-1] = 1.0

    try:
        lu_piv = linalg.lu_factor(moments, check_finite=True)
        c = linalg.lu_solve(lu_piv, rhs)
    except (linalg.LinAlgError, ValueError) as exp:
        raise SpectraModelError(f"Moment system is singular for {model}") from exp

    residual = np.abs(moments @ c - rhs).max()
    if not np.all(np.isfinite(c)) or residual > COEFF_TOL:
        raise SpectraModelError(
            f"Moment system is ill-conditioned for {model} (residual {residual:.3g})"
        )

    return ImpulseCoeffs(c=tuple(float(value) for value in c))


def impulse_response(model: CarModel, coeffs: ImpulseCoeffs, t: ArrayLike) -> ArrayLike:
    """Evaluate h(t) = sum_i c_i exp(-alpha_i t) for t >= 0 and 0 for t < 0

    :type model: CarModel
    :param model: Process model
    :type coeffs: ImpulseCoeffs
    :param coeffs: Coefficients from solve_impulse_coeffs
    :type t: float or array
    :param t: Time
    :rtype: float or array
    :returns: Impulse response
    """

    t_arr = np.asarray(t, dtype=float)
    alphas = np.array(model.alphas)

    positive = np.maximum(t_arr, 0.0)
    values = np.exp(-np.multiply.outer(positive, alphas)) @ coeffs.as_array()
    values = np.where(t_arr < 0, 0.0, values)

    return _as_output(values, t)


def covariance(model: CarModel, tau: ArrayLike) -> ArrayLike:
    """Autocovariance C(tau) = sigma^2 sum_ij c_i c_j exp(-alpha_j |tau|) / (alpha_i + alpha_j)

    :type model: CarModel
    :param model: Process model
    :type tau: float or array
    :param tau: Time lag
    :rtype: float or array
    :returns: Covariance at the given lags
    """

    lags = np.abs(np.asarray(tau, dtype=float))
    alphas = np.array(model.alphas)

    values = model.sigma**2 * (
        np.exp(-np.multiply.outer(lags, alphas)) @ model.covariance_weights
    )

    return _as_output(values, tau)


def spectral_density(model: CarModel, lam: ArrayLike) -> ArrayLike:
    """Spectral density sigma^2 / (2 pi prod_i (lambda^2 + alpha_i^2))

    :type model: CarModel
    :param model: Process model
    :type lam: float or array
    :param lam: Angular frequency (rad/time)
    :rtype: float or array
    :returns: Power per rad/time
    """

    lam_sq = np.square(np.asarray(lam, dtype=float))
    alphas_sq = np.square(np.array(model.alphas))

    denominator = np.prod(np.add.outer(lam_sq, alphas_sq), axis=-1)
    values = model.sigma**2 / (2 * math.pi * denominator)

    return _as_output(values, lam)


def tail_variance(model: CarModel, t: float) -> float:
    """Var(X_0(t) - X(t)) for the path started from zero at time 0

    Equals sigma^2 times the integral of h(s)^2 over [t, inf).

    :type model: CarModel
    :param model: Process model
    :type t: float
    :param t: Elapsed time, t >= 0
    :rtype: float
    :returns: Residual variance
    """

    if t < 0:
        raise SpectraConfigError(f"Elapsed time must be nonnegative, got {t}")

    alphas = np.array(model.alphas)
    c = model.coeffs.as_array()
    pair_sums = alphas[:, None] + alphas[None, :]

    terms = np.outer(c, c) * np.exp(-pair_sums * t) / pair_sums

    return float(model.sigma**2 * terms.sum())


def burn_in_time(model: CarModel, tol: float) -> float:
    """Smallest time (to within 1e-3) after which the tail variance is below tol

    Bisection keeps tail_variance(lower) >= tol > tail_variance(upper) and returns the
    upper end, so tail_variance(t0 - 1e-3) >= tol holds for the result t0.

    :type model: CarModel
    :param model: Process model
    :type tol: float
    :param tol: Variance threshold, 0 < tol < C(0)
    :rtype: float
    :returns: Burn-in time t0
    """

    stationary_variance = covariance(model, 0.0)
    if not 0 < tol < stationary_variance:
        raise SpectraConfigError(
            f"Burn-in tolerance must lie in (0, C(0)={stationary_variance:.6g}), got {tol}"
        )

    lower, upper = 0.0, 1.0
    while tail_variance(model, upper) >= tol:
        lower, upper = upper, 2 * upper

    while upper - lower > BURN_IN_RESOLUTION:
        middle = 0.5 * (lower + upper)
        if tail_variance(model, middle) < tol:
            upper = middle
        else:
            lower = middle

    return upper


def tail_decay_constant(model: CarModel) -> tuple[int, float]:
    """Decay exponent p and constant A with lambda^p phi(lambda) -> A

    :type model: CarModel
    :param model: Process model
    :rtype: tuple
    :returns: (2 * order, sigma^2 / (2 pi))
    """

    return 2 * model.order, model.sigma**2 / (2 * math.pi)


def _as_output(values: np.ndarray, template: ArrayLike) -> ArrayLike:
    """Return a float for scalar input and an array otherwise"""

    if np.ndim(template) == 0:
        return float(values)

    return values
