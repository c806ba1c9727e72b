"""Leading-order bias, variance and MSE of both estimators

Every constant is obtained either in closed form or by adaptive quadrature of the
model covariance. The remainders of the asymptotic expansions are not evaluated;
exact_mean_regular and exact_mean_poisson give the finite sample means of the estimators for
comparison.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import special

from ctspectra.constants import ALIASING_TERMS, QUAD_ABS_TOL
from ctspectra.estimators import EstimatorConfig, exact_exponent
from ctspectra.exceptions import SpectraConfigError, SpectraTheoryError
from ctspectra.kernels import Kernel, characteristic_constant, l2_norm_sq
from ctspectra.numerics import cosine_transform, integrate_interval
from ctspectra.process_models import (
    CarModel,
    covariance,
    spectral_density,
    tail_decay_constant,
)
from ctspectra.writer import writer


Exponent = Union[int, float, Fraction]


@dataclass(frozen=True)
class BiasBreakdown:
    """Leading bias terms of the regular estimator

    :type smoothing_term: float
    :param smoothing_term: Term of order (rho_n b_n)^q
    :type truncation_term: float
    :param truncation_term: Term of order rho_n / n
    :type aliasing_term: float
    :param aliasing_term: Term of order rho_n^(-p)
    """

    smoothing_term: float
    truncation_term: float
    aliasing_term: float

    @property
    def total(self) -> float:

        return self.smoothing_term + self.truncation_term + self.aliasing_term


@dataclass(frozen=True)
class LimitConstants:
    """Limits of the scaled variance and bias under the optimal rates

    :type variance: float
    :param variance: Variance constant
    :type bias: float
    :param bias: Bias constant
    """

    variance: float
    bias: float

    @property
    def mse(self) -> float:

        return self.bias**2 + self.variance


@dataclass(frozen=True, eq=False)
class TheoryCurve:
    """Theoretical bias, variance and MSE over a frequency grid

    The three bias components are filled for the regular scheme only.
    """

    lambdas: np.ndarray
    bias_theory: np.ndarray
    var_theory: np.ndarray
    smoothing: Optional[np.ndarray] = None
    truncation: Optional[np.ndarray] = None
    aliasing: Optional[np.ndarray] = None

    @property
    def mse_theory(self) -> np.ndarray:

        return self.bias_theory**2 + self.var_theory


def fourier_weighted_cov(
    model: CarModel, w: Exponent, lam: float, tol: float = QUAD_ABS_TOL
) -> float:
    """Integral of |t|^w C(t) exp(-i t lambda) over the real line

    By evenness this is 2 times the cosine transform of t^w C(t) over [0, inf).
    Results are cached per (model, w, lambda, tol).

    :type model: CarModel
    :param model: Process model
    :type w: float
    :param w: Moment exponent, w >= 0
    :type lam: float
    :param lam: Angular frequency
    :type tol: float
    :param tol: Absolute quadrature tolerance
    :rtype: float
    :returns: Value of the weighted transform
    """

    if w < 0:
        raise SpectraConfigError(f"Moment exponent must be nonnegative, got {w}")

    return _fourier_weighted_cov(model, float(w), abs(float(lam)), tol)


@lru_cache(maxsize=4096)
def _fourier_weighted_cov(model: CarModel, w: float, lam: float, tol: float) -> float:

    def weighted(t: float) -> float:
        return t**w * covariance(model, t)

    return 2.0 * cosine_transform(weighted, lam, tol / 2)


def zeta_tail_sum(p: Exponent) -> float:
    """Sum of |l|^(-p) over the nonzero integers, 2 zeta(p)

    :type p: float
    :param p: Exponent, p > 1
    :rtype: float
    :returns: Lattice sum
    """

    if p <= 1:
        raise SpectraConfigError(f"Lattice sum diverges for p={p}")

    return 2.0 * float(special.zeta(float(p), 1.0))


def variance_regular(
    model: CarModel, lam: float, n: int, b_n: float, kernel: Kernel
) -> float:
    """Leading variance (1 + delta_{0,lambda}) phi(lambda)^2 ||K||^2 / (n b_n)

    :rtype: float
    :returns: Asymptotic variance of the regular estimator
    """

    _check_size(n, b_n)

    phi = spectral_density(model, lam)

    return _zero_doubling(lam) * phi**2 * _norm_sq(kernel) / (n * b_n)


def bias_regular(
    model: CarModel,
    lam: float,
    n: int,
    rho_n: float,
    b_n: float,
    q: Exponent,
    p: Exponent,
    kernel: Kernel,
) -> BiasBreakdown:
    """Leading bias terms of the regular estimator

    smoothing  = -(k_q / 2 pi) F_q(lambda) (rho_n b_n)^q
    truncation = -(1 / 2 pi) F_1(lambda) rho_n / n
    aliasing   = A 2 zeta(p) / (2 pi rho_n)^p

    where F_w is fourier_weighted_cov and A the tail constant of the spectral density.

    :rtype: BiasBreakdown
    :returns: The three leading terms
    """

    _check_size(n, b_n)
    if not rho_n > 0:
        raise SpectraConfigError(f"rho_n must be positive, got {rho_n}")

    _, tail_constant = tail_decay_constant(model)

    k_q = _kernel_constant(kernel, float(q))
    smoothing = 0.0
    if k_q != 0.0:
        transform = fourier_weighted_cov(model, q, lam)
        smoothing = -k_q / (2 * math.pi) * transform * (rho_n * b_n) ** float(q)

    truncation = -fourier_weighted_cov(model, 1, lam) / (2 * math.pi) * rho_n / n
    aliasing = tail_constant * zeta_tail_sum(p) / (2 * math.pi * rho_n) ** float(p)

    return BiasBreakdown(float(smoothing), float(truncation), float(aliasing))


def variance_poisson(
    model: CarModel, lam: float, n: int, b_n: float, rho: float, kernel: Kernel
) -> float:
    """Leading variance rho [phi(lambda) + C(0) / (2 pi rho)]^2 (1 + delta) ||K||^2 / (n b_n)

    :rtype: float
    :returns: Asymptotic variance of the Poisson estimator
    """

    _check_size(n, b_n)
    if not rho > 0:
        raise SpectraConfigError(f"rho must be positive, got {rho}")

    level = spectral_density(model, lam) + covariance(model, 0.0) / (2 * math.pi * rho)

    return rho * level**2 * _zero_doubling(lam) * _norm_sq(kernel) / (n * b_n)


def bias_poisson(
    model: CarModel, lam: float, b_n: float, n: int, q: Exponent, kernel: Kernel
) -> float:
    """Leading bias -(k_q / 2 pi) F_q(lambda) b_n^q of the Poisson estimator

    The O(1/n) remainder is not included. Kernels whose characteristic exponent is
    below q have nonzero derivatives at the origin that this form does not cover;
    they raise SpectraTheoryError.

    :rtype: float
    :returns: Leading bias
    """

    _check_size(n, b_n)

    if kernel.char_exponent < q:
        raise SpectraTheoryError(
            f"{kernel.name} kernel has characteristic exponent {kernel.char_exponent:g} "
            f"below q={q}"
        )

    k_q = _kernel_constant(kernel, float(q))
    if k_q == 0.0:
        return 0.0

    return float(-k_q / (2 * math.pi) * fourier_weighted_cov(model, q, lam) * b_n ** float(q))


def variance_ratio(model: CarModel, lam: float, rho: float, Q: float, R: float) -> float:
    """Ratio of the Poisson to the regular variance constants

    (Q / R) rho [1 + C(0) / (2 pi rho phi(lambda))]^2

    :rtype: float
    :returns: Variance ratio
    """

    phi = _positive_density(model, lam)

    return Q / R * rho * (1.0 + covariance(model, 0.0) / (2 * math.pi * rho * phi)) ** 2


def optimal_poisson_rate(model: CarModel, lam: float) -> float:
    """Mean sampling rate C(0) / (2 pi phi(lambda)) minimising the variance ratio

    :rtype: float
    :returns: Optimal Poisson rate at lambda
    """

    return covariance(model, 0.0) / (2 * math.pi * _positive_density(model, lam))


def minimal_variance_ratio(model: CarModel, lam: float, Q: float, R: float) -> float:
    """Smallest variance ratio over rho, 2 Q C(0) / (R pi phi(lambda))

    :rtype: float
    :returns: Minimal ratio
    """

    return 2 * Q * covariance(model, 0.0) / (R * math.pi * _positive_density(model, lam))


def mse_rate_exponents(p: Exponent, q: Exponent) -> tuple[Fraction, Fraction]:
    """Exact MSE convergence exponents of the regular and Poisson schemes

    :type p: float
    :param p: Decay exponent, p > 1
    :type q: float
    :param q: Smoothness exponent, q > 1
    :rtype: tuple
    :returns: (2pq / (p + q + 2pq), 2[q] / (2[q] + 1))
    """

    p_frac, q_frac = exact_exponent(p, "p"), exact_exponent(q, "q")
    whole_q = math.floor(q_frac)

    regular = 2 * p_frac * q_frac / (p_frac + q_frac + 2 * p_frac * q_frac)
    poisson = Fraction(2 * whole_q, 2 * whole_q + 1)

    return regular, poisson


def non_integer_crossover(q: Exponent) -> Optional[Fraction]:
    """Decay exponent above which the regular MSE exponent beats the Poisson one

    For non-integer q the regular scheme converges faster once p > q[q] / (q - [q]).
    Integer q gives None: the regular scheme is slower for every finite p.

    :type q: float
    :param q: Smoothness exponent, q > 1
    :rtype: Fraction or None
    :returns: Crossover exponent
    """

    q_frac = exact_exponent(q, "q")
    whole_q = math.floor(q_frac)

    if q_frac == whole_q:
        return None

    return q_frac * whole_q / (q_frac - whole_q)


def limit_constants_regular(
    model: CarModel,
    lam: float,
    P: float,
    Q: float,
    q: Exponent,
    p: Exponent,
    kernel: Kernel,
) -> LimitConstants:
    """Limits of n^(2pq/D) Var and n^(pq/D) Bias under the optimal rates, D = p + q + 2pq

    Obtained from the finite sample formulas at n = 1, rho_n = P, b_n = Q. The truncation
    term decays faster than n^(-pq/D) and is left out of the bias constant.

    :rtype: LimitConstants
    :returns: Variance and bias constants
    """

    variance = variance_regular(model, lam, 1, Q, kernel)
    breakdown = bias_regular(model, lam, 1, P, Q, q, p, kernel)

    return LimitConstants(variance, breakdown.smoothing_term + breakdown.aliasing_term)


def limit_constants_poisson(
    model: CarModel, lam: float, rho: float, R: float, q: Exponent, kernel: Kernel
) -> LimitConstants:
    """Limits of the scaled Poisson variance and bias under b_n = R n^(-1/(2q+1))

    :rtype: LimitConstants
    :returns: Variance and bias constants
    """

    variance = variance_poisson(model, lam, 1, R, rho, kernel)
    bias = bias_poisson(model, lam, R, 1, q, kernel)

    return LimitConstants(variance, bias)


def exact_mean_regular(
    model: CarModel, lam: float, n: int, rho_n: float, b_n: float, kernel: Kernel
) -> float:
    """Finite sample mean of the regular estimator

    E phi(lambda) = (1 / 2 pi rho) [C(0) + 2 sum_{v>=1} (1 - v/n) C(v/rho) K(b v) cos(v lambda / rho)]
    inside the band and 0 outside it.

    :rtype: float
    :returns: Expected estimate
    """

    _check_size(n, b_n)

    if abs(lam) > math.pi * rho_n:
        return 0.0

    max_lag = n - 1
    if kernel.has_finite_support:
        max_lag = min(max_lag, int(math.floor(kernel.support_radius / b_n)))

    lags = np.arange(1, max_lag + 1)
    terms = (1.0 - lags / n) * covariance(model, lags / rho_n) * kernel(b_n * lags)
    series = covariance(model, 0.0) + 2.0 * np.dot(terms, np.cos(lags * lam / rho_n))

    return float(series / (2 * math.pi * rho_n))


def exact_mean_poisson(
    model: CarModel, lam: float, n: int, rho: float, b_n: float, kernel: Kernel
) -> float:
    """Finite sample mean of the Poisson estimator

    The gap between points i steps apart is Gamma(i, rho) distributed and the gap
    densities sum to rho (1 - (1 + rho t) / n) after the (1 - i/n) weighting, so

    E psi(lambda) = (1 / pi) integral over [0, R/b] of C(t) K(b t) cos(lambda t) (1 - (1 + rho t) / n)

    Pairs more than n - 1 steps apart are ignored; their probability of falling inside
    the kernel support is negligible.

    :rtype: float
    :returns: Expected estimate
    """

    _check_size(n, b_n)

    if not kernel.has_finite_support:
        raise SpectraConfigError(f"{kernel.name} kernel has unbounded support")

    upper = kernel.support_radius / b_n

    def integrand(t: float) -> float:
        weight = 1.0 - (1.0 + rho * t) / n
        return covariance(model, t) * kernel(b_n * t) * math.cos(lam * t) * weight

    return integrate_interval(integrand, 0.0, upper, points=(0.5 * upper,)) / math.pi


def exact_aliasing_sum(
    model: CarModel, lam: float, rho: float, terms: int = ALIASING_TERMS
) -> float:
    """Direct sum of phi(lambda + 2 pi l rho) over 0 < |l| <= terms

    :rtype: float
    :returns: Aliased spectral mass at lambda
    """

    shifts = 2 * math.pi * rho * np.arange(1, terms + 1)

    aliased = spectral_density(model, lam + shifts) + spectral_density(model, lam - shifts)

    return float(aliased.sum())


def theory_curve_regular(
    model: CarModel, lambdas: np.ndarray, config: EstimatorConfig
) -> TheoryCurve:
    """Bias and variance of the regular estimator over a frequency grid

    :rtype: TheoryCurve
    :returns: Theory values with the bias breakdown
    """

    grid = np.asarray(lambdas, dtype=float)
    _warn_near_zero(grid, config.rho_n * config.b_n)

    decay, _ = tail_decay_constant(model)
    if config.p != decay:
        writer.warn(
            f"decay exponent p={config.p:g} differs from the model's {decay}; "
            "the aliasing term uses p as given"
        )

    breakdowns = [
        bias_regular(
            model, lam, config.n, config.rho_n, config.b_n, config.q, config.p, config.kernel
        )
        for lam in grid
    ]
    variances = [
        variance_regular(model, lam, config.n, config.b_n, config.kernel) for lam in grid
    ]

    return TheoryCurve(
        lambdas=grid,
        bias_theory=np.array([breakdown.total for breakdown in breakdowns]),
        var_theory=np.array(variances),
        smoothing=np.array([breakdown.smoothing_term for breakdown in breakdowns]),
        truncation=np.array([breakdown.truncation_term for breakdown in breakdowns]),
        aliasing=np.array([breakdown.aliasing_term for breakdown in breakdowns]),
    )


def theory_curve_poisson(
    model: CarModel, lambdas: np.ndarray, config: EstimatorConfig
) -> TheoryCurve:
    """Bias and variance of the Poisson estimator over a frequency grid

    config.rho_n is the mean sampling rate. The bias is the leading term only.

    :rtype: TheoryCurve
    :returns: Theory values
    """

    grid = np.asarray(lambdas, dtype=float)
    _warn_near_zero(grid, config.b_n)
    writer.warn("Poisson bias theory keeps the leading term only; O(1/n) is omitted")

    q = math.floor(config.q)
    biases = [
        bias_poisson(model, lam, config.b_n, config.n, q, config.kernel) for lam in grid
    ]
    variances = [
        variance_poisson(model, lam, config.n, config.b_n, config.rho_n, config.kernel)
        for lam in grid
    ]

    return TheoryCurve(lambdas=grid, bias_theory=np.array(biases), var_theory=np.array(variances))


@lru_cache(maxsize=32)
def _norm_sq(kernel: Kernel) -> float:

    return l2_norm_sq(kernel)


@lru_cache(maxsize=32)
def _kernel_constant(kernel: Kernel, q: float) -> float:

    return characteristic_constant(kernel, q)


def _zero_doubling(lam: float) -> float:

    return 2.0 if lam == 0 else 1.0


def _check_size(n: float, b_n: float) -> None:

    if not (n > 0 and b_n > 0):
        raise SpectraConfigError(f"n and b_n must be positive, got n={n}, b_n={b_n}")


def _positive_density(model: CarModel, lam: float) -> float:

    phi = spectral_density(model, lam)
    if not phi > 0:
        raise SpectraConfigError(f"Spectral density vanishes at lambda={lam}")

    return phi


def _warn_near_zero(grid: np.ndarray, bandwidth: float) -> None:

    near_zero = np.count_nonzero((grid != 0) & (np.abs(grid) < 2 * bandwidth))
    if near_zero:
        writer.warn(
            f"{near_zero} frequencies lie within 2x the bandwidth {bandwidth:.3g} of 0, "
            "where the expansions are not uniform"
        )
