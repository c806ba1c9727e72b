"""Smoothed periodogram estimators for regular and Poisson sampled data, with rate rules"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

import numpy as np

from ctspectra.constants import (
    DEFAULT_P,
    DEFAULT_Q,
    DEFAULT_RATE_P,
    DEFAULT_RATE_Q,
    DEFAULT_RATE_R,
)
from ctspectra.exceptions import SpectraConfigError
from ctspectra.kernels import Kernel
from ctspectra.sampling_sim import SamplePath, SchemeKind
from ctspectra.writer import writer


Exponent = Union[int, float, Fraction]


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters driving the estimators and the rate selectors

    Raises SpectraConfigError for n < 2 or non-positive rate or window width. Emits
    warnings when rho_n * b_n >= 1 or when the kernel exponent differs from q.

    :type n: int
    :param n: Sample count
    :type rho_n: float
    :param rho_n: Sampling rate (samples/time)
    :type b_n: float
    :param b_n: Window width
    :type kernel: Kernel
    :param kernel: Lag-window kernel
    :type q: float
    :param q: Smoothness exponent of the spectral density
    :type p: float
    :param p: Decay exponent of the spectral density
    :type P: float
    :param P: Rate constant of rho_n
    :type Q: float
    :param Q: Rate constant of b_n (regular sampling)
    :type R: float
    :param R: Rate constant of b_n (Poisson sampling)
    :type demean: bool
    :param demean: Subtract the sample mean before estimating
    """

    n: int
    rho_n: float
    b_n: float
    kernel: Kernel
    q: float = DEFAULT_Q
    p: float = DEFAULT_P
    P: float = DEFAULT_RATE_P
    Q: float = DEFAULT_RATE_Q
    R: float = DEFAULT_RATE_R
    demean: bool = field(default=False)

    def __post_init__(self) -> None:

        if int(self.n) != self.n or self.n < 2:
            raise SpectraConfigError(f"Estimators need n >= 2 samples, got {self.n}")

        for name in ("rho_n", "b_n", "P", "Q", "R", "q", "p"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise SpectraConfigError(f"{name} must be positive, got {value}")

        if self.rho_n * self.b_n >= 1:
            writer.warn(
                f"rho_n * b_n = {self.rho_n * self.b_n:.4g} is not small; "
                "the smoothing bandwidth covers the whole band"
            )

        if self.kernel.char_exponent != self.q:
            writer.warn(
                f"{self.kernel.name} kernel has characteristic exponent "
                f"{self.kernel.char_exponent:g}, the smoothness exponent is q={self.q:g}"
            )

    def snapshot(self) -> dict[str, Any]:
        """Return the parameters as plain values

        :rtype: dict
        :returns: Parameter names and values
        """

        return {
            "n": self.n,
            "rho_n": self.rho_n,
            "b_n": self.b_n,
            "kernel": self.kernel.name,
            "q": self.q,
            "p": self.p,
        }


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    """Estimated spectral density on a frequency grid

    :type lambdas: numpy.ndarray
    :param lambdas: Angular frequencies
    :type values: numpy.ndarray
    :param values: Estimates (power per rad/time)
    :type scheme: SchemeKind
    :param scheme: Scheme of the sampled data
    :type config: dict
    :param config: Parameters used
    """

    lambdas: np.ndarray
    values: np.ndarray
    scheme: SchemeKind
    config: dict[str, Any]


def sample_autocovariance(values: np.ndarray, v: int) -> float:
    """Biased sample autocovariance (1/n) sum_j x_j x_{j+|v|}

    :type values: numpy.ndarray
    :param values: Samples x_1..x_n
    :type v: int
    :param v: Lag, |v| <= n - 1
    :rtype: float
    :returns: Autocovariance estimate
    """

    x = np.asarray(values, dtype=float)
    lag = abs(int(v))

    if lag >= x.size:
        raise SpectraConfigError(f"Lag {v} needs more than {x.size} samples")

    return float(np.dot(x[: x.size - lag], x[lag:]) / x.size)


def sample_autocovariances(values: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample autocovariances for the lags 0..max_lag

    :type values: numpy.ndarray
    :param values: Samples x_1..x_n
    :type max_lag: int
    :param max_lag: Largest lag, max_lag <= n - 1
    :rtype: numpy.ndarray
    :returns: Array of length max_lag + 1
    """

    x = np.asarray(values, dtype=float)

    if not 0 <= max_lag < x.size:
        raise SpectraConfigError(f"Lag {max_lag} needs more than {x.size} samples")

    return np.array([np.dot(x[: x.size - lag], x[lag:]) for lag in range(max_lag + 1)]) / x.size


def regular_smoothed_periodogram(
    path: SamplePath, config: EstimatorConfig, lambdas: np.ndarray
) -> SpectralEstimate:
    """Lag-window estimate from regularly spaced samples

    phi(lambda) = (1 / 2 pi rho) [g(0) + 2 sum_{v >= 1} g(v) K(b v) cos(v lambda / rho)]
    inside the closed band [-pi rho, pi rho] and 0 outside. The lag sum stops at
    support_radius / b for kernels with finite support.

    :type path: SamplePath
    :param path: Regularly sampled path with rate config.rho_n
    :type config: EstimatorConfig
    :param config: Estimator parameters
    :type lambdas: numpy.ndarray
    :param lambdas: Frequency grid
    :rtype: SpectralEstimate
    :returns: Estimates on the grid
    """

    _check_scheme(path, SchemeKind.REGULAR, config.rho_n)
    grid = _check_grid(lambdas)

    x = _prepared_values(path, config.demean)
    rho = config.rho_n

    max_lag = path.times.size - 1
    if config.kernel.has_finite_support:
        max_lag = min(max_lag, int(math.floor(config.kernel.support_radius / config.b_n)))

    gamma = sample_autocovariances(x, max_lag)
    lags = np.arange(1, max_lag + 1)
    weights = gamma[1:] * config.kernel(config.b_n * lags)

    series = gamma[0] + 2.0 * (np.cos(np.outer(grid / rho, lags)) @ weights)
    values = np.where(np.abs(grid) <= math.pi * rho, series / (2 * math.pi * rho), 0.0)

    return SpectralEstimate(grid, values, SchemeKind.REGULAR, config.snapshot())


def periodogram(path: SamplePath, config: EstimatorConfig, lam: Union[float, np.ndarray]):
    """Periodogram (1 / 2 pi n rho) |sum_t x_t exp(-i t lambda / rho)|^2 inside the band

    :type path: SamplePath
    :param path: Regularly sampled path with rate config.rho_n
    :type config: EstimatorConfig
    :param config: Estimator parameters (rho_n, demean)
    :type lam: float or array
    :param lam: Frequency
    :rtype: float or array
    :returns: Periodogram ordinates
    """

    _check_scheme(path, SchemeKind.REGULAR, config.rho_n)

    x = _prepared_values(path, config.demean)
    rho = config.rho_n
    grid = np.atleast_1d(np.asarray(lam, dtype=float))

    steps = np.arange(1, x.size + 1)
    transform = np.exp(-1j * np.outer(grid / rho, steps)) @ x
    ordinates = np.abs(transform) ** 2 / (2 * math.pi * x.size * rho)
    ordinates = np.where(np.abs(grid) <= math.pi * rho, ordinates, 0.0)

    return float(ordinates[0]) if np.ndim(lam) == 0 else ordinates


def poisson_smoothed_estimator(
    path: SamplePath,
    b_n: float,
    rho: float,
    kernel: Kernel,
    lambdas: np.ndarray,
    demean: bool = False,
) -> SpectralEstimate:
    """Lag-window estimate from Poisson sampled data

    psi(lambda) = (1 / pi rho n) sum_{i >= 1} sum_j x_j x_{j+i} K(b d_ij) cos(lambda d_ij)
    with d_ij = t_{j+i} - t_j. Pairs farther apart than support_radius / b are skipped:
    the gaps grow with the lag i, so the scan over lags stops at the first lag whose
    every gap exceeds the cutoff.

    :type path: SamplePath
    :param path: Poisson sampled path with mean rate rho
    :type b_n: float
    :param b_n: Window width
    :type rho: float
    :param rho: Mean sampling rate
    :type kernel: Kernel
    :param kernel: Kernel with finite support
    :type lambdas: numpy.ndarray
    :param lambdas: Frequency grid
    :type demean: bool
    :param demean: Subtract the sample mean first
    :rtype: SpectralEstimate
    :returns: Estimates on the grid
    """

    _check_scheme(path, SchemeKind.POISSON, rho)
    grid = _check_grid(lambdas)

    if not kernel.has_finite_support:
        raise SpectraConfigError(
            f"The Poisson estimator needs a kernel with finite support, got {kernel.name}"
        )

    if not b_n > 0:
        raise SpectraConfigError(f"b_n must be positive, got {b_n}")

    x = _prepared_values(path, demean)
    times = path.times
    n = times.size
    cutoff = kernel.support_radius / b_n

    pair_gaps = []
    pair_weights = []
    for lag in range(1, n):
        gaps = times[lag:] - times[: n - lag]
        inside = gaps <= cutoff
        if not inside.any():
            break
        gaps = gaps[inside]
        products = x[lag:][inside] * x[: n - lag][inside]
        pair_gaps.append(gaps)
        pair_weights.append(products * kernel(b_n * gaps))

    if pair_gaps:
        gaps = np.concatenate(pair_gaps)
        weights = np.concatenate(pair_weights)
        sums = np.cos(np.outer(grid, gaps)) @ weights
    else:
        sums = np.zeros_like(grid)

    values = sums / (math.pi * rho * n)
    snapshot = {"n": n, "rho": rho, "b_n": b_n, "kernel": kernel.name}

    return SpectralEstimate(grid, values, SchemeKind.POISSON, snapshot)


def regular_rate_exponents(p: Exponent, q: Exponent) -> tuple[Fraction, Fraction]:
    """Exact exponents of the optimal sampling rate and window width

    rho_n grows like n^(q/(p+q+2pq)) and b_n shrinks like n^(-(p+q)/(p+q+2pq)).

    :type p: int, float or Fraction
    :param p: Decay exponent, p > 1
    :type q: int, float or Fraction
    :param q: Smoothness exponent, q > 1
    :rtype: tuple
    :returns: (rho exponent, b exponent) as fractions
    """

    p_frac, q_frac = exact_exponent(p, "p"), exact_exponent(q, "q")
    denominator = p_frac + q_frac + 2 * p_frac * q_frac

    return q_frac / denominator, (p_frac + q_frac) / denominator


def optimal_rates_regular(
    n: int, p: Exponent, q: Exponent, P: float, Q: float
) -> tuple[float, float]:
    """MSE-optimal sampling rate and window width for regular sampling

    :type n: int
    :param n: Sample size
    :type p: int, float or Fraction
    :param p: Decay exponent, p > 1
    :type q: int, float or Fraction
    :param q: Smoothness exponent, q > 1
    :type P: float
    :param P: Rate constant, P > 0
    :type Q: float
    :param Q: Window constant, Q > 0
    :rtype: tuple
    :returns: (rho_n, b_n)
    """

    if not (P > 0 and Q > 0):
        raise SpectraConfigError(f"Rate constants must be positive, got P={P}, Q={Q}")

    rho_exponent, b_exponent = regular_rate_exponents(p, q)

    return P * n ** float(rho_exponent), Q * n ** -float(b_exponent)


def optimal_window_given_rate(n: int, rho: float, q: float, constant: float = 1.0) -> float:
    """Window width balancing squared bias and variance at a fixed sampling rate

    b_n = constant * (n rho^(2q))^(-1/(2q+1))

    :type n: int
    :param n: Sample size, n >= 2
    :type rho: float
    :param rho: Sampling rate, rho > 0
    :type q: float
    :param q: Smoothness exponent
    :type constant: float
    :param constant: Proportionality constant
    :rtype: float
    :returns: Window width
    """

    if n < 2 or not rho > 0:
        raise SpectraConfigError(f"Need n >= 2 and rho > 0, got n={n}, rho={rho}")

    return constant * (n * rho ** (2 * q)) ** (-1.0 / (2 * q + 1))


def optimal_window_poisson(n: int, q: Exponent, R: float) -> float:
    """Window width R n^(-1/(2[q]+1)) for Poisson sampling

    :type n: int
    :param n: Sample size
    :type q: int, float or Fraction
    :param q: Smoothness exponent, its integer part is used
    :type R: float
    :param R: Window constant
    :rtype: float
    :returns: Window width
    """

    if not R > 0:
        raise SpectraConfigError(f"Window constant must be positive, got R={R}")

    whole_q = math.floor(q)
    if whole_q < 1:
        raise SpectraConfigError(f"Poisson window rule needs q >= 1, got {q}")

    return R * n ** (-1.0 / (2 * whole_q + 1))


def regular_config(
    n: int,
    kernel: Kernel,
    p: Exponent = DEFAULT_P,
    q: Exponent = DEFAULT_Q,
    P: float = DEFAULT_RATE_P,
    Q: float = DEFAULT_RATE_Q,
) -> EstimatorConfig:
    """Estimator configuration with the MSE-optimal rates

    :rtype: EstimatorConfig
    :returns: Configuration for regular sampling
    """

    rho_n, b_n = optimal_rates_regular(n, p, q, P, Q)

    return EstimatorConfig(
        n=n, rho_n=rho_n, b_n=b_n, kernel=kernel, q=float(q), p=float(p), P=P, Q=Q
    )


def poisson_window(
    n: int,
    kernel: Kernel,
    rho: float,
    q: Exponent = DEFAULT_Q,
    R: float = DEFAULT_RATE_R,
) -> EstimatorConfig:
    """Estimator configuration for Poisson sampling at a fixed mean rate

    :rtype: EstimatorConfig
    :returns: Configuration with b_n = R n^(-1/(2[q]+1))
    """

    b_n = optimal_window_poisson(n, q, R)

    return EstimatorConfig(n=n, rho_n=rho, b_n=b_n, kernel=kernel, q=float(q), R=R)


def exact_exponent(value: Exponent, name: str) -> Fraction:

    exponent = Fraction(value)
    if exponent <= 1:
        raise SpectraConfigError(f"{name} must exceed 1, got {value}")

    return exponent


def _check_scheme(path: SamplePath, kind: SchemeKind, rho: float) -> None:

    if path.scheme.kind is not kind or not math.isclose(path.scheme.rho, rho, rel_tol=1e-12):
        raise SpectraConfigError(
            f"Estimator expects {kind.value} sampling at rate {rho:g}, path is {path.scheme}"
        )


def _check_grid(lambdas: np.ndarray) -> np.ndarray:

    grid = np.atleast_1d(np.asarray(lambdas, dtype=float))

    if grid.size == 0:
        raise SpectraConfigError("Frequency grid is empty!")

    if not np.all(np.isfinite(grid)):
        raise SpectraConfigError("Frequency grid must be finite!")

    return grid


def _prepared_values(path: SamplePath, demean: bool) -> np.ndarray:

    return path.values - path.values.mean() if demean else path.values
