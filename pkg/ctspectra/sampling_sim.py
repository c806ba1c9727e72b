"""Sampling grids and exact Gaussian simulation of CAR sample paths

The state Y_i(t) = integral over [0, t] of exp(-alpha_i (t - s)) dW(s) evolves over a gap
of length d as Y_i <- exp(-alpha_i d) Y_i + eps_i, where eps is Gaussian with
Cov(eps_i, eps_j) = (1 - exp(-(alpha_i + alpha_j) d)) / (alpha_i + alpha_j). The process
value is X = sigma * sum_i c_i Y_i. Paths start from zero at time 0 and are recorded
from the burn-in time t0 onwards, with the returned times re-zeroed to the input grid.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from ctspectra.constants import BURN_IN_TOL, GAP_CACHE_SIZE, GAP_JITTER, GAP_KEY_DIGITS
from ctspectra.exceptions import SpectraConfigError, SpectraSimulationError
from ctspectra.process_models import CarModel, burn_in_time


class SchemeKind(str, Enum):

    REGULAR = "regular"
    POISSON = "poisson"
    IRREGULAR = "irregular"


class StreamPurpose(int, Enum):
    """Independent random sub-streams derived from one SimSeed"""

    SAMPLING_TIMES = 0
    PATH_NOISE = 1


@dataclass(frozen=True)
class SamplingScheme:
    """Sampling scheme tag: regular grid or Poisson times, both with rate rho

    :type kind: SchemeKind
    :param kind: Scheme kind
    :type rho: float
    :param rho: Sampling rate (regular) or mean rate (Poisson), samples per time
    """

    kind: SchemeKind
    rho: float

    @classmethod
    def regular(cls, rho: float) -> "SamplingScheme":

        return cls(SchemeKind.REGULAR, float(rho))

    @classmethod
    def poisson(cls, rho: float) -> "SamplingScheme":

        return cls(SchemeKind.POISSON, float(rho))

    def __str__(self) -> str:

        return f"{self.kind.value}(rho={self.rho:g})"


@dataclass(frozen=True)
class SimSeed:
    """Reproducibility token of one replication

    The random stream is a pure function of (master_seed, stream, replication_index),
    so replications can be generated in any order or in parallel.

    :type master_seed: int
    :param master_seed: 64-bit master seed
    :type replication_index: int
    :param replication_index: Replication number
    :type stream: tuple
    :param stream: Extra integer key separating experiments (scheme, n, ...)
    """

    master_seed: int
    replication_index: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self) -> None:

        if not 0 <= self.master_seed < 2**64:
            raise SpectraConfigError(f"Seed must be a 64-bit nonnegative integer: {self.master_seed}")

        if self.replication_index < 0:
            raise SpectraConfigError(
                f"Replication index must be nonnegative: {self.replication_index}"
            )

    def generator(self, purpose: StreamPurpose) -> np.random.Generator:
        """Return the random generator of the given sub-stream

        :type purpose: StreamPurpose
        :param purpose: Sub-stream
        :rtype: numpy.random.Generator
        :returns: Independent generator
        """

        sequence = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(*self.stream, self.replication_index, int(purpose)),
        )

        return np.random.default_rng(sequence)


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Ordered sampling times with the process values observed there

    :type times: numpy.ndarray
    :param times: Strictly increasing times
    :type values: numpy.ndarray
    :param values: Process values
    :type scheme: SamplingScheme
    :param scheme: Scheme that produced the times
    :type seed: SimSeed
    :param seed: Seed of the simulation, None for loaded data
    """

    times: np.ndarray
    values: np.ndarray
    scheme: SamplingScheme
    seed: Optional[SimSeed] = field(default=None)

    def __post_init__(self) -> None:

        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

        if times.ndim != 1 or times.size < 1:
            raise SpectraConfigError("A sample path needs at least one sample!")

        if times.shape != values.shape:
            raise SpectraConfigError(
                f"Times and values differ in length: {times.size} != {values.size}"
            )

        if np.any(np.diff(times) <= 0):
            raise SpectraConfigError("Sampling times must be strictly increasing!")

        if self.scheme.kind is SchemeKind.REGULAR and not np.array_equal(
            times, regular_grid(times.size, self.scheme.rho)
        ):
            raise SpectraConfigError(f"Times are not the regular grid j/rho of {self.scheme}")

    def __len__(self) -> int:

        return self.times.size


def regular_grid(n: int, rho: float) -> np.ndarray:
    """Return the times 1/rho, 2/rho, ..., n/rho

    :type n: int
    :param n: Number of samples, n >= 1
    :type rho: float
    :param rho: Sampling rate
    :rtype: numpy.ndarray
    :returns: Regular sampling times
    """

    _check_size_and_rate(n, rho)

    return np.arange(1, n + 1, dtype=float) / rho


def poisson_times(n: int, rho: float, seed: SimSeed) -> np.ndarray:
    """Return the first n points of a Poisson process with mean rate rho

    The times are cumulative sums of i.i.d. exponential gaps with mean 1/rho.

    :type n: int
    :param n: Number of samples, n >= 1
    :type rho: float
    :param rho: Mean sampling rate
    :type seed: SimSeed
    :param seed: Reproducibility token
    :rtype: numpy.ndarray
    :returns: Poisson sampling times
    """

    _check_size_and_rate(n, rho)

    rng = seed.generator(StreamPurpose.SAMPLING_TIMES)
    gaps = rng.exponential(scale=1.0 / rho, size=n)

    return np.cumsum(gaps)


@lru_cache(maxsize=GAP_CACHE_SIZE)
def _gap_factor(alphas: tuple[float, ...], delta_key: float) -> np.ndarray:
    """Cached square-root factor of the gap noise covariance for one rounded gap"""

    return gap_factors(np.array(alphas), np.array([delta_key]))[0]


def gap_covariances(alphas: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Stack of gap noise covariance matrices, one p x p matrix per gap

    :type alphas: numpy.ndarray
    :param alphas: Decay rates
    :type deltas: numpy.ndarray
    :param deltas: Positive gaps
    :rtype: numpy.ndarray
    :returns: Array of shape (len(deltas), p, p)
    """

    pair_sums = alphas[:, None] + alphas[None, :]

    return -np.expm1(-pair_sums[None, :, :] * deltas[:, None, None]) / pair_sums


def gap_factors(alphas: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Square-root factors L with L L^T equal to the gap covariance, one per gap

    Cholesky is tried first. Matrices that fail it (rank deficient for tiny gaps) are
    repaired through an eigendecomposition with negative eigenvalues clipped; an
    eigenvalue below -1e-12 * trace raises SpectraSimulationError.

    :type alphas: numpy.ndarray
    :param alphas: Decay rates
    :type deltas: numpy.ndarray
    :param deltas: Positive gaps
    :rtype: numpy.ndarray
    :returns: Array of shape (len(deltas), p, p)
    """

    matrices = gap_covariances(alphas, deltas)

    try:
        return np.linalg.cholesky(matrices)
    except np.linalg.LinAlgError:
        pass

    factors = np.empty_like(matrices)
    for index, matrix in enumerate(matrices):
        try:
            factors[index] = np.linalg.cholesky(matrix)
            continue
        except np.linalg.LinAlgError:
            pass

        eigenvalues, eigenvectors = np.linalg.eigh(matrix)
        jitter = GAP_JITTER * np.trace(matrix)
        if eigenvalues.min() < -jitter:
            raise SpectraSimulationError(
                f"Gap covariance for delta={deltas[index]:.6g} is not positive semidefinite "
                f"(eigenvalue {eigenvalues.min():.3g})"
            )
        factors[index] = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))

    return factors


def cholesky_gap_noise(model: CarModel, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one gap noise vector eps for a gap of length delta

    :type model: CarModel
    :param model: Process model
    :type delta: float
    :param delta: Gap length, delta > 0
    :type rng: numpy.random.Generator
    :param rng: Random stream
    :rtype: numpy.ndarray
    :returns: Noise vector of length p
    """

    if not delta > 0:
        raise SpectraConfigError(f"Gap must be positive, got {delta}")

    factor = _gap_factor(model.alphas, _gap_key(delta))

    return factor @ rng.standard_normal(model.order)


def simulate_path(
    model: CarModel,
    times: np.ndarray,
    seed: SimSeed,
    scheme: Optional[SamplingScheme] = None,
    burn_in_tol: float = BURN_IN_TOL,
) -> SamplePath:
    """Simulate the process exactly at the given times after the burn-in time

    :type model: CarModel
    :param model: Process model
    :type times: numpy.ndarray
    :param times: Strictly increasing positive times
    :type seed: SimSeed
    :param seed: Reproducibility token
    :type scheme: SamplingScheme
    :param scheme: Scheme tag of the path, irregular when omitted
    :type burn_in_tol: float
    :param burn_in_tol: Residual variance tolerance for the burn-in time
    :rtype: SamplePath
    :returns: Simulated sample path
    """

    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise SpectraConfigError("At least one sampling time is required!")

    if times[0] <= 0 or np.any(np.diff(times) <= 0):
        raise SpectraConfigError("Sampling times must be positive and strictly increasing!")

    if scheme is None:
        scheme = SamplingScheme(SchemeKind.IRREGULAR, times.size / times[-1])

    start = _cached_burn_in(model, burn_in_tol)
    gaps = np.diff(times, prepend=0.0)
    gaps[0] += start

    factors = _factors_for(model, gaps)
    decays = np.exp(-np.outer(gaps, np.array(model.alphas)))

    rng = seed.generator(StreamPurpose.PATH_NOISE)
    noise = np.einsum("kij,kj->ki", factors, rng.standard_normal((times.size, model.order)))

    states = np.empty_like(noise)
    state = np.zeros(model.order)
    for index in range(times.size):
        state = decays[index] * state + noise[index]
        states[index] = state

    values = model.sigma * (states @ model.coeffs.as_array())

    return SamplePath(times=times, values=values, scheme=scheme, seed=seed)


def simulate_regular(model: CarModel, n: int, rho: float, seed: SimSeed) -> SamplePath:
    """Simulate a path on the regular grid j/rho, j = 1..n

    :rtype: SamplePath
    :returns: Regularly sampled path
    """

    return simulate_path(model, regular_grid(n, rho), seed, SamplingScheme.regular(rho))


def simulate_poisson(model: CarModel, n: int, rho: float, seed: SimSeed) -> SamplePath:
    """Simulate a path at n Poisson times with mean rate rho

    :rtype: SamplePath
    :returns: Poisson sampled path
    """

    times = poisson_times(n, rho, seed)

    return simulate_path(model, times, seed, SamplingScheme.poisson(rho))


def path_from_samples(
    times: np.ndarray, values: np.ndarray, kind: SchemeKind, rho: Optional[float] = None
) -> SamplePath:
    """Rebuild a sample path from stored times and values

    The rate defaults to n / t_n. Regular times must match the grid j/rho to within
    1e-9 relative and are then replaced by the exact grid.

    :type times: numpy.ndarray
    :param times: Stored times
    :type values: numpy.ndarray
    :param values: Stored values
    :type kind: SchemeKind
    :param kind: Scheme the times come from
    :type rho: float
    :param rho: Sampling rate, inferred when None
    :rtype: SamplePath
    :returns: Path tagged with its scheme
    """

    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise SpectraConfigError("No samples given!")

    rate = float(rho) if rho is not None else times.size / float(times[-1])
    _check_size_and_rate(times.size, rate)

    if kind is SchemeKind.REGULAR:
        grid = regular_grid(times.size, rate)
        if not np.allclose(times, grid, rtol=1e-9, atol=0.0):
            raise SpectraConfigError(f"Times are not a regular grid with rate {rate:g}")
        times = grid

    return SamplePath(times=times, values=values, scheme=SamplingScheme(kind, rate))


def _factors_for(model: CarModel, gaps: np.ndarray) -> np.ndarray:
    """Gap factors for every gap, looked up in the cache when few gaps are distinct"""

    keys = np.array([_gap_key(gap) for gap in gaps])
    unique_keys, inverse = np.unique(keys, return_inverse=True)

    if unique_keys.size <= GAP_CACHE_SIZE // 4:
        unique_factors = np.stack([_gap_factor(model.alphas, key) for key in unique_keys])
    else:
        # Poisson grids: every gap is distinct, caching would only evict useful entries
        unique_factors = gap_factors(np.array(model.alphas), unique_keys)

    return unique_factors[inverse]


@lru_cache(maxsize=64)
def _cached_burn_in(model: CarModel, tol: float) -> float:

    return burn_in_time(model, tol)


def _gap_key(delta: float) -> float:
    """Round a gap to 15 significant digits"""

    return float(f"{delta:.{GAP_KEY_DIGITS}g}")


def _check_size_and_rate(n: int, rho: float) -> None:

    if int(n) != n or n < 1:
        raise SpectraConfigError(f"Sample size must be a positive integer, got {n}")

    if not (math.isfinite(rho) and rho > 0):
        raise SpectraConfigError(f"Sampling rate must be positive, got {rho}")
