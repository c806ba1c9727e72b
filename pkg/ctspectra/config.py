import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Union

import numpy as np
from dotenv import dotenv_values

from ctspectra.constants import (
    DEFAULT_ALPHAS,
    DEFAULT_KERNEL,
    DEFAULT_LAMBDA_MAX,
    DEFAULT_LAMBDA_MIN,
    DEFAULT_LAMBDA_STEPS,
    DEFAULT_P,
    DEFAULT_POISSON_RHO,
    DEFAULT_Q,
    DEFAULT_RATE_P,
    DEFAULT_RATE_Q,
    DEFAULT_RATE_R,
    DEFAULT_SEED,
    DEFAULT_SIGMA,
    SCHEMES,
)
from ctspectra.estimators import (
    EstimatorConfig,
    optimal_rates_regular,
    poisson_window,
    regular_config,
)
from ctspectra.exceptions import SpectraConfigError
from ctspectra.kernels import Kernel, get_kernel
from ctspectra.process_models import CarModel, model_from_values


ConfigValues = dict[str, Any]


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo experiment settings

    Raises SpectraConfigError when a setting is out of range, or when the frequency
    grid reaches beyond the band of the slowest regular sampling rate.
    """

    model: CarModel = field(default_factory=lambda: CarModel(DEFAULT_ALPHAS, DEFAULT_SIGMA))
    schemes: tuple[str, ...] = SCHEMES
    n_values: tuple[int, ...] = (100, 1000, 10000)
    replications: int = 500
    lambda_min: float = DEFAULT_LAMBDA_MIN
    lambda_max: float = DEFAULT_LAMBDA_MAX
    lambda_steps: int = DEFAULT_LAMBDA_STEPS
    seed: int = DEFAULT_SEED
    p: float = DEFAULT_P
    q: float = DEFAULT_Q
    P: float = DEFAULT_RATE_P
    Q: float = DEFAULT_RATE_Q
    R: float = DEFAULT_RATE_R
    poisson_rho: float = DEFAULT_POISSON_RHO
    kernel: str = DEFAULT_KERNEL
    output_dir: Path = Path("results")
    workers: int = 1

    def __post_init__(self) -> None:

        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "output_dir", Path(self.output_dir))

        unknown = set(self.schemes) - set(SCHEMES)
        if not self.schemes or unknown:
            raise SpectraConfigError(f"Schemes must be a subset of {SCHEMES}, got {self.schemes}")

        if not self.n_values or min(self.n_values) < 2:
            raise SpectraConfigError(f"Sample sizes must be at least 2, got {self.n_values}")

        if self.replications < 2:
            raise SpectraConfigError(
                f"Variance estimates need at least 2 replications, got {self.replications}"
            )

        if self.lambda_steps < 1 or not self.lambda_min <= self.lambda_max:
            raise SpectraConfigError(
                f"Invalid frequency grid ({self.lambda_min}, {self.lambda_max}, "
                f"{self.lambda_steps})"
            )

        if not 0 <= self.seed < 2**64:
            raise SpectraConfigError(f"Seed must be a 64 bit unsigned integer, got {self.seed}")

        if self.workers < 1:
            raise SpectraConfigError(f"workers must be at least 1, got {self.workers}")

        for name in ("P", "Q", "R", "poisson_rho"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise SpectraConfigError(f"{name} must be positive, got {value}")

        if self.p <= 1 or self.q <= 1:
            raise SpectraConfigError(f"Exponents must exceed 1, got p={self.p}, q={self.q}")

        get_kernel(self.kernel)

        if "regular" in self.schemes:
            slowest_rate, _ = optimal_rates_regular(
                min(self.n_values), self.p, self.q, self.P, self.Q
            )
            highest = max(abs(self.lambda_min), abs(self.lambda_max))
            if highest > math.pi * slowest_rate:
                raise SpectraConfigError(
                    f"Frequency {highest:g} lies outside the band [-{math.pi * slowest_rate:.4g}, "
                    f"{math.pi * slowest_rate:.4g}] of the slowest regular rate"
                )

    @property
    def kernel_instance(self) -> Kernel:

        return get_kernel(self.kernel)

    def lambda_grid(self) -> np.ndarray:
        """Return the evenly spaced frequency grid

        :rtype: numpy.ndarray
        :returns: Frequencies from lambda_min to lambda_max
        """

        return np.linspace(self.lambda_min, self.lambda_max, self.lambda_steps)

    def estimator_config(self, scheme: str, n: int) -> EstimatorConfig:
        """Rates and window for one scheme and sample size

        :type scheme: str
        :param scheme: regular | poisson
        :type n: int
        :param n: Sample size
        :rtype: EstimatorConfig
        :returns: Estimator parameters
        """

        if scheme == "regular":
            return regular_config(n, self.kernel_instance, self.p, self.q, self.P, self.Q)

        if scheme == "poisson":
            return poisson_window(n, self.kernel_instance, self.poisson_rho, self.q, self.R)

        raise SpectraConfigError(f"Unknown scheme '{scheme}'")

    def updated(self, **overrides) -> "ExperimentConfig":
        """Return a copy with the given fields replaced

        :rtype: ExperimentConfig
        :returns: New validated config
        """

        return replace(self, **overrides)


def float_list(raw: str) -> tuple[float, ...]:

    return tuple(float(item) for item in raw.split(",") if item.strip())


def int_list(raw: str) -> tuple[int, ...]:

    return tuple(int(item) for item in raw.split(",") if item.strip())


def str_list(raw: str) -> tuple[str, ...]:

    return tuple(item.strip().lower() for item in raw.split(",") if item.strip())


_PARSERS: dict[str, Callable[[str], Any]] = {
    "alphas": float_list,
    "sigma": float,
    "schemes": str_list,
    "n_values": int_list,
    "replications": int,
    "lambda_min": float,
    "lambda_max": float,
    "lambda_steps": int,
    "seed": int,
    "p": float,
    "q": float,
    "P": float,
    "Q": float,
    "R": float,
    "poisson_rho": float,
    "kernel": str.strip,
    "output_dir": Path,
    "workers": int,
}


def load_config_file(path: Union[str, Path]) -> ConfigValues:
    """Read a flat key=value config file

    Raises SpectraConfigError for a missing file, unknown keys or unparsable values.

    :type path: str or Path
    :param path: Config file path
    :rtype: dict
    :returns: Parsed values by key
    """

    config_path = Path(path)
    if not config_path.is_file():
        raise SpectraConfigError(f"Config file {config_path} does not exist!")

    raw_values = dotenv_values(config_path)

    unknown = sorted(set(raw_values) - set(_PARSERS))
    if unknown:
        raise SpectraConfigError(f"Unknown keys in {config_path}: {', '.join(unknown)}")

    values = {}
    for key, raw in raw_values.items():
        if raw is None or not raw.strip():
            raise SpectraConfigError(f"Key '{key}' in {config_path} has no value")
        try:
            values[key] = _PARSERS[key](raw)
        except ValueError as exp:
            raise SpectraConfigError(f"Invalid value for '{key}' in {config_path}: {raw}") from exp

    return values


def config_from_values(values: ConfigValues) -> ExperimentConfig:
    """Build an experiment config from flat values, defaults filling the gaps

    :type values: dict
    :param values: Values keyed like the config file
    :rtype: ExperimentConfig
    :returns: Validated config
    """

    settings = dict(values)
    unknown = sorted(set(settings) - set(_PARSERS))
    if unknown:
        raise SpectraConfigError(f"Unknown settings: {', '.join(unknown)}")

    alphas = settings.pop("alphas", DEFAULT_ALPHAS)
    sigma = settings.pop("sigma", DEFAULT_SIGMA)

    return ExperimentConfig(model=model_from_values(alphas, sigma), **settings)
