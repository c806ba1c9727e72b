"""Monte Carlo comparison of the estimators against the leading-order theory"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from ctspectra.asymptotics import TheoryCurve, theory_curve_poisson, theory_curve_regular
from ctspectra.config import ExperimentConfig
from ctspectra.constants import SCHEMES
from ctspectra.estimators import (
    EstimatorConfig,
    poisson_smoothed_estimator,
    regular_smoothed_periodogram,
)
from ctspectra.exceptions import SpectraConfigError, SpectraException, SpectraExperimentError
from ctspectra.frequency_stats import FrequencyStats
from ctspectra.process_models import CarModel, spectral_density
from ctspectra.sampling_sim import SimSeed, simulate_poisson, simulate_regular
from ctspectra.storage import write_csv
from ctspectra.svg_plot import emit_figure_row
from ctspectra.writer import writer


# (sample sizes, replications) per scale
SCALES = {
    "desk": ((100, 1000, 5000), 200),
    "full": ((100, 1000, 10000), 500),
}

# (schemes, panels of each per-n chart) per figure
FIGURES = {
    "fig1": (("regular",), ("mean", "bias", "var")),
    "fig2": (("regular", "poisson"), ("bias", "var", "mse")),
}


@dataclass(frozen=True)
class ReplicationTask:
    """Everything a worker needs to produce one replication"""

    model: CarModel
    scheme: str
    estimator: EstimatorConfig
    lambdas: np.ndarray
    seed: SimSeed


def replication_seed(master_seed: int, scheme: str, n: int, replication: int) -> SimSeed:
    """Seed of one replication; streams of other schemes and sizes stay untouched

    :rtype: SimSeed
    :returns: Seed keyed by (scheme, n, replication)
    """

    return SimSeed(master_seed, replication, stream=(SCHEMES.index(scheme), n))


def run_replication(task: ReplicationTask) -> np.ndarray:
    """Simulate one path and evaluate the scheme's estimator on the grid

    :type task: ReplicationTask
    :param task: Replication description
    :rtype: numpy.ndarray
    :returns: Estimates on the grid
    """

    config = task.estimator

    if task.scheme == "regular":
        path = simulate_regular(task.model, config.n, config.rho_n, task.seed)
        estimate = regular_smoothed_periodogram(path, config, task.lambdas)
    else:
        path = simulate_poisson(task.model, config.n, config.rho_n, task.seed)
        estimate = poisson_smoothed_estimator(
            path, config.b_n, config.rho_n, config.kernel, task.lambdas, config.demean
        )

    return estimate.values


def run_monte_carlo(config: ExperimentConfig, quiet: bool = False) -> list[FrequencyStats]:
    """Estimate mean, bias, variance and MSE per frequency for every scheme and size

    Raises SpectraExperimentError carrying (scheme, n, rep) when a replication fails.

    :type config: ExperimentConfig
    :param config: Experiment settings
    :type quiet: bool
    :param quiet: Hide the progress bar
    :rtype: list
    :returns: One row per (scheme, n, lambda)
    """

    lambdas = config.lambda_grid()
    true_phi = spectral_density(config.model, lambdas)
    stats = []

    progress = Progress(
        TextColumn("[waitspinner]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=writer.console,
        disable=quiet,
    )

    executor = ProcessPoolExecutor(config.workers) if config.workers > 1 else None

    try:
        with progress:
            for scheme in config.schemes:
                for n in config.n_values:
                    estimator = config.estimator_config(scheme, n)
                    tasks = [
                        ReplicationTask(
                            config.model,
                            scheme,
                            estimator,
                            lambdas,
                            replication_seed(config.seed, scheme, n, rep),
                        )
                        for rep in range(config.replications)
                    ]

                    progress_task = progress.add_task(f"{scheme} n={n}", total=len(tasks))
                    rows = []
                    for _, values in _ordered_results(tasks, executor, scheme, n):
                        rows.append(values)
                        progress.advance(progress_task)

                    estimates = np.vstack(rows)
                    theory = _theory_curve(config.model, scheme, lambdas, estimator)
                    stats.extend(_aggregate(scheme, n, lambdas, true_phi, estimates, theory))

    finally:
        if executor is not None:
            executor.shutdown()

    return stats


def reproduce_figure(
    figure: str,
    scale: str,
    seed: int,
    output_dir: Union[str, Path],
    workers: int = 1,
    quiet: bool = False,
) -> list[Path]:
    """Rerun a simulation study figure and write its CSV and per-size charts

    fig1 covers regular sampling with mean, bias and variance panels; fig2 compares
    both schemes with bias, variance and log-scale MSE panels.

    :type figure: str
    :param figure: fig1 | fig2
    :type scale: str
    :param scale: desk | full
    :type seed: int
    :param seed: Master seed
    :type output_dir: str or Path
    :param output_dir: Output directory
    :type workers: int
    :param workers: Worker processes
    :type quiet: bool
    :param quiet: Hide the progress bar
    :rtype: list
    :returns: Written files, CSV first
    """

    if figure not in FIGURES:
        raise SpectraConfigError(f"Unknown figure '{figure}', expected {' | '.join(FIGURES)}")

    if scale not in SCALES:
        raise SpectraConfigError(f"Unknown scale '{scale}', expected {' | '.join(SCALES)}")

    schemes, panels = FIGURES[figure]
    n_values, replications = SCALES[scale]

    config = ExperimentConfig(
        schemes=schemes,
        n_values=n_values,
        replications=replications,
        seed=seed,
        output_dir=Path(output_dir),
        workers=workers,
    )

    stats = run_monte_carlo(config, quiet=quiet)

    csv_path = config.output_dir / f"{figure}_{scale}.csv"
    write_csv(stats, csv_path)
    written = [csv_path]

    for n in config.n_values:
        rows = [row for row in stats if row.n == n]
        svg_path = config.output_dir / f"{figure}_{scale}_n{n}.svg"
        written.append(emit_figure_row(rows, panels, svg_path))

    return written


def _ordered_results(
    tasks: list[ReplicationTask],
    executor: Optional[ProcessPoolExecutor],
    scheme: str,
    n: int,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield replication results in replication order, wrapping failures with context"""

    results = executor.map(run_replication, tasks) if executor else map(run_replication, tasks)
    completed = 0

    try:
        for values in results:
            yield completed, values
            completed += 1
    except SpectraException as exp:
        raise SpectraExperimentError(
            f"Replication failed (scheme={scheme}, n={n}, rep={completed}): {exp}"
        ) from exp


def _theory_curve(
    model: CarModel, scheme: str, lambdas: np.ndarray, estimator: EstimatorConfig
) -> TheoryCurve:

    if scheme == "regular":
        return theory_curve_regular(model, lambdas, estimator)

    return theory_curve_poisson(model, lambdas, estimator)


def _aggregate(
    scheme: str,
    n: int,
    lambdas: np.ndarray,
    true_phi: np.ndarray,
    estimates: np.ndarray,
    theory: TheoryCurve,
) -> list[FrequencyStats]:
    """Reduce a replications x grid matrix to per-frequency statistics

    The variance uses the replication count as denominator.
    """

    mean = estimates.mean(axis=0)
    variance = estimates.var(axis=0)
    bias = mean - true_phi
    mse = bias**2 + variance

    return [
        FrequencyStats(
            scheme=scheme,
            n=n,
            lam=float(lambdas[index]),
            mean_est=float(mean[index]),
            true_phi=float(true_phi[index]),
            bias_emp=float(bias[index]),
            bias_theory=float(theory.bias_theory[index]),
            var_emp=float(variance[index]),
            var_theory=float(theory.var_theory[index]),
            mse_emp=float(mse[index]),
            mse_theory=float(theory.mse_theory[index]),
        )
        for index in range(lambdas.size)
    ]
