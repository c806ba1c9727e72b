import math

import numpy as np
import pytest

from ctspectra.asymptotics import (
    bias_poisson,
    bias_regular,
    exact_mean_poisson,
    exact_mean_regular,
)
from ctspectra.config import ExperimentConfig
from ctspectra.exceptions import SpectraConfigError, SpectraExperimentError, SpectraSimulationError
from ctspectra.experiment import (
    ReplicationTask,
    replication_seed,
    reproduce_figure,
    run_monte_carlo,
    run_replication,
)
from ctspectra.estimators import regular_config, poisson_window
from ctspectra.kernels import l2_norm_sq
from ctspectra.process_models import spectral_density
from ctspectra.sampling_sim import SimSeed
from ctspectra.storage import read_csv


def small_config(**overrides):

    settings = dict(n_values=(32,), replications=4, lambda_steps=9, seed=5)
    settings.update(overrides)

    return ExperimentConfig(**settings)


def test_replication_seeds_are_keyed():

    seed = replication_seed(7, "poisson", 100, 3)

    assert seed == SimSeed(7, 3, stream=(1, 100))
    assert seed != replication_seed(7, "regular", 100, 3)
    assert seed != replication_seed(7, "poisson", 1000, 3)


def test_run_replication_is_reproducible(car_model, hanning):

    task = ReplicationTask(
        car_model,
        "poisson",
        poisson_window(64, hanning, 1.0),
        np.linspace(0.0, 1.0, 5),
        replication_seed(1, "poisson", 64, 0),
    )

    np.testing.assert_array_equal(run_replication(task), run_replication(task))


def test_run_monte_carlo_shapes_and_identities():

    config = small_config()

    stats = run_monte_carlo(config, quiet=True)

    assert len(stats) == 2 * 9
    assert {row.scheme for row in stats} == {"regular", "poisson"}
    for row in stats:
        assert row.n == 32
        assert row.var_emp >= 0
        assert row.bias_emp == pytest.approx(row.mean_est - row.true_phi)
        assert row.mse_emp == pytest.approx(row.bias_emp**2 + row.var_emp)
        assert row.mse_theory == pytest.approx(row.bias_theory**2 + row.var_theory)


def test_run_monte_carlo_is_deterministic():

    config = small_config(schemes=("regular",))

    assert run_monte_carlo(config, quiet=True) == run_monte_carlo(config, quiet=True)


def test_parallel_run_matches_serial_run():

    config = small_config()

    serial = run_monte_carlo(config, quiet=True)
    parallel = run_monte_carlo(config.updated(workers=2), quiet=True)

    assert parallel == serial


def test_replication_failure_carries_context(monkeypatch):

    calls = []

    def failing(task):
        calls.append(task)
        if len(calls) == 3:
            raise SpectraSimulationError("gap covariance broke")
        return np.zeros(task.lambdas.size)

    monkeypatch.setattr("ctspectra.experiment.run_replication", failing)

    with pytest.raises(SpectraExperimentError, match=r"scheme=regular, n=32, rep=2") as info:
        run_monte_carlo(small_config(schemes=("regular",)), quiet=True)

    assert isinstance(info.value.__cause__, SpectraSimulationError)


def test_reproduce_figure_rejects_unknown_names(tmp_path):

    with pytest.raises(SpectraConfigError):
        reproduce_figure("fig3", "desk", 1, tmp_path)

    with pytest.raises(SpectraConfigError):
        reproduce_figure("fig1", "huge", 1, tmp_path)


@pytest.mark.slow
def test_reproduce_fig1_desk(tmp_path):

    written = reproduce_figure("fig1", "desk", 7, tmp_path, quiet=True)

    assert [path.name for path in written] == [
        "fig1_desk.csv",
        "fig1_desk_n100.svg",
        "fig1_desk_n1000.svg",
        "fig1_desk_n5000.svg",
    ]

    stats = read_csv(written[0])
    assert len(stats) == 3 * 65

    at_zero = next(row for row in stats if row.n == 1000 and row.lam == 0.0)
    assert at_zero.bias_emp < 0

    grid = [row for row in stats if row.n == 5000 and row.lam >= 0.5]
    for row in grid:
        ratio = row.var_emp / row.var_theory
        assert 0.5 <= ratio <= 2.0


@pytest.mark.slow
def test_reproduce_fig2_desk_is_deterministic(tmp_path):

    first = reproduce_figure("fig2", "desk", 7, tmp_path / "first", quiet=True)
    second = reproduce_figure("fig2", "desk", 7, tmp_path / "second", quiet=True)

    assert first[0].read_bytes() == second[0].read_bytes()

    stats = read_csv(first[0])
    largest = max(row.n for row in stats)
    at_edge = {
        row.scheme: row for row in stats if row.n == largest and row.lam == pytest.approx(math.pi / 2)
    }
    assert at_edge["poisson"].var_emp > at_edge["regular"].var_emp
    assert at_edge["poisson"].mse_emp > at_edge["regular"].mse_emp

    for scheme in ("regular", "poisson"):
        averages = [
            np.mean([row.mse_emp for row in stats if row.scheme == scheme and row.n == n])
            for n in (100, 1000, 5000)
        ]
        assert averages[0] > averages[1] > averages[2]


@pytest.mark.slow
def test_regular_estimator_mean_matches_exact_mean(car_model, hanning):

    n, lam = 10_000, 1.0
    config = regular_config(n, hanning)
    task_values = [
        run_replication(
            ReplicationTask(car_model, "regular", config, np.array([lam]), SimSeed(13, rep))
        )[0]
        for rep in range(500)
    ]

    estimates = np.array(task_values)
    expected = exact_mean_regular(car_model, lam, n, config.rho_n, config.b_n, hanning)
    error = estimates.std() / math.sqrt(estimates.size)

    assert abs(estimates.mean() - expected) <= 4 * error

    theory = spectral_density(car_model, lam) + bias_regular(
        car_model, lam, n, config.rho_n, config.b_n, 2, 8, hanning
    ).total
    assert abs(estimates.mean() - theory) <= 4 * error + 0.1 * abs(theory - spectral_density(car_model, lam))

    ratio = estimates.var() / (spectral_density(car_model, lam) ** 2 * l2_norm_sq(hanning) / (n * config.b_n))
    assert 0.5 <= ratio <= 2.0


@pytest.mark.slow
def test_poisson_estimator_mean_matches_exact_mean(car_model, hanning):

    n, lam = 10_000, 1.0
    config = poisson_window(n, hanning, 1.0)
    estimates = np.array([
        run_replication(
            ReplicationTask(car_model, "poisson", config, np.array([lam]), SimSeed(17, rep))
        )[0]
        for rep in range(500)
    ])

    expected = exact_mean_poisson(car_model, lam, n, 1.0, config.b_n, hanning)
    error = estimates.std() / math.sqrt(estimates.size)

    assert abs(estimates.mean() - expected) <= 4 * error

    leading = spectral_density(car_model, lam) + bias_poisson(car_model, lam, config.b_n, n, 2, hanning)
    assert abs(expected - leading) <= 0.2 * abs(expected - spectral_density(car_model, lam)) + 2 * error
