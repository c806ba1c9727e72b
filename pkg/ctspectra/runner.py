from pathlib import Path
from typing import Optional

import numpy as np
from rich.table import Table

from ctspectra.asymptotics import (
    TheoryCurve,
    minimal_variance_ratio,
    mse_rate_exponents,
    non_integer_crossover,
    optimal_poisson_rate,
    theory_curve_poisson,
    theory_curve_regular,
    variance_ratio,
)
from ctspectra.config import ExperimentConfig
from ctspectra.constants import BURN_IN_TOL
from ctspectra.estimators import (
    EstimatorConfig,
    SpectralEstimate,
    optimal_rates_regular,
    optimal_window_poisson,
    poisson_smoothed_estimator,
    regular_rate_exponents,
    regular_smoothed_periodogram,
)
from ctspectra.exceptions import SpectraConfigError
from ctspectra.experiment import FIGURES, reproduce_figure, run_monte_carlo
from ctspectra.frequency_stats import FrequencyStats
from ctspectra.process_models import burn_in_time, covariance
from ctspectra.sampling_sim import (
    SamplePath,
    SchemeKind,
    SimSeed,
    path_from_samples,
    simulate_poisson,
    simulate_regular,
)
from ctspectra.storage import (
    read_path_csv,
    write_asymptotics_csv,
    write_csv,
    write_estimate_csv,
    write_path_csv,
)
from ctspectra.svg_plot import emit_figure_row
from ctspectra.writer import writer


class SpectraRunner:
    """Main control point of the command line tool

    :type config: ExperimentConfig
    :param config: Settings merged from defaults, config file and flags
    :type quiet: bool
    :param quiet: Hide progress bars
    """

    def __init__(self, config: ExperimentConfig, quiet: bool = False) -> None:

        self.config = config
        self.quiet = quiet

    def simulate(self, scheme: str, n: int, rho: Optional[float], out: Path) -> SamplePath:
        """Simulate one path and write it as t,x rows

        :type scheme: str
        :param scheme: regular | poisson
        :type n: int
        :param n: Sample size
        :type rho: float
        :param rho: Sampling rate, the scheme default when None
        :type out: Path
        :param out: Output CSV
        :rtype: SamplePath
        :returns: Simulated path
        """

        rate = rho if rho is not None else self._default_rate(scheme, n)
        path = self._simulate(scheme, n, rate)
        write_path_csv(path, out)

        table = writer.parameter_table(
            "Simulated path",
            [
                ("model", str(self.config.model)),
                ("scheme", str(path.scheme)),
                ("samples", str(len(path))),
                ("burn-in time", f"{burn_in_time(self.config.model, BURN_IN_TOL):.3f}"),
                ("sample variance", f"{np.mean(path.values**2):.6g}"),
                ("C(0)", f"{covariance(self.config.model, 0.0):.6g}"),
            ],
        )
        writer.print(table)
        writer.print(f"[success]Path written to[/] [path]{out}[/]")

        return path

    def estimate(
        self,
        scheme: str,
        n: Optional[int],
        rho: Optional[float],
        b_n: Optional[float],
        auto_rates: bool,
        out: Path,
        input_path: Optional[Path] = None,
    ) -> SpectralEstimate:
        """Estimate the spectral density from a simulated or stored path

        :type scheme: str
        :param scheme: regular | poisson
        :type n: int
        :param n: Sample size, taken from the file with input_path
        :type rho: float
        :param rho: Sampling rate
        :type b_n: float
        :param b_n: Window width
        :type auto_rates: bool
        :param auto_rates: Use the optimal rate and window rules
        :type out: Path
        :param out: Output CSV
        :type input_path: Path
        :param input_path: Stored t,x path to estimate from
        :rtype: SpectralEstimate
        :returns: Estimate on the configured grid
        """

        if input_path is not None:
            times, values = read_path_csv(input_path)
            path = path_from_samples(times, values, SchemeKind(scheme), rho)
            estimator = self.estimator_config(scheme, len(path), path.scheme.rho, b_n, auto_rates)
        else:
            if n is None:
                raise SpectraConfigError("Sample size --n is required without --input")
            estimator = self.estimator_config(scheme, n, rho, b_n, auto_rates)
            path = self._simulate(scheme, n, estimator.rho_n)

        lambdas = self.config.lambda_grid()
        with writer.status("Evaluating the estimator"):
            if scheme == "regular":
                estimate = regular_smoothed_periodogram(path, estimator, lambdas)
            else:
                estimate = poisson_smoothed_estimator(
                    path, estimator.b_n, estimator.rho_n, estimator.kernel, lambdas
                )

        write_estimate_csv(estimate, out)

        writer.print(self._rates_table(scheme, estimator))
        writer.print(f"[success]Estimate written to[/] [path]{out}[/]")

        return estimate

    def asymptotics(
        self,
        scheme: str,
        n: int,
        rho: Optional[float],
        b_n: Optional[float],
        auto_rates: bool,
        out: Path,
    ) -> TheoryCurve:
        """Write the leading-order bias and variance over the grid

        :rtype: TheoryCurve
        :returns: Theory values
        """

        estimator = self.estimator_config(scheme, n, rho, b_n, auto_rates)
        lambdas = self.config.lambda_grid()

        with writer.status("Computing theory curves"):
            if scheme == "regular":
                curve = theory_curve_regular(self.config.model, lambdas, estimator)
            else:
                curve = theory_curve_poisson(self.config.model, lambdas, estimator)

        write_asymptotics_csv(curve, out)

        writer.print(self._rates_table(scheme, estimator))
        writer.print(f"[success]Theory curves written to[/] [path]{out}[/]")

        return curve

    def compare(self, out_dir: Path) -> list[FrequencyStats]:
        """Run both schemes, print the comparison summary and write CSV and charts

        :type out_dir: Path
        :param out_dir: Output directory
        :rtype: list
        :returns: Monte Carlo statistics
        """

        config = self.config.updated(schemes=("regular", "poisson"), output_dir=out_dir)
        for table in self._comparison_tables(config):
            writer.print(table)

        stats = run_monte_carlo(config, quiet=self.quiet)

        csv_path = out_dir / "compare.csv"
        write_csv(stats, csv_path)
        _, panels = FIGURES["fig2"]
        for n in config.n_values:
            emit_figure_row(
                [row for row in stats if row.n == n], panels, out_dir / f"compare_n{n}.svg"
            )

        writer.print(self._mse_table(stats))
        writer.print(f"[success]Comparison written to[/] [path]{out_dir}[/]")

        return stats

    def reproduce(self, figure: str, scale: str, seed: int, out_dir: Path) -> list[Path]:
        """Rerun a simulation study figure

        :rtype: list
        :returns: Written files
        """

        written = reproduce_figure(
            figure, scale, seed, out_dir, workers=self.config.workers, quiet=self.quiet
        )

        for path in written:
            writer.print(f"[success]Wrote[/] [path]{path}[/]")

        return written

    def estimator_config(
        self,
        scheme: str,
        n: int,
        rho: Optional[float],
        b_n: Optional[float],
        auto_rates: bool,
    ) -> EstimatorConfig:
        """Resolve the sampling rate and window width of one run

        With auto_rates the optimal rules fill whatever is not given: the regular rate
        and window, or the Poisson window at the configured mean rate.

        :rtype: EstimatorConfig
        :returns: Estimator parameters
        """

        if scheme not in ("regular", "poisson"):
            raise SpectraConfigError(f"Unknown scheme '{scheme}'")

        config = self.config
        if auto_rates:
            if scheme == "regular":
                auto_rho, auto_b = optimal_rates_regular(n, config.p, config.q, config.P, config.Q)
            else:
                auto_rho, auto_b = config.poisson_rho, optimal_window_poisson(n, config.q, config.R)
            rho = rho if rho is not None else auto_rho
            b_n = b_n if b_n is not None else auto_b

        if rho is None and scheme == "poisson":
            rho = config.poisson_rho

        if rho is None or b_n is None:
            raise SpectraConfigError("Give --rho and --bn, or use --auto-rates")

        return EstimatorConfig(
            n=n,
            rho_n=rho,
            b_n=b_n,
            kernel=config.kernel_instance,
            q=config.q,
            p=config.p,
            P=config.P,
            Q=config.Q,
            R=config.R,
        )

    def _default_rate(self, scheme: str, n: int) -> float:

        if scheme == "regular":
            rho, _ = optimal_rates_regular(n, self.config.p, self.config.q, self.config.P, self.config.Q)
            return rho

        return self.config.poisson_rho

    def _simulate(self, scheme: str, n: int, rho: float) -> SamplePath:

        seed = SimSeed(self.config.seed)

        with writer.status(f"Simulating {n} {scheme} samples"):
            if scheme == "regular":
                return simulate_regular(self.config.model, n, rho, seed)
            if scheme == "poisson":
                return simulate_poisson(self.config.model, n, rho, seed)

        raise SpectraConfigError(f"Unknown scheme '{scheme}'")

    def _rates_table(self, scheme: str, estimator: EstimatorConfig) -> Table:

        return writer.parameter_table(
            f"{scheme} estimator",
            [
                ("n", str(estimator.n)),
                ("rho", f"{estimator.rho_n:.6g}"),
                ("b_n", f"{estimator.b_n:.6g}"),
                ("rho * b_n", f"{estimator.rho_n * estimator.b_n:.6g}"),
                ("kernel", estimator.kernel.name),
            ],
        )

    def _comparison_tables(self, config: ExperimentConfig) -> list[Table]:

        rho_exponent, b_exponent = regular_rate_exponents(config.p, config.q)
        regular_mse, poisson_mse = mse_rate_exponents(config.p, config.q)
        crossover = non_integer_crossover(config.q)

        summary = Table(title="Rates of convergence", title_style="banner")
        summary.add_column("quantity", style="param")
        summary.add_column("regular", style="value")
        summary.add_column("poisson", style="value")
        summary.add_row("rho_n exponent", str(rho_exponent), "0")
        summary.add_row("b_n exponent", f"-{b_exponent}", f"-1/{2 * int(config.q) + 1}")
        summary.add_row("MSE exponent", f"-{regular_mse}", f"-{poisson_mse}")
        summary.add_row(
            "regular faster when p >",
            "never" if crossover is None else str(crossover),
            "",
        )

        ratios = Table(title="Poisson / regular variance constants", title_style="banner")
        ratios.add_column("lambda", style="param")
        ratios.add_column(f"ratio at rho={config.poisson_rho:g}", style="value")
        ratios.add_column("optimal rho", style="value")
        ratios.add_column("minimal ratio", style="value")

        grid = config.lambda_grid()
        for lam in np.unique(grid[[0, grid.size // 2, -1]]):
            ratios.add_row(
                f"{lam:.4f}",
                f"{variance_ratio(config.model, lam, config.poisson_rho, config.Q, config.R):.4g}",
                f"{optimal_poisson_rate(config.model, lam):.4g}",
                f"{minimal_variance_ratio(config.model, lam, config.Q, config.R):.4g}",
            )

        return [summary, ratios]

    def _mse_table(self, stats: list[FrequencyStats]) -> Table:

        table = Table(title="Grid-averaged MSE", title_style="banner")
        table.add_column("scheme", style="param")
        table.add_column("n", style="param")
        table.add_column("empirical", style="value")
        table.add_column("theory", style="value")

        keys = sorted({(row.scheme, row.n) for row in stats})
        for scheme, n in keys:
            rows = [row for row in stats if row.scheme == scheme and row.n == n]
            table.add_row(
                scheme,
                str(n),
                f"{np.mean([row.mse_emp for row in rows]):.4g}",
                f"{np.mean([row.mse_theory for row in rows]):.4g}",
            )

        return table
