from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Optional, Sequence

from ctspectra.config import (
    ConfigValues,
    ExperimentConfig,
    config_from_values,
    float_list,
    int_list,
    load_config_file,
)
from ctspectra.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_FAILURE,
    EXIT_NUMERIC_ERROR,
    EXIT_OK,
    SCHEMES,
)
from ctspectra.exceptions import (
    SpectraConfigError,
    SpectraException,
    SpectraExperimentError,
    SpectraNumericError,
)
from ctspectra.experiment import FIGURES, SCALES
from ctspectra.kernels import KERNELS
from ctspectra.runner import SpectraRunner
from ctspectra.theme_config import ThemeIndex
from ctspectra.writer import writer


# flags that map one to one onto ExperimentConfig settings
CONFIG_FLAGS = (
    "alphas",
    "sigma",
    "kernel",
    "p",
    "q",
    "P",
    "Q",
    "R",
    "poisson_rho",
    "lambda_min",
    "lambda_max",
    "lambda_steps",
    "seed",
    "workers",
    "n_values",
    "replications",
)


def handle_exception(exp: SpectraException) -> int:
    """Print the error message and return the exit code

    Config errors give 2 and numeric failures 3, also when they caused an experiment
    failure. Everything else gives 1.

    :type exp: SpectraException
    :param exp: Exception raised by the tool
    :rtype: int
    :returns: Exit code
    """

    writer.print(f"[error]{exp}[/]")

    cause = exp.__cause__ if isinstance(exp, SpectraExperimentError) else exp

    if isinstance(cause, SpectraConfigError):
        return EXIT_CONFIG_ERROR

    if isinstance(cause, SpectraNumericError):
        return EXIT_NUMERIC_ERROR

    return EXIT_FAILURE


def get_arg_parser() -> ArgumentParser:
    """Get argument parser

    :rtype: ArgumentParser
    :returns: ArgumentParser object
    """

    common = ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=Path, help="Flat key=value config file")
    common.add_argument(
        "-th",
        "--theme",
        default=1,
        type=int,
        choices=[int(index) for index in ThemeIndex],
        help="Change theme, 3 for plain output",
    )
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")
    common.add_argument("--alphas", type=float_list, help="Comma separated decay rates")
    common.add_argument("--sigma", type=float, help="Driving noise scale")
    common.add_argument("--kernel", choices=tuple(KERNELS), help="Lag-window kernel")
    common.add_argument("--p", type=float, help="Decay exponent of the spectral density")
    common.add_argument("--q", type=float, help="Smoothness exponent of the spectral density")
    common.add_argument("--P", type=float, help="Rate constant of the regular sampling rate")
    common.add_argument("--Q", type=float, help="Window constant for regular sampling")
    common.add_argument("--R", type=float, help="Window constant for Poisson sampling")
    common.add_argument("--poisson-rho", type=float, help="Mean Poisson sampling rate")
    common.add_argument("--lambda-min", type=float, help="Lowest grid frequency")
    common.add_argument("--lambda-max", type=float, help="Highest grid frequency")
    common.add_argument("--lambda-steps", type=int, help="Number of grid frequencies")
    common.add_argument("--seed", type=int, help="Master seed")
    common.add_argument("--workers", type=int, help="Worker processes for replications")

    arg_parser = ArgumentParser(
        prog="ctspectra",
        description="Spectral density estimation from regular and Poisson sampled data",
    )
    commands = arg_parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", parents=[common], help="Simulate a sample path")
    simulate.add_argument("--scheme", choices=SCHEMES, default="regular")
    simulate.add_argument("--n", type=int, required=True, help="Sample size")
    simulate.add_argument("--rho", type=float, help="Sampling rate")
    simulate.add_argument("--out", type=Path, help="Output CSV (t,x)")

    estimate = commands.add_parser("estimate", parents=[common], help="Estimate the spectral density")
    _add_rate_arguments(estimate)
    estimate.add_argument("--input", type=Path, help="Estimate from a stored t,x path")
    estimate.add_argument("--out", type=Path, help="Output CSV (lambda,estimate)")

    asymptotics = commands.add_parser(
        "asymptotics", parents=[common], help="Leading-order bias and variance"
    )
    _add_rate_arguments(asymptotics)
    asymptotics.add_argument("--out", type=Path, help="Output CSV")

    compare = commands.add_parser(
        "compare", parents=[common], help="Monte Carlo comparison of both schemes"
    )
    compare.add_argument("--n-values", type=int_list, help="Comma separated sample sizes")
    compare.add_argument("--replications", type=int, help="Replications per sample size")
    compare.add_argument("--out", type=Path, help="Output directory")

    reproduce = commands.add_parser(
        "reproduce", parents=[common], help="Rerun a simulation study figure"
    )
    reproduce.add_argument("--figure", choices=tuple(FIGURES), default="fig1")
    reproduce.add_argument("--scale", choices=tuple(SCALES), default="desk")
    reproduce.add_argument("--out", type=Path, help="Output directory")

    return arg_parser


def _add_rate_arguments(parser: ArgumentParser) -> None:

    parser.add_argument("--scheme", choices=SCHEMES, default="regular")
    parser.add_argument("--n", type=int, help="Sample size")
    parser.add_argument("--rho", type=float, help="Sampling rate")
    parser.add_argument("--bn", type=float, help="Window width")
    parser.add_argument(
        "--auto-rates", action="store_true", help="Use the optimal rate and window rules"
    )


def build_config(args: Namespace) -> ExperimentConfig:
    """Merge defaults, the config file and explicit flags, later ones winning

    :type args: Namespace
    :param args: Parsed arguments
    :rtype: ExperimentConfig
    :returns: Validated config
    """

    values: ConfigValues = load_config_file(args.config) if args.config else {}

    for key in CONFIG_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value

    if getattr(args, "n", None) is not None:
        values["n_values"] = (args.n,)

    return config_from_values(values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for ctspectra

    :type argv: list
    :param argv: Arguments, sys.argv when None
    :rtype: int
    :returns: Exit code
    """

    arg_parser = get_arg_parser()
    args = arg_parser.parse_args(argv)

    if args.theme:
        writer.set_theme(args.theme)

    try:
        config = build_config(args)
        runner = SpectraRunner(config, quiet=args.quiet)

        if args.command == "simulate":
            runner.simulate(
                args.scheme, args.n, args.rho, args.out or config.output_dir / "path.csv"
            )

        elif args.command == "estimate":
            runner.estimate(
                args.scheme,
                args.n,
                args.rho,
                args.bn,
                args.auto_rates,
                args.out or config.output_dir / "estimate.csv",
                input_path=args.input,
            )

        elif args.command == "asymptotics":
            if args.n is None:
                raise SpectraConfigError("Sample size --n is required")
            runner.asymptotics(
                args.scheme,
                args.n,
                args.rho,
                args.bn,
                args.auto_rates,
                args.out or config.output_dir / "asymptotics.csv",
            )

        elif args.command == "compare":
            runner.compare(args.out or config.output_dir)

        elif args.command == "reproduce":
            runner.reproduce(args.figure, args.scale, config.seed, args.out or config.output_dir)

    except SpectraException as exp:
        return handle_exception(exp)

    return EXIT_OK
