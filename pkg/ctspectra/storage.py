import csv
from contextlib import contextmanager
from pathlib import Path
from typing import Generator, Iterable, TextIO, Union

import numpy as np

from ctspectra.asymptotics import TheoryCurve
from ctspectra.constants import (
    ASYMPTOTICS_CSV_HEADER,
    ESTIMATE_CSV_HEADER,
    PATH_CSV_HEADER,
    STATS_CSV_COMMENT,
    STATS_CSV_HEADER,
)
from ctspectra.estimators import SpectralEstimate
from ctspectra.exceptions import SpectraStorageError
from ctspectra.frequency_stats import FrequencyStats
from ctspectra.sampling_sim import SamplePath


PathLike = Union[str, Path]
StatsList = list[FrequencyStats]


@contextmanager
def _csv_file(path: PathLike, mode: str) -> Generator[TextIO, None, None]:
    """Open a CSV file, turning I/O and parse failures into SpectraStorageError

    Parent directories are created when writing.
    """

    file_path = Path(path)

    try:
        if "w" in mode:
            file_path.parent.mkdir(parents=True, exist_ok=True)

        with open(file_path, mode, newline="", encoding="utf-8") as csv_file:
            yield csv_file

    except OSError as exp:
        raise SpectraStorageError(f"Failed to access {file_path}: {exp.strerror}") from exp

    except (ValueError, KeyError, csv.Error) as exp:
        raise SpectraStorageError(f"Malformed CSV file {file_path}: {exp}") from exp


def _format(value: float) -> str:

    return f"{value:.17g}"


def _write_columns(path: PathLike, header: tuple[str, ...], columns: Iterable) -> None:

    with _csv_file(path, "w") as csv_file:
        csv_writer = csv.writer(csv_file, lineterminator="\n")
        csv_writer.writerow(header)
        for row in zip(*columns):
            csv_writer.writerow([_format(value) for value in row])


def write_path_csv(path: SamplePath, file_path: PathLike) -> None:
    """Write a sample path as t,x rows

    :type path: SamplePath
    :param path: Simulated path
    :type file_path: str or Path
    :param file_path: Output file
    """

    _write_columns(file_path, PATH_CSV_HEADER, (path.times, path.values))


def read_path_csv(file_path: PathLike) -> tuple[np.ndarray, np.ndarray]:
    """Read t,x rows written by write_path_csv

    :type file_path: str or Path
    :param file_path: Input file
    :rtype: tuple
    :returns: (times, values)
    """

    with _csv_file(file_path, "r") as csv_file:
        rows = list(csv.DictReader(csv_file))
        times = np.array([float(row["t"]) for row in rows])
        values = np.array([float(row["x"]) for row in rows])

    if times.size == 0:
        raise SpectraStorageError(f"No samples found in {file_path}")

    return times, values


def write_estimate_csv(estimate: SpectralEstimate, file_path: PathLike) -> None:
    """Write an estimate as lambda,estimate rows

    :type estimate: SpectralEstimate
    :param estimate: Estimate on a grid
    :type file_path: str or Path
    :param file_path: Output file
    """

    _write_columns(file_path, ESTIMATE_CSV_HEADER, (estimate.lambdas, estimate.values))


def write_asymptotics_csv(curve: TheoryCurve, file_path: PathLike) -> None:
    """Write the bias breakdown and theoretical variance and MSE over a grid

    Schemes without a breakdown report the whole bias as the smoothing term.

    :type curve: TheoryCurve
    :param curve: Theory values
    :type file_path: str or Path
    :param file_path: Output file
    """

    zeros = np.zeros_like(curve.lambdas)
    smoothing = curve.smoothing if curve.smoothing is not None else curve.bias_theory
    truncation = curve.truncation if curve.truncation is not None else zeros
    aliasing = curve.aliasing if curve.aliasing is not None else zeros

    columns = (
        curve.lambdas,
        smoothing,
        truncation,
        aliasing,
        curve.bias_theory,
        curve.var_theory,
        curve.mse_theory,
    )

    _write_columns(file_path, ASYMPTOTICS_CSV_HEADER, columns)


def write_csv(stats: StatsList, file_path: PathLike) -> None:
    """Write Monte Carlo statistics sorted by (scheme, n, lambda)

    Raises SpectraStorageError for empty input; no file is created then.

    :type stats: list
    :param stats: Statistics rows
    :type file_path: str or Path
    :param file_path: Output file
    """

    if not stats:
        raise SpectraStorageError(f"No statistics to write to {file_path}")

    with _csv_file(file_path, "w") as csv_file:
        csv_file.write(STATS_CSV_COMMENT + "\n")
        csv_writer = csv.writer(csv_file, lineterminator="\n")
        csv_writer.writerow(STATS_CSV_HEADER)
        for row in sorted(stats, key=lambda item: item.sort_key):
            csv_writer.writerow(row.get_csv_row())


def read_csv(file_path: PathLike) -> StatsList:
    """Parse a statistics file written by write_csv

    :type file_path: str or Path
    :param file_path: Input file
    :rtype: list
    :returns: Statistics rows in file order
    """

    with _csv_file(file_path, "r") as csv_file:
        lines = (line for line in csv_file if not line.startswith("#"))
        reader = csv.DictReader(lines)

        if tuple(reader.fieldnames or ()) != STATS_CSV_HEADER:
            raise SpectraStorageError(f"Unexpected header in {file_path}: {reader.fieldnames}")

        return [
            FrequencyStats(
                scheme=row["scheme"],
                n=int(row["n"]),
                lam=float(row["lambda"]),
                **{name: float(row[name]) for name in STATS_CSV_HEADER[3:]},
            )
            for row in reader
        ]
