"""Standalone SVG line charts of Monte Carlo statistics"""

import html
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from ctspectra.constants import PANELS
from ctspectra.exceptions import SpectraConfigError, SpectraStorageError
from ctspectra.frequency_stats import FrequencyStats


PANEL_WIDTH = 380
PANEL_HEIGHT = 280
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 34
MARGIN_BOTTOM = 46
TICK_COUNT = 5
LOG_FLOOR = 1e-300

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

PANEL_TITLES = {
    "mean": "mean estimate",
    "bias": "bias",
    "var": "variance",
    "mse": "MSE",
}


@dataclass(frozen=True)
class Curve:
    """One polyline of a panel

    :type label: str
    :param label: Legend text
    :type xs: numpy.ndarray
    :param xs: Horizontal values
    :type ys: numpy.ndarray
    :param ys: Vertical values
    :type color: str
    :param color: Stroke color
    :type dotted: bool
    :param dotted: Dotted instead of solid stroke
    """

    label: str
    xs: np.ndarray
    ys: np.ndarray
    color: str
    dotted: bool = False


class SvgCanvas:
    """Accumulates SVG elements and renders the document"""

    def __init__(self, width: float, height: float) -> None:

        self.width = width
        self.height = height
        self.elements: list[str] = []

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "#000000") -> None:

        self.elements.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="1"/>'
        )

    def polyline(self, points: Iterable[tuple[float, float]], stroke: str, dotted: bool) -> None:

        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        dash = ' stroke-dasharray="2,3"' if dotted else ""
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="1.5"{dash}/>'
        )

    def text(
        self,
        x: float,
        y: float,
        content: str,
        anchor: str = "middle",
        size: int = 11,
        vertical: bool = False,
    ) -> None:

        turn = f' transform="rotate(-90 {x:.2f} {y:.2f})"' if vertical else ""
        self.elements.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{turn}>{html.escape(content)}</text>'
        )

    def rect(self, x: float, y: float, width: float, height: float, fill: str) -> None:

        self.elements.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{width:.2f}" height="{height:.2f}" '
            f'fill="{fill}"/>'
        )

    def get_svg(self) -> str:

        header = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
        )

        return header + "\n".join(self.elements) + "\n</svg>\n"


def panel_curves(stats: Sequence[FrequencyStats], panel: str) -> list[Curve]:
    """Build the curves of one panel

    A single scheme draws theory solid and the empirical values dotted, one pair per
    sample size. With both schemes the regular estimator is solid and the Poisson
    estimator dotted. The MSE panel is drawn on a log10 scale.

    :type stats: list
    :param stats: Statistics rows
    :type panel: str
    :param panel: mean | bias | var | mse
    :rtype: list
    :returns: Curves in drawing order
    """

    if panel not in PANELS:
        raise SpectraConfigError(f"Unknown panel '{panel}', expected {' | '.join(PANELS)}")

    if not stats:
        raise SpectraConfigError("No statistics to plot!")

    groups: dict[tuple[str, int], list[FrequencyStats]] = {}
    for row in sorted(stats, key=lambda item: item.sort_key):
        groups.setdefault((row.scheme, row.n), []).append(row)

    schemes = sorted({scheme for scheme, _ in groups})
    sizes = sorted({n for _, n in groups})
    comparison = len(schemes) > 1

    curves = []
    for (scheme, n), rows in groups.items():
        color = COLORS[sizes.index(n) % len(COLORS)]
        xs = np.array([row.lam for row in rows])
        empirical, theory = _panel_values(rows, panel)

        if comparison:
            curves.append(
                Curve(f"{scheme} n={n}", xs, empirical, color, dotted=scheme != "regular")
            )
        else:
            curves.append(Curve(f"theory n={n}", xs, theory, color))
            curves.append(Curve(f"empirical n={n}", xs, empirical, color, dotted=True))

    if panel == "mse":
        curves = [
            replace(curve, ys=np.log10(np.maximum(curve.ys, LOG_FLOOR))) for curve in curves
        ]

    return curves


def emit_svg_plot(
    stats: Sequence[FrequencyStats], panel: str, path: Union[str, Path]
) -> Path:
    """Write a single panel chart

    :type stats: list
    :param stats: Statistics rows
    :type panel: str
    :param panel: mean | bias | var | mse
    :type path: str or Path
    :param path: Output file
    :rtype: Path
    :returns: Written file
    """

    return emit_figure_row(stats, (panel,), path)


def emit_figure_row(
    stats: Sequence[FrequencyStats], panels: Sequence[str], path: Union[str, Path]
) -> Path:
    """Write several panels side by side in one chart

    :type stats: list
    :param stats: Statistics rows
    :type panels: list
    :param panels: Panel names, left to right
    :type path: str or Path
    :param path: Output file
    :rtype: Path
    :returns: Written file
    """

    if not panels:
        raise SpectraConfigError("At least one panel is needed!")

    canvas = SvgCanvas(PANEL_WIDTH * len(panels), PANEL_HEIGHT)
    canvas.rect(0, 0, canvas.width, canvas.height, "#ffffff")

    for index, panel in enumerate(panels):
        _draw_panel(canvas, panel_curves(stats, panel), panel, index * PANEL_WIDTH)

    svg_path = Path(path)
    try:
        svg_path.parent.mkdir(parents=True, exist_ok=True)
        svg_path.write_text(canvas.get_svg(), encoding="utf-8")
    except OSError as exp:
        raise SpectraStorageError(f"Failed to write {svg_path}: {exp.strerror}") from exp

    return svg_path


def _panel_values(rows: list[FrequencyStats], panel: str) -> tuple[np.ndarray, np.ndarray]:

    if panel == "mean":
        pairs = [(row.mean_est, row.true_phi) for row in rows]
    elif panel == "bias":
        pairs = [(row.bias_emp, row.bias_theory) for row in rows]
    elif panel == "var":
        pairs = [(row.var_emp, row.var_theory) for row in rows]
    else:
        pairs = [(row.mse_emp, row.mse_theory) for row in rows]

    values = np.array(pairs)

    return values[:, 0], values[:, 1]


def _axis_range(values: np.ndarray) -> tuple[float, float]:

    low, high = float(values.min()), float(values.max())
    if math.isclose(low, high):
        pad = max(abs(low), 1.0) * 0.05
        return low - pad, high + pad

    pad = 0.05 * (high - low)

    return low - pad, high + pad


def _draw_panel(canvas: SvgCanvas, curves: list[Curve], panel: str, offset: float) -> None:

    left = offset + MARGIN_LEFT
    right = offset + PANEL_WIDTH - MARGIN_RIGHT
    top = MARGIN_TOP
    bottom = PANEL_HEIGHT - MARGIN_BOTTOM

    x_low, x_high = _axis_range(np.concatenate([curve.xs for curve in curves]))
    y_low, y_high = _axis_range(np.concatenate([curve.ys for curve in curves]))

    def to_x(value: float) -> float:
        return left + (value - x_low) / (x_high - x_low) * (right - left)

    def to_y(value: float) -> float:
        return bottom - (value - y_low) / (y_high - y_low) * (bottom - top)

    canvas.line(left, bottom, right, bottom)
    canvas.line(left, bottom, left, top)

    for tick in np.linspace(x_low, x_high, TICK_COUNT):
        canvas.line(to_x(tick), bottom, to_x(tick), bottom + 4)
        canvas.text(to_x(tick), bottom + 16, f"{tick:.2f}", size=9)

    for tick in np.linspace(y_low, y_high, TICK_COUNT):
        canvas.line(left - 4, to_y(tick), left, to_y(tick))
        canvas.text(left - 6, to_y(tick) + 3, f"{tick:.3g}", anchor="end", size=9)

    if y_low < 0 < y_high:
        canvas.line(left, to_y(0.0), right, to_y(0.0), stroke="#bbbbbb")

    y_label = "log10 MSE" if panel == "mse" else PANEL_TITLES[panel]
    canvas.text((left + right) / 2, 20, PANEL_TITLES[panel], size=13)
    canvas.text((left + right) / 2, PANEL_HEIGHT - 10, "lambda")
    canvas.text(offset + 14, (top + bottom) / 2, y_label, size=10, vertical=True)

    for curve in curves:
        points = zip((to_x(x) for x in curve.xs), (to_y(y) for y in curve.ys))
        canvas.polyline(points, curve.color, curve.dotted)

    for index, curve in enumerate(curves):
        y = top + 12 + 12 * index
        dash_label = "dotted" if curve.dotted else "solid"
        canvas.text(right - 4, y, f"{curve.label} ({dash_label})", anchor="end", size=8)
