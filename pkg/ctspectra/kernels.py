"""Lag-window kernels K with K(0) = 1, their L2 norms and characteristic constants"""

import math
from abc import ABC, abstractmethod
from typing import Union

import numpy as np

from ctspectra.constants import KERNEL_LIMIT_EXPONENTS, KERNEL_LIMIT_TOL, KERNEL_NORM_TOL
from ctspectra.exceptions import (
    SpectraConfigError,
    SpectraKernelError,
    SpectraQuadratureError,
)
from ctspectra.numerics import integrate_interval, integrate_real_line


ArrayLike = Union[float, np.ndarray]


class Kernel(ABC):
    """Base covariance averaging kernel

    Subclasses set name, support_radius (math.inf when unbounded) and char_exponent,
    the order of 1 - K(x) at the origin (math.inf when K is flat there).
    """

    name: str = ""
    support_radius: float = math.inf
    char_exponent: float = math.inf

    @abstractmethod
    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the kernel on an array"""

    def one_minus(self, x: ArrayLike) -> ArrayLike:
        """Evaluate 1 - K(x)

        Subclasses override this when a closed form avoids cancellation near 0.
        """

        return 1.0 - self(x)

    @property
    def has_finite_support(self) -> bool:

        return math.isfinite(self.support_radius)

    def __call__(self, x: ArrayLike) -> ArrayLike:

        values = self._evaluate(np.asarray(x, dtype=float))

        return float(values) if np.ndim(x) == 0 else values

    def eval(self, x: ArrayLike) -> ArrayLike:

        return self(x)

    def __eq__(self, other: object) -> bool:

        return type(self) is type(other)

    def __hash__(self) -> int:

        return hash(type(self).__name__)

    def __repr__(self) -> str:

        return f"{type(self).__name__}()"


class HanningKernel(Kernel):
    """K(x) = (1 + cos(pi x)) / 2 on [-1, 1]"""

    name = "hanning"
    support_radius = 1.0
    char_exponent = 2.0

    def _evaluate(self, x: np.ndarray) -> np.ndarray:

        return np.where(np.abs(x) <= 1.0, 0.5 * (1.0 + np.cos(np.pi * x)), 0.0)

    def one_minus(self, x: ArrayLike) -> ArrayLike:

        x_arr = np.asarray(x, dtype=float)
        values = np.where(np.abs(x_arr) <= 1.0, np.sin(0.5 * np.pi * x_arr) ** 2, 1.0)

        return float(values) if np.ndim(x) == 0 else values


class RectangularKernel(Kernel):
    """K(x) = 1 on [-1, 1], flat at the origin"""

    name = "rect"
    support_radius = 1.0
    char_exponent = math.inf

    def _evaluate(self, x: np.ndarray) -> np.ndarray:

        return np.where(np.abs(x) <= 1.0, 1.0, 0.0)

    def one_minus(self, x: ArrayLike) -> ArrayLike:

        x_arr = np.asarray(x, dtype=float)
        values = np.where(np.abs(x_arr) <= 1.0, 0.0, 1.0)

        return float(values) if np.ndim(x) == 0 else values


class ParzenKernel(Kernel):
    """Parzen kernel: 1 - 6x^2 + 6|x|^3 on |x| <= 1/2, 2(1 - |x|)^3 on 1/2 < |x| <= 1"""

    name = "parzen"
    support_radius = 1.0
    char_exponent = 2.0

    def _evaluate(self, x: np.ndarray) -> np.ndarray:

        a = np.abs(x)
        inner = 1.0 - 6.0 * a**2 + 6.0 * a**3
        outer = 2.0 * (1.0 - a) ** 3

        return np.where(a <= 0.5, inner, np.where(a <= 1.0, outer, 0.0))

    def one_minus(self, x: ArrayLike) -> ArrayLike:

        a = np.abs(np.asarray(x, dtype=float))
        values = np.where(a <= 0.5, 6.0 * a**2 * (1.0 - a), 1.0 - self._evaluate(a))

        return float(values) if np.ndim(x) == 0 else values


KERNELS = {
    HanningKernel.name: HanningKernel,
    RectangularKernel.name: RectangularKernel,
    ParzenKernel.name: ParzenKernel,
}


def get_kernel(name: str) -> Kernel:
    """Find and return a kernel by name

    If there is no kernel with the given name, SpectraConfigError is raised.

    :type name: str
    :param name: One of hanning, rect, parzen
    :rtype: Kernel
    :returns: Kernel instance
    """

    try:
        return KERNELS[name.strip().lower()]()
    except KeyError as exp:
        choices = " | ".join(KERNELS)
        raise SpectraConfigError(f"Unknown kernel '{name}', expected {choices}") from exp


_hanning = HanningKernel()


def hanning(x: ArrayLike) -> ArrayLike:
    """Hanning kernel (1 + cos(pi x)) / 2 for |x| <= 1, else 0

    :type x: float or array
    :param x: Argument
    :rtype: float or array
    :returns: Kernel value
    """

    return _hanning(x)


def l2_norm_sq(kernel: Kernel, tol: float = KERNEL_NORM_TOL) -> float:
    """Integral of K(x)^2 over the real line

    Raises SpectraKernelError when the quadrature does not converge.

    :type kernel: Kernel
    :param kernel: Square integrable kernel
    :type tol: float
    :param tol: Absolute tolerance
    :rtype: float
    :returns: Squared L2 norm
    """

    def squared(x: float) -> float:
        return kernel(x) ** 2

    try:
        if kernel.has_finite_support:
            radius = kernel.support_radius
            # kernels are even; break points at the usual knots keep quad accurate
            half = integrate_interval(squared, 0.0, radius, tol / 2, points=(0.5 * radius,))
            return 2.0 * half

        return integrate_real_line(squared, tol)

    except SpectraQuadratureError as exp:
        raise SpectraKernelError(f"L2 norm of the {kernel.name} kernel diverges") from exp


def characteristic_constant(kernel: Kernel, q: float) -> float:
    """Limit of (1 - K(x)) / |x|^q as x -> 0

    The ratio is evaluated along x = 2^-m, m = 8..20. A Richardson step
    r(x/2) * 2 - r(x) removes the leading linear term; the last two extrapolations must
    agree. A sequence that shrinks to zero yields 0 (characteristic exponent above q);
    a growing one raises SpectraKernelError (exponent below q).

    :type kernel: Kernel
    :param kernel: Kernel
    :type q: float
    :param q: Candidate exponent, q > 0
    :rtype: float
    :returns: Characteristic constant k_q
    """

    if q <= 0:
        raise SpectraConfigError(f"Characteristic exponent must be positive, got {q}")

    points = np.array([2.0**-m for m in KERNEL_LIMIT_EXPONENTS])
    ratios = np.asarray(kernel.one_minus(points), dtype=float) / points**q

    extrapolated = 2.0 * ratios[1:] - ratios[:-1]
    last, previous = extrapolated[-1], extrapolated[-2]

    scale = max(1.0, abs(last))
    if not np.all(np.isfinite(extrapolated)) or abs(last - previous) > KERNEL_LIMIT_TOL * scale:
        raise SpectraKernelError(
            f"(1 - K(x))/|x|^{q} does not converge for the {kernel.name} kernel; "
            f"its characteristic exponent is below {q}"
        )

    if abs(last) < KERNEL_LIMIT_TOL:
        return 0.0

    return float(last)
