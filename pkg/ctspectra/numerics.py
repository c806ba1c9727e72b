"""Adaptive quadrature helpers shared by the model, kernel and theory modules

Every integral is computed with ``scipy.integrate.quad``. Semi-infinite ranges are
mapped onto [0, 1) with the substitution t = a + u/(1 - u); oscillatory Fourier
integrals over [0, inf) use the QAWF cosine weight.
"""

import math
from typing import Callable

from scipy import integrate

from ctspectra.constants import QUAD_ABS_TOL, QUAD_LIMIT
from ctspectra.exceptions import SpectraQuadratureError


RealFunction = Callable[[float], float]


def integrate_interval(
    func: RealFunction,
    lower: float,
    upper: float,
    tol: float = QUAD_ABS_TOL,
    points: tuple[float, ...] = (),
) -> float:
    """Integrate over a finite interval

    Raises SpectraQuadratureError if the adaptive scheme reports failure.

    :type func: callable
    :param func: Integrand
    :type lower: float
    :param lower: Lower limit
    :type upper: float
    :param upper: Upper limit
    :type tol: float
    :param tol: Absolute tolerance
    :type points: tuple
    :param points: Break points inside the interval
    :rtype: float
    :returns: Value of the integral
    """

    inner_points = [point for point in points if lower < point < upper]

    result = integrate.quad(
        func,
        lower,
        upper,
        epsabs=tol,
        epsrel=0.0,
        limit=QUAD_LIMIT,
        points=inner_points or None,
        full_output=1,
    )

    return _checked(result, f"[{lower}, {upper}]")


def integrate_half_line(
    func: RealFunction, lower: float = 0.0, tol: float = QUAD_ABS_TOL
) -> float:
    """Integrate over [lower, inf) through the substitution t = lower + u/(1 - u)

    :type func: callable
    :param func: Integrand, must decay fast enough to be integrable
    :type lower: float
    :param lower: Lower limit
    :type tol: float
    :param tol: Absolute tolerance
    :rtype: float
    :returns: Value of the integral
    """

    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        scale = 1.0 / (1.0 - u)
        value = func(lower + u * scale) * scale * scale
        # the mapped integrand vanishes at u -> 1 for every integrable tail
        return value if math.isfinite(value) else 0.0

    result = integrate.quad(
        mapped, 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=QUAD_LIMIT, full_output=1
    )

    return _checked(result, f"[{lower}, inf)")


def integrate_real_line(func: RealFunction, tol: float = QUAD_ABS_TOL) -> float:
    """Integrate over the whole real line by splitting at the origin

    :type func: callable
    :param func: Integrand
    :type tol: float
    :param tol: Absolute tolerance
    :rtype: float
    :returns: Value of the integral
    """

    positive = integrate_half_line(func, 0.0, tol / 2)
    negative = integrate_half_line(lambda t: func(-t), 0.0, tol / 2)

    return positive + negative


def cosine_transform(func: RealFunction, frequency: float, tol: float = QUAD_ABS_TOL) -> float:
    """Compute the integral of func(t) cos(frequency t) over [0, inf)

    Uses the QAWF Fourier-weighted scheme for nonzero frequencies.

    :type func: callable
    :param func: Absolutely integrable function
    :type frequency: float
    :param frequency: Angular frequency
    :type tol: float
    :param tol: Absolute tolerance
    :rtype: float
    :returns: Value of the cosine transform
    """

    frequency = abs(frequency)
    if frequency == 0.0:
        return integrate_half_line(func, 0.0, tol)

    result = integrate.quad(
        func,
        0.0,
        math.inf,
        weight="cos",
        wvar=frequency,
        epsabs=tol,
        limlst=100,
        limit=QUAD_LIMIT,
        full_output=1,
    )

    return _checked(result, f"cosine transform at {frequency}")


def _checked(result: tuple, label: str) -> float:
    """Return the value of a full_output quad result or raise on failure

    scipy appends a message to the result tuple only when convergence failed.
    """

    if len(result) > 3:
        raise SpectraQuadratureError(f"Quadrature over {label} failed: {result[3]}")

    return float(result[0])
