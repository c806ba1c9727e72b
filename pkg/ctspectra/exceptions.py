class SpectraException(Exception):
    """Base exception for ctspectra"""


class SpectraConfigError(SpectraException, ValueError):
    """Invalid parameter or configuration exception"""


class SpectraModelError(SpectraConfigError):
    """Invalid process model exception"""


class SpectraTheoryError(SpectraConfigError):
    """Assumptions of a theoretical formula are not met"""


class SpectraNumericError(SpectraException, ArithmeticError):
    """Numeric failure exception"""


class SpectraQuadratureError(SpectraNumericError):
    """Quadrature convergence exception"""


class SpectraKernelError(SpectraNumericError):
    """Kernel norm or limit exception"""


class SpectraSimulationError(SpectraNumericError):
    """Sample path simulation exception"""


class SpectraStorageError(SpectraException):
    """Result file operation exception"""


class SpectraExperimentError(SpectraException):
    """Monte Carlo experiment exception"""
