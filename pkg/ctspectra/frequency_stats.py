import math
from dataclasses import astuple, dataclass

from ctspectra.exceptions import SpectraNumericError


@dataclass(frozen=True)
class FrequencyStats:
    """Empirical and theoretical moments of an estimator at one frequency

    var_emp uses the replication-count denominator and mse_emp = bias_emp^2 + var_emp.

    :type scheme: str
    :param scheme: regular | poisson
    :type n: int
    :param n: Sample size
    :type lam: float
    :param lam: Angular frequency
    :type mean_est: float
    :param mean_est: Mean estimate over the replications
    :type true_phi: float
    :param true_phi: Spectral density of the model
    :type bias_emp: float
    :param bias_emp: mean_est - true_phi
    :type bias_theory: float
    :param bias_theory: Leading-order bias
    :type var_emp: float
    :param var_emp: Variance over the replications
    :type var_theory: float
    :param var_theory: Leading-order variance
    :type mse_emp: float
    :param mse_emp: Empirical mean squared error
    :type mse_theory: float
    :param mse_theory: bias_theory^2 + var_theory
    """

    scheme: str
    n: int
    lam: float
    mean_est: float
    true_phi: float
    bias_emp: float
    bias_theory: float
    var_emp: float
    var_theory: float
    mse_emp: float
    mse_theory: float

    def __post_init__(self) -> None:

        values = astuple(self)[2:]
        if not all(math.isfinite(value) for value in values):
            raise SpectraNumericError(
                f"Non-finite statistics for {self.scheme} n={self.n} at lambda={self.lam}"
            )

    @property
    def sort_key(self) -> tuple[str, int, float]:

        return self.scheme, self.n, self.lam

    def get_csv_row(self) -> list[str]:
        """Return the row written to the statistics CSV

        Floats keep 17 significant digits so that the file parses back exactly.

        :rtype: list
        :returns: Formatted fields in header order
        """

        floats = astuple(self)[2:]

        return [self.scheme, str(self.n)] + [f"{value:.17g}" for value in floats]
