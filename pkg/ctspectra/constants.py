import math


# continuous time AR(4) model used in the simulation study
DEFAULT_ALPHAS = (0.65, 0.75, 0.85, 0.95)
DEFAULT_SIGMA = 1.0

DEFAULT_KERNEL = "hanning"
DEFAULT_Q = 2
DEFAULT_P = 8
DEFAULT_RATE_P = 1.0
DEFAULT_RATE_Q = 0.25
DEFAULT_RATE_R = 0.25
DEFAULT_POISSON_RHO = 1.0

DEFAULT_LAMBDA_MIN = 0.0
DEFAULT_LAMBDA_MAX = math.pi / 2
DEFAULT_LAMBDA_STEPS = 65
DEFAULT_SEED = 7


BURN_IN_TOL = 1e-9
BURN_IN_RESOLUTION = 1e-3

COEFF_TOL = 1e-9
QUAD_ABS_TOL = 1e-10
QUAD_LIMIT = 500

KERNEL_NORM_TOL = 1e-9
KERNEL_LIMIT_EXPONENTS = range(8, 21)
KERNEL_LIMIT_TOL = 1e-6

GAP_JITTER = 1e-12
GAP_KEY_DIGITS = 15
GAP_CACHE_SIZE = 4096

ALIASING_TERMS = 10_000


SCHEMES = ("regular", "poisson")
PANELS = ("mean", "bias", "var", "mse")

PATH_CSV_HEADER = ("t", "x")
ESTIMATE_CSV_HEADER = ("lambda", "estimate")
ASYMPTOTICS_CSV_HEADER = (
    "lambda",
    "bias_smoothing",
    "bias_truncation",
    "bias_aliasing",
    "bias_total",
    "var_theory",
    "mse_theory",
)
STATS_CSV_HEADER = (
    "scheme",
    "n",
    "lambda",
    "mean_est",
    "true_phi",
    "bias_emp",
    "bias_theory",
    "var_emp",
    "var_theory",
    "mse_emp",
    "mse_theory",
)
STATS_CSV_COMMENT = (
    "# var_emp uses the replication-count denominator; mse_emp = bias_emp^2 + var_emp"
)


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3
