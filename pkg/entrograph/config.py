"""Configuration information for entrograph."""

# entrograph version number.
VERSION = "0.3"

# How to format the entrograph title in output
TITLE_FORMAT_STRING = ("entrograph v{version} - entropy-cost optimal control "
                       "on finite directed graphs")

# Keys of a problem document (all required, no others allowed)
PROBLEM_KEYS = ("n_nodes", "edges", "r", "g", "T")

# Keys of a single edge entry in a problem document
EDGE_KEYS = ("from", "to", "b")

# Smallest graph the problem family is defined on
MIN_NODES = 2

# Power iteration: residual tolerance (relative to max(1, rho)) and cap
POWER_TOL = 1.0e-12
POWER_MAX_ITER = 10 ** 6

# Default value-function grid:
# max(MIN_STEPS, ceil(STEPS_PER_RATE * T * (1 + max_i sum_j exp(-1 - b_ij))))
MIN_STEPS = 1000
STEPS_PER_RATE = 100

# Shift added on top of -min(r) when building B + sigma*I
SHIFT_MARGIN = 1.0

# Default simulation grid: steps per unit of horizon, and absolute cap
SIM_STEPS_PER_UNIT = 10 ** 4
SIM_MAX_STEPS = 10 ** 6

# Number of paths sampled together from a single random stream
SIM_BLOCK_SIZE = 4096

# Default number of Monte Carlo paths and seed
SIM_PATHS = 10 ** 5
SIM_SEED = 20201

# Closed form vs Runge-Kutta deviation accepted by the check command
CHECK_TOLERANCE = 1.0e-6

# Floor of the grid-dependent residual bound
RESIDUAL_FLOOR = 1.0e-9

# Largest argument accepted by exp() before reporting an overflow
MAX_EXPONENT = 709.0

# The start of warning strings to be filtered.
FILTER_WARNINGS = ["Clamped negative step-matrix entries",
                   "Policy intensity is zero on every edge"]

# The number of times one of the warning strings should be printed before
# supressing further output.
FILTER_WARNINGS_LIMIT = 5
