"""Closed-form solution of the Hamilton-Jacobi system.

With the entropy cost

    L(i, lam) = -r(i) + sum_j (lam_ij log lam_ij + b_ij lam_ij)

the Hamiltonian is H(i, p) = r(i) + sum_j exp(-1 - b_ij) exp(p_ij), and the
substitution w = exp(u) turns the Hamilton-Jacobi system

    du_i/dt = -r(i) - sum_j exp(-1 - b_ij) exp(u_j - u_i),  u(T) = g

into the linear system dw/dt = -B w, so w(t) = exp(B (T - t)) exp(g), where
B has exp(-1 - b_ij) on edges and r on the diagonal.  The optimal feedback
intensities are exp(-1 - b_ij) w_j(t) / w_i(t).
"""
import logging
import math
import numpy as np
from scipy.special import xlogy
from . import numerics
from .config import MIN_STEPS, STEPS_PER_RATE, RESIDUAL_FLOOR, MAX_EXPONENT
from .errors import (ExponentOverflowError, OutOfRangeError, NonFiniteError,
                     PolicyError)


_LOGGER = logging.getLogger(__name__)


def _checked_exp(exponents):
    """Exponentiate, reporting overflow instead of returning inf.

    Args:
        exponents:  array of exponents
    Returns:
        array of exp(exponents)
    Raises:
        ExponentOverflowError:  if an exponent exceeds MAX_EXPONENT
    """
    exponents = np.asarray(exponents, dtype=float)
    if exponents.size and exponents.max() > MAX_EXPONENT:
        raise ExponentOverflowError(float(exponents.max()))
    return np.exp(exponents)


def base_intensities(problem):
    """Return the N x N array with exp(-1 - b_ij) on edges and 0 elsewhere.

    Args:
        problem:  GraphProblem
    Returns:
        array of baseline intensities
    """
    exponents = np.where(problem.edge_mask, -1.0 - problem.offset_matrix,
                         -np.inf)
    return _checked_exp(exponents)


class TransitionMatrixB(object):
    """The matrix B: exp(-1 - b_ij) on edges, r(i) on the diagonal."""

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float)
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def n_nodes(self):
        """Dimension of B."""
        return self.matrix.shape[0]

    def shifted(self, sigma):
        """Return B + sigma I as a new array."""
        return self.matrix + sigma * np.eye(self.n_nodes)


def build_generator_matrix(problem):
    """Build the matrix B of the linearized system.

    Args:
        problem:  GraphProblem
    Returns:
        TransitionMatrixB
    """
    matrix = base_intensities(problem)
    matrix[np.diag_indices(problem.n_nodes)] = problem.rewards
    return TransitionMatrixB(matrix)


def _neighbor_vector(problem, node, values, name):
    """Align per-neighbor values with the neighborhood order of a node.

    Args:
        problem:  GraphProblem
        node:  node index
        values:  sequence in neighborhood order, or mapping {j: value}
        name:  argument name for error messages
    Returns:
        (neighbors, array of values)
    """
    neighbors = problem.neighborhoods[node]
    if isinstance(values, dict):
        if set(values) != set(neighbors):
            raise ValueError("%s must be keyed by the neighbors %s of node "
                             "%d" % (name, list(neighbors), node))
        values = [values[j] for j in neighbors]
    values = np.asarray(values, dtype=float).reshape(-1)
    if len(values) != len(neighbors):
        raise ValueError("%s has %d entries but node %d has %d neighbors" %
                         (name, len(values), node, len(neighbors)))
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("%s has non-finite entries" % name)
    return neighbors, values


def running_cost(problem, node, rates):
    """Evaluate the running cost L(i, lam), with 0 log 0 = 0.

    Args:
        problem:  GraphProblem
        node:  node i
        rates:  nonnegative intensities toward the neighbors of i
    Returns:
        L(i, rates)
    """
    neighbors, rates = _neighbor_vector(problem, node, rates, "rates")
    if np.any(rates < 0):
        raise PolicyError("Intensities must be nonnegative")
    offsets = np.array([problem.offset(node, j) for j in neighbors])
    return float(-problem.rewards[node] +
                 np.sum(xlogy(rates, rates) + offsets * rates))


def running_cost_rates(problem, rates):
    """Evaluate L(i, rates[i, :]) for every node at once.

    Args:
        problem:  GraphProblem
        rates:  N x N nonnegative intensity matrix (zero off the edges), or
            a stack of such matrices
    Returns:
        running costs, one per node (and per stacked matrix)
    """
    rates = np.where(problem.edge_mask, rates, 0.0)
    return (-problem.rewards +
            np.sum(xlogy(rates, rates) + problem.offset_matrix * rates,
                   axis=-1))


def control_objective(problem, node, pvec, rates):
    """Evaluate sum_j lam_ij p_ij - L(i, lam), the quantity maximized by H.

    Args:
        problem:  GraphProblem
        node:  node i
        pvec:  p_ij per neighbor
        rates:  nonnegative intensities per neighbor
    Returns:
        objective value
    """
    _, pvec = _neighbor_vector(problem, node, pvec, "pvec")
    _, rates_ = _neighbor_vector(problem, node, rates, "rates")
    return float(np.dot(rates_, pvec)) - running_cost(problem, node, rates)


def argmax_intensities(problem, node, pvec):
    """Maximizer of the Hamiltonian: lam_ij = exp(-1 - b_ij + p_ij).

    Args:
        problem:  GraphProblem
        node:  node i
        pvec:  p_ij per neighbor (sequence in neighborhood order or mapping)
    Returns:
        array of intensities in neighborhood order
    Raises:
        ExponentOverflowError:  if an intensity exceeds the float range
    """
    neighbors, pvec = _neighbor_vector(problem, node, pvec, "pvec")
    offsets = np.array([problem.offset(node, j) for j in neighbors])
    return _checked_exp(-1.0 - offsets + pvec)


def hamiltonian(problem, node, pvec):
    """Evaluate H(i, p) = r(i) + sum_j exp(-1 - b_ij) exp(p_ij).

    Args:
        problem:  GraphProblem
        node:  node i
        pvec:  p_ij per neighbor (sequence in neighborhood order or mapping)
    Returns:
        H(i, p)
    Raises:
        ExponentOverflowError:  if a term exceeds the float range
    """
    return float(problem.rewards[node] +
                 np.sum(argmax_intensities(problem, node, pvec)))


def default_steps(problem):
    """Default grid size, resolving the fastest mode of B.

    Returns:
        max(MIN_STEPS, ceil(STEPS_PER_RATE * T * (1 + max_i sum_j
        exp(-1 - b_ij))))
    """
    fastest = base_intensities(problem).sum(axis=1).max()
    return max(MIN_STEPS,
               int(math.ceil(STEPS_PER_RATE * problem.horizon *
                             (1.0 + fastest))))


class ValueSolution(object):
    """Value function on a uniform grid over [0, T].

    u = log w is stored per component, so w(t_k) is represented exactly even
    when its entries span more than the float range.
    """

    def __init__(self, grid, values):
        """Initialize object.

        Args:
            grid:  increasing times t_0 = 0 < ... < t_K = T
            values:  (K+1) x N array of u(t_k)
        """
        self.grid = np.array(grid, dtype=float)
        self.u = np.array(values, dtype=float)
        for array in (self.grid, self.u):
            array.setflags(write=False)

    @property
    def horizon(self):
        """Final time T."""
        return float(self.grid[-1])

    @property
    def n_steps(self):
        """Number of grid intervals K."""
        return len(self.grid) - 1

    @property
    def log_scales(self):
        """Largest component of u(t_k), per grid point."""
        return self.u.max(axis=1)

    @property
    def directions(self):
        """w(t_k) / max_i w_i(t_k); entries may underflow to 0."""
        return np.exp(self.u - self.u.max(axis=1)[:, None])

    def w(self, k):
        """Return w(t_k) as a ScaledPositiveVector."""
        return numerics.ScaledPositiveVector(self.u[k])

    def u_at(self, time):
        """Value function at an arbitrary time, linear in t between nodes.

        Args:
            time:  t in [0, T]
        Returns:
            length-N array
        Raises:
            OutOfRangeError:  if t is outside [0, T]
        """
        if not (0.0 <= time <= self.horizon):
            raise OutOfRangeError(time, self.horizon)
        k = int(np.searchsorted(self.grid, time, side="right")) - 1
        k = min(max(k, 0), self.n_steps - 1)
        weight = (time - self.grid[k]) / (self.grid[k + 1] - self.grid[k])
        if weight <= 0.0:
            return np.array(self.u[k])
        if weight >= 1.0:
            return np.array(self.u[k + 1])
        return (1.0 - weight) * self.u[k] + weight * self.u[k + 1]


def solve_value_function(problem, n_steps=None):
    """Compute the value function on a uniform grid.

    w(T - tau) = exp(B tau) exp(g) is propagated componentwise in log space
    from tau = 0, so u(T) = g exactly and every w(t_k) is positive.

    Args:
        problem:  GraphProblem
        n_steps:  number of grid intervals (default: default_steps())
    Returns:
        ValueSolution
    Raises:
        NonFiniteError, PositivityLostError:  from the propagation
    """
    if n_steps is None:
        n_steps = default_steps(problem)
    if n_steps < 1:
        raise ValueError("Number of steps must be positive, got %r" %
                         (n_steps,))
    _LOGGER.debug("Solving the value function of %s on %d steps.", problem,
                  n_steps)
    matrix = build_generator_matrix(problem).matrix
    start = numerics.ScaledPositiveVector.from_log(problem.terminal_rewards)
    states = numerics.propagate(matrix, start, problem.horizon, n_steps)
    states.reverse()
    grid = np.linspace(0.0, problem.horizon, n_steps + 1)
    values = np.array([state.log_values() for state in states])
    values[-1] = problem.terminal_rewards
    return ValueSolution(grid, values)


def value_at(problem, time):
    """Closed-form value u(t) without building a grid.

    exp(B (T - t)) is applied in as few steps as keep each step's 1-norm
    below one, so long horizons never overflow.

    Args:
        problem:  GraphProblem
        time:  t in [0, T]
    Returns:
        length-N array u(t)
    """
    if not (0.0 <= time <= problem.horizon):
        raise OutOfRangeError(time, problem.horizon)
    if time == problem.horizon:
        return np.array(problem.terminal_rewards)
    matrix = build_generator_matrix(problem).matrix
    duration = problem.horizon - time
    shift = max(0.0, -float(np.diag(matrix).min()))
    norm = np.linalg.norm(matrix + shift * np.eye(problem.n_nodes), 1)
    n_steps = max(1, int(math.ceil(norm * duration)))
    start = numerics.ScaledPositiveVector.from_log(problem.terminal_rewards)
    states = numerics.propagate(matrix, start, duration, n_steps)
    return states[-1].log_values()


def feedback_intensities(problem, values):
    """Intensities exp(-1 - b_ij) exp(u_j - u_i) for a value vector u.

    Args:
        problem:  GraphProblem
        values:  length-N array u
    Returns:
        N x N intensity array, zero off the edges
    """
    values = np.asarray(values, dtype=float)
    exponents = np.where(problem.edge_mask,
                         -1.0 - problem.offset_matrix +
                         values[None, :] - values[:, None],
                         -np.inf)
    return _checked_exp(exponents)


def optimal_policy_at(solution, problem, time):
    """Optimal feedback intensities at time t.

    Between grid nodes u is interpolated linearly in t before
    exponentiating.

    Args:
        solution:  ValueSolution of the problem
        problem:  GraphProblem
        time:  t in [0, T]
    Returns:
        N x N intensity array, zero off the edges
    Raises:
        OutOfRangeError:  if t is outside [0, T]
    """
    return feedback_intensities(problem, solution.u_at(time))


def hj_residual(solution, problem):
    """Largest residual of the Hamilton-Jacobi system on the interior grid.

    du/dt is taken by central differences, so the residual of an exact
    solution is O(dt^2).

    Args:
        solution:  ValueSolution
        problem:  GraphProblem
    Returns:
        max over interior grid points and nodes of
        |du_i/dt + r(i) + sum_j exp(-1 - b_ij) exp(u_j - u_i)|
    """
    values = solution.u
    if len(values) < 3:
        return 0.0
    step = solution.grid[1] - solution.grid[0]
    derivative = (values[2:] - values[:-2]) / (2.0 * step)
    interior = values[1:-1]
    base = base_intensities(problem)
    gaps = np.where(problem.edge_mask[None, :, :],
                    interior[:, None, :] - interior[:, :, None], -np.inf)
    with np.errstate(over="ignore"):
        pull = np.sum(base[None, :, :] * np.exp(gaps), axis=2)
    residual = np.abs(derivative + problem.rewards[None, :] + pull)
    return float(residual.max())


def residual_bound(solution):
    """Grid-dependent bound for hj_residual of a correct solution.

    Twice the central-difference truncation term dt^2 |u'''| / 6, with u'''
    estimated by third differences, plus a rounding term that grows like
    K eps |u| / dt.

    Args:
        solution:  ValueSolution
    Returns:
        bound (inf when the grid is too short to estimate u''')
    """
    values = solution.u
    if len(values) < 4:
        return np.inf
    step = solution.grid[1] - solution.grid[0]
    third = (values[3:] - 3.0 * values[2:-1] + 3.0 * values[1:-2] -
             values[:-3])
    truncation = np.abs(third).max() / (3.0 * step)
    eps = np.finfo(float).eps
    rounding = (len(values) + 10) * eps * max(1.0, np.abs(values).max()) / step
    return float(truncation + rounding + RESIDUAL_FLOOR)
