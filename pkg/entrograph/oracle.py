"""Runge-Kutta oracle for the nonlinear Hamilton-Jacobi system.

The system is integrated directly in u, backward from u(T) = g, so the
oracle shares no code path with the matrix exponential it validates.
"""
import logging
import numpy as np
from . import hjb
from .errors import NonFiniteError, GridMismatchError


_LOGGER = logging.getLogger(__name__)


class OracleSolution(object):
    """Value function from the Runge-Kutta oracle on a uniform grid."""

    def __init__(self, grid, values):
        self.grid = np.array(grid, dtype=float)
        self.u = np.array(values, dtype=float)
        self.grid.setflags(write=False)
        self.u.setflags(write=False)

    @property
    def horizon(self):
        """Final time T."""
        return float(self.grid[-1])


def rk4_backward(rhs, terminal, horizon, n_steps):
    """Integrate du/dt = rhs(t, u) backward from u(T) with classical RK4.

    Args:
        rhs:  callable (t, u) -> du/dt
        terminal:  u(T)
        horizon:  T
        n_steps:  number of uniform steps
    Returns:
        (grid, values) with grid = linspace(0, T, n_steps + 1) and
        values[k] = u(grid[k]); values[-1] equals the terminal value exactly
    Raises:
        NonFiniteError:  if the integration blows up (step too large)
    """
    if n_steps < 1:
        raise ValueError("Number of steps must be positive, got %r" %
                         (n_steps,))
    grid = np.linspace(0.0, horizon, n_steps + 1)
    step = horizon / n_steps
    values = np.empty((n_steps + 1, len(terminal)))
    values[-1] = terminal
    state = np.array(terminal, dtype=float)
    for k in range(n_steps, 0, -1):
        t_end = grid[k]
        t_mid = 0.5 * (grid[k - 1] + grid[k])
        t_start = grid[k - 1]
        slope1 = rhs(t_end, state)
        slope2 = rhs(t_mid, state - 0.5 * step * slope1)
        slope3 = rhs(t_mid, state - 0.5 * step * slope2)
        slope4 = rhs(t_start, state - step * slope3)
        state = state - step / 6.0 * (slope1 + 2.0 * slope2 + 2.0 * slope3 +
                                      slope4)
        if not np.all(np.isfinite(state)):
            raise NonFiniteError("Runge-Kutta integration blew up at t=%g; "
                                 "use more steps" % t_start)
        values[k - 1] = state
    return grid, values


def hj_rhs(problem):
    """Right-hand side of the Hamilton-Jacobi system for a problem.

    Returns:
        callable (t, u) -> -r - sum_j exp(-1 - b_ij) exp(u_j - u_i)
    """
    base = hjb.base_intensities(problem)
    rewards = np.array(problem.rewards)
    mask = problem.edge_mask

    def rhs(_, values):
        with np.errstate(over="ignore", invalid="ignore"):
            gaps = np.where(mask, values[None, :] - values[:, None], -np.inf)
            return -rewards - np.sum(base * np.exp(gaps), axis=1)
    return rhs


def integrate_hj_backward(problem, n_steps):
    """Solve the Hamilton-Jacobi system by fixed-step RK4 in u.

    Args:
        problem:  GraphProblem
        n_steps:  number of steps on [0, T]
    Returns:
        OracleSolution with u(T) = g exactly
    Raises:
        NonFiniteError:  on blow-up (n_steps too small)
    """
    _LOGGER.debug("Integrating the Hamilton-Jacobi system of %s with %d "
                  "RK4 steps.", problem, n_steps)
    grid, values = rk4_backward(hj_rhs(problem), problem.terminal_rewards,
                                problem.horizon, n_steps)
    return OracleSolution(grid, values)


def compare_solutions(first, second):
    """Largest deviation between two value functions on the same grid.

    Args:
        first:  ValueSolution or OracleSolution
        second:  ValueSolution or OracleSolution
    Returns:
        max over grid points and nodes of |u_first - u_second|
    Raises:
        GridMismatchError:  if the grids differ
    """
    if first.u.shape != second.u.shape or \
            not np.array_equal(first.grid, second.grid):
        raise GridMismatchError("Solutions are on different grids (%d and %d "
                                "points)" % (len(first.grid),
                                             len(second.grid)))
    return float(np.abs(first.u - second.u).max())
