"""Intensity policies: time-dependent feedback controls on the edges.

Every policy returns, for a time t, the N x N matrix of intensities
lambda(t, i, j), zero off the edges of the graph.
"""
import logging
import numpy as np
from . import hjb
from .errors import PolicyError, NonFiniteIntensityError, OutOfRangeError


_LOGGER = logging.getLogger(__name__)


def check_rates(problem, rates, time=None):
    """Validate an intensity matrix against the graph.

    Args:
        problem:  GraphProblem
        rates:  N x N array
        time:  time stamp for error messages (optional)
    Returns:
        float array with zeros off the edges
    Raises:
        NonFiniteIntensityError:  negative or non-finite entries on edges
        PolicyError:  wrong shape or positive entries off the edges
    """
    rates = np.array(rates, dtype=float)
    shape = (problem.n_nodes, problem.n_nodes)
    if rates.shape != shape:
        raise PolicyError("Intensity matrix has shape %s, expected %s" %
                          (rates.shape, shape))
    on_edges = rates[problem.edge_mask]
    if not np.all(np.isfinite(on_edges)) or np.any(on_edges < 0):
        raise NonFiniteIntensityError(time)
    if np.any(rates[~problem.edge_mask] != 0):
        raise PolicyError("Intensities are nonzero on pairs that are not "
                          "edges")
    return rates


def rates_from_edges(problem, edge_rates):
    """Build an intensity matrix from a {(i, j): lambda} mapping.

    Args:
        problem:  GraphProblem
        edge_rates:  mapping over edges; missing edges get intensity 0
    Returns:
        N x N array
    Raises:
        PolicyError:  if a key is not an edge of the graph
    """
    rates = np.zeros((problem.n_nodes, problem.n_nodes))
    for (i, j), value in edge_rates.items():
        if not (0 <= i < problem.n_nodes and 0 <= j < problem.n_nodes and
                problem.edge_mask[i, j]):
            raise PolicyError("Policy names %d -> %d, which is not an edge" %
                              (i, j))
        rates[i, j] = value
    return rates


class IntensityPolicy(object):
    """Holder class for policies; subclasses implement rates_at()."""

    def __init__(self, problem):
        self.problem = problem

    def rates_at(self, time):
        """Return the N x N intensity matrix at time t."""
        raise NotImplementedError()

    def intensity(self, time, i, j):
        """Return lambda(t, i, j)."""
        return float(self.rates_at(time)[i, j])

    def rates_table(self, times):
        """Return the stacked intensity matrices at the given times."""
        return np.array([self.rates_at(time) for time in times])

    def edge_intensities(self, time):
        """Return [(i, j, lambda), ...] in the canonical edge order."""
        rates = self.rates_at(time)
        return [(i, j, float(rates[i, j])) for i, j, _ in self.problem.edges]

    def _check_time(self, time):
        if not (0.0 <= time <= self.problem.horizon):
            raise OutOfRangeError(time, self.problem.horizon)


class ConstantPolicy(IntensityPolicy):
    """Intensities that do not depend on time."""

    def __init__(self, problem, rates):
        """Initialize object.

        Args:
            problem:  GraphProblem
            rates:  N x N array or {(i, j): lambda} mapping
        """
        super().__init__(problem)
        if isinstance(rates, dict):
            rates = rates_from_edges(problem, rates)
        self.rates = check_rates(problem, rates)
        self.rates.setflags(write=False)
        if problem.n_edges and not np.any(self.rates[problem.edge_mask]):
            _LOGGER.warning("Policy intensity is zero on every edge.")

    def rates_at(self, time):
        self._check_time(time)
        return np.array(self.rates)

    def rates_table(self, times):
        times = np.asarray(times, dtype=float)
        if times.size:
            self._check_time(times.min())
            self._check_time(times.max())
        return np.repeat(self.rates[None, :, :], times.size, axis=0)


class TabulatedPolicy(IntensityPolicy):
    """Intensities tabulated at given times, piecewise linear in between."""

    def __init__(self, problem, times, rates):
        """Initialize object.

        Args:
            problem:  GraphProblem
            times:  increasing times covering [0, T]
            rates:  sequence of N x N arrays, one per time
        """
        super().__init__(problem)
        times = np.array(times, dtype=float)
        if times.ndim != 1 or len(times) < 1 or np.any(np.diff(times) <= 0):
            raise PolicyError("Table times must be strictly increasing")
        if times[0] > 0.0 or times[-1] < problem.horizon:
            raise PolicyError("Table times must cover [0, %g]" %
                              problem.horizon)
        if len(rates) != len(times):
            raise PolicyError("Got %d tables for %d times" %
                              (len(rates), len(times)))
        self.times = times
        self.tables = np.array([check_rates(problem, table, time)
                                for time, table in zip(times, rates)])

    def rates_at(self, time):
        self._check_time(time)
        if len(self.times) == 1:
            return np.array(self.tables[0])
        k = int(np.searchsorted(self.times, time, side="right")) - 1
        k = min(max(k, 0), len(self.times) - 2)
        weight = (time - self.times[k]) / (self.times[k + 1] - self.times[k])
        if weight <= 0.0:
            return np.array(self.tables[k])
        if weight >= 1.0:
            return np.array(self.tables[k + 1])
        return (1.0 - weight) * self.tables[k] + weight * self.tables[k + 1]


class OptimalPolicy(IntensityPolicy):
    """Closed-form optimal feedback policy backed by a ValueSolution."""

    def __init__(self, problem, solution=None, n_steps=None):
        """Initialize object.

        Args:
            problem:  GraphProblem
            solution:  ValueSolution of the problem (solved if omitted)
            n_steps:  grid size used when solving
        """
        super().__init__(problem)
        if solution is None:
            solution = hjb.solve_value_function(problem, n_steps)
        self.solution = solution

    def rates_at(self, time):
        return hjb.optimal_policy_at(self.solution, self.problem, time)

    def rates_table(self, times):
        times = np.asarray(times, dtype=float)
        for time in (times.min(), times.max()):
            self._check_time(time)
        grid = self.solution.grid
        values = np.column_stack([np.interp(times, grid, self.solution.u[:, i])
                                  for i in range(self.problem.n_nodes)])
        return np.array([hjb.feedback_intensities(self.problem, row)
                         for row in values])
