"""Long-run analysis on strongly connected graphs.

For sigma > -min r, B(sigma) = B + sigma I is nonnegative, irreducible and
has a positive diagonal, hence is primitive.  Its Perron root rho gives the
ergodic constant gamma = rho - sigma; the right and left Perron vectors f
and phi give the offset alpha = log(<phi, exp(g)> / <phi, f>) and the limits

    u_i^T(t) - gamma (T - t)  ->  alpha + log f_i,
    lambda^T(t, i, j)         ->  exp(-1 - b_ij) f_j / f_i

as T grows.
"""
import logging
from collections import namedtuple
import numpy as np
from scipy.special import logsumexp
from . import hjb
from . import numerics
from .problem import strong_connectivity
from .config import POWER_TOL, POWER_MAX_ITER, SHIFT_MARGIN
from .errors import NotStronglyConnectedError, InternalPositivityError


_LOGGER = logging.getLogger(__name__)


# Distance to the ergodic limits at t = 0 for one horizon
LimitGap = namedtuple("LimitGap", ["horizon", "value_gap", "policy_gap",
                                   "average_reward"])


class ErgodicResult(object):
    """Ergodic constant, Perron vectors and asymptotic controls."""

    def __init__(self, gamma, f, phi, sigma, alpha=None,
                 asymptotic_intensities=None):
        """Initialize object.

        Args:
            gamma:  ergodic constant
            f:  right Perron vector of B (positive, max-norm 1)
            phi:  left Perron vector of B (positive, max-norm 1)
            sigma:  shift used to make B + sigma I primitive
            alpha:  offset of the value-function limit (optional)
            asymptotic_intensities:  N x N limit intensities (optional)
        """
        self.gamma = float(gamma)
        self.f = np.array(f, dtype=float)
        self.phi = np.array(phi, dtype=float)
        self.sigma = float(sigma)
        self.alpha = None if alpha is None else float(alpha)
        self.asymptotic_intensities = asymptotic_intensities

    def limit_values(self):
        """Return alpha + log f, the limit of u(t) - gamma (T - t)."""
        if self.alpha is None:
            raise ValueError("Offset alpha has not been computed")
        return self.alpha + np.log(self.f)

    def __str__(self):
        return "ErgodicResult(gamma=%.15g, alpha=%s, sigma=%g)" % (
            self.gamma, self.alpha, self.sigma)


def choose_shift(problem):
    """Return sigma = 1 + max(0, -min r), so that B + sigma I has a diagonal
    of at least 1."""
    return SHIFT_MARGIN + max(0.0, -float(np.min(problem.rewards)))


def _require_connected(problem):
    """Raise NotStronglyConnectedError unless the graph is strongly
    connected."""
    report = strong_connectivity(problem)
    if not report.strongly_connected:
        raise NotStronglyConnectedError(report.components)


def perron_data(problem, sigma=None, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Ergodic constant and Perron vectors by power iteration on B(sigma).

    Args:
        problem:  GraphProblem on a strongly connected graph
        sigma:  shift (default: choose_shift(problem))
        tol:  power-iteration tolerance
        max_iter:  power-iteration cap
    Returns:
        ErgodicResult without alpha
    Raises:
        NotStronglyConnectedError:  if the graph is not strongly connected
        NoConvergenceError:  from the power iteration
    """
    _require_connected(problem)
    if sigma is None:
        sigma = choose_shift(problem)
    shifted = hjb.build_generator_matrix(problem).shifted(sigma)
    right = numerics.power_iteration(shifted, tol, max_iter)
    left = numerics.power_iteration(shifted.T, tol, max_iter)
    _LOGGER.debug("Perron roots %.15g (right) and %.15g (left), shift %g.",
                  right.value, left.value, sigma)
    return ErgodicResult(right.value - sigma, right.vector, left.vector,
                         sigma)


def asymptotic_offset(problem, result):
    """Offset alpha = log beta with exp(g) = beta f + h, h orthogonal to phi.

    beta = <phi, exp(g)> / <phi, f> is evaluated in log space.

    Args:
        problem:  GraphProblem
        result:  ErgodicResult of the problem
    Returns:
        alpha
    Raises:
        InternalPositivityError:  if beta is not positive
    """
    log_numerator, sign = logsumexp(problem.terminal_rewards, b=result.phi,
                                    return_sign=True)
    denominator = float(np.dot(result.phi, result.f))
    if sign <= 0 or denominator <= 0:
        raise InternalPositivityError("Projection of exp(g) on the Perron "
                                      "vector is not positive")
    return float(log_numerator - np.log(denominator))


def asymptotic_policy(problem, result):
    """Limit intensities exp(-1 - b_ij) f_j / f_i.

    Args:
        problem:  GraphProblem
        result:  ErgodicResult of the problem
    Returns:
        N x N intensity array, zero off the edges
    """
    return hjb.feedback_intensities(problem, np.log(result.f))


def analyze(problem, sigma=None):
    """Run the full ergodic analysis.

    Args:
        problem:  GraphProblem on a strongly connected graph
        sigma:  shift (default: choose_shift(problem))
    Returns:
        ErgodicResult with alpha and asymptotic intensities
    """
    result = perron_data(problem, sigma)
    result.alpha = asymptotic_offset(problem, result)
    result.asymptotic_intensities = asymptotic_policy(problem, result)
    _LOGGER.info("Ergodic constant %.12g, offset %.12g.", result.gamma,
                 result.alpha)
    return result


def spectral_gap(problem, sigma=None):
    """Perron root of B(sigma) minus the second-largest eigenvalue modulus.

    Uses a dense eigensolve; for diagnostics only.

    Args:
        problem:  GraphProblem
        sigma:  shift (default: choose_shift(problem))
    Returns:
        gap (nonnegative)
    """
    if sigma is None:
        sigma = choose_shift(problem)
    shifted = hjb.build_generator_matrix(problem).shifted(sigma)
    moduli = np.sort(np.abs(np.linalg.eigvals(shifted)))[::-1]
    return float(moduli[0] - moduli[1])


def limit_gaps(problem, result, horizons):
    """Distance to the ergodic limits at t = 0 for growing horizons.

    Args:
        problem:  GraphProblem (its own horizon is ignored)
        result:  ErgodicResult with alpha (computed when missing)
        horizons:  iterable of horizons T
    Returns:
        list of LimitGap(horizon, value_gap, policy_gap, average_reward) with
        value_gap = max_i |u_i^T(0) - gamma T - alpha - log f_i|,
        policy_gap = max over edges of |lambda^T(0) - lambda_inf| and
        average_reward = min_i u_i^T(0) / T
    """
    if result.alpha is None:
        result.alpha = asymptotic_offset(problem, result)
    limit_policy = asymptotic_policy(problem, result)
    limit_values = result.limit_values()
    gaps = []
    for horizon in horizons:
        instance = problem.replace(horizon=horizon)
        values = hjb.value_at(instance, 0.0)
        value_gap = np.abs(values - result.gamma * horizon -
                           limit_values).max()
        policy = hjb.feedback_intensities(instance, values)
        policy_gap = (np.abs(policy - limit_policy)[problem.edge_mask].max()
                      if problem.n_edges else 0.0)
        gaps.append(LimitGap(float(horizon), float(value_gap),
                             float(policy_gap),
                             float(values.min() / horizon)))
        _LOGGER.debug("T=%g: value gap %.3g, policy gap %.3g.", horizon,
                      value_gap, policy_gap)
    return gaps
