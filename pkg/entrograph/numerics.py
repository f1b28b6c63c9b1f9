"""Dense numerical kernels: matrix exponential, overflow-safe propagation of
positive vectors, and power iteration for Perron eigenpairs.

All functions are pure; matrices are numpy arrays indexed (i, j).
"""
import logging
import math
import numpy as np
from scipy import linalg
from scipy.special import logsumexp
from . import utilities as util
from .config import POWER_TOL, POWER_MAX_ITER
from .errors import (NonFiniteError, PositivityLostError, NoConvergenceError,
                     PreconditionViolatedError)


_LOGGER = logging.getLogger(__name__)


# Degree-13 Pade coefficients and the 1-norm bounds below which the lower
# degree approximants (3, 5, 7, 9) reach double precision.
PADE_13 = (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
           1187353796428800.0, 129060195264000.0, 10559470521600.0,
           670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
           960960.0, 16380.0, 182.0, 1.0)
PADE_LOW = {
    3: (0.015, (120.0, 60.0, 12.0, 1.0)),
    5: (0.25, (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0)),
    7: (0.95, (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0,
               56.0, 1.0)),
    9: (2.1, (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
              30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0)),
}
THETA_13 = 5.4

# Relative size of a negative step-matrix entry worth warning about
CLAMP_WARN_LEVEL = 1.0e-13


class ScaledPositiveVector(object):
    """A positive vector stored through the logarithms of its components.

    The represented vector is exp(log_scale) * direction with log_scale the
    largest log component.  Components may differ by far more than the
    float range; their logarithms stay exact while the matching direction
    entries underflow to 0.
    """

    def __init__(self, log_values):
        """Initialize object.

        Args:
            log_values:  finite array of log(v_i)
        Raises:
            NonFiniteError:  if a log value is NaN or infinite
        """
        log_values = np.array(log_values, dtype=float)
        if log_values.ndim != 1 or not np.all(np.isfinite(log_values)):
            raise NonFiniteError("Non-finite log values")
        log_values.setflags(write=False)
        self._log_values = log_values

    @property
    def log_scale(self):
        """Largest log component s."""
        return float(self._log_values.max())

    @property
    def direction(self):
        """exp(log v - s): max entry 1, tiny entries may underflow to 0."""
        return np.exp(self._log_values - self._log_values.max())

    @classmethod
    def from_log(cls, log_values):
        """Build from the componentwise logarithm of the represented vector.

        Args:
            log_values:  array of log(v_i)
        Returns:
            ScaledPositiveVector
        """
        return cls(log_values)

    @classmethod
    def from_values(cls, values):
        """Build from an ordinary positive array.

        Raises:
            PositivityLostError:  if some entry is not strictly positive
        """
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("Non-finite vector entries")
        if np.any(values <= 0):
            raise PositivityLostError("Vector has non-positive entries")
        return cls(np.log(values))

    def log_values(self):
        """Return log of the represented vector, componentwise."""
        return np.array(self._log_values)

    def values(self):
        """Return the represented vector (may overflow to inf)."""
        with np.errstate(over="ignore"):
            return np.exp(self._log_values)

    def __len__(self):
        return len(self._log_values)

    def __str__(self):
        return "exp(%g) * %s" % (self.log_scale, self.direction)


class EigenPair(object):
    """A dominant eigenvalue with its positive max-normalized eigenvector."""

    def __init__(self, value, vector, residual, iterations=0):
        self.value = float(value)
        vector = np.array(vector, dtype=float)
        vector.setflags(write=False)
        self.vector = vector
        self.residual = float(residual)
        self.iterations = iterations

    def __str__(self):
        return "EigenPair(value=%.15g, residual=%.3g)" % (self.value,
                                                          self.residual)


def _as_matrix(matrix):
    """Return a finite float square matrix.

    Raises:
        ValueError:  if the array is not square
        NonFiniteError:  if an entry is NaN or infinite
    """
    matrix = np.array(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("Expected a square matrix, got shape %s" %
                         (matrix.shape,))
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError("Matrix has non-finite entries")
    return matrix


def _pade_solve(odd, even):
    """Return (V - U)^-1 (V + U)."""
    return linalg.solve(even - odd, even + odd)


def _pade_low(matrix, coeffs):
    """Diagonal Pade approximant of degree 3, 5, 7 or 9."""
    n_dim = matrix.shape[0]
    square = matrix @ matrix
    powers = [np.eye(n_dim), square]
    for _ in range(2, len(coeffs) // 2):
        powers.append(powers[-1] @ square)
    odd = sum(coeffs[2 * k + 1] * power for k, power in enumerate(powers))
    even = sum(coeffs[2 * k] * power for k, power in enumerate(powers))
    return _pade_solve(matrix @ odd, even)


def _pade_13(matrix):
    """Degree-13 diagonal Pade approximant."""
    coef = PADE_13
    ident = np.eye(matrix.shape[0])
    square = matrix @ matrix
    fourth = square @ square
    sixth = square @ fourth
    odd = sixth @ (coef[13] * sixth + coef[11] * fourth + coef[9] * square)
    odd = odd + coef[7] * sixth + coef[5] * fourth + coef[3] * square
    odd = matrix @ (odd + coef[1] * ident)
    even = sixth @ (coef[12] * sixth + coef[10] * fourth + coef[8] * square)
    even = even + coef[6] * sixth + coef[4] * fourth + coef[2] * square
    even = even + coef[0] * ident
    return _pade_solve(odd, even)


def expm(matrix):
    """Compute the matrix exponential by scaling and squaring.

    The degree of the diagonal Pade approximant is picked from the 1-norm;
    above the degree-13 bound the matrix is scaled by 2^-s and the result
    squared s times.

    Args:
        matrix:  square array
    Returns:
        exp(matrix) as an array
    Raises:
        NonFiniteError:  on non-finite input or internal overflow
    """
    matrix = _as_matrix(matrix)
    n_dim = matrix.shape[0]
    norm = np.linalg.norm(matrix, 1)
    if norm == 0.0:
        return np.eye(n_dim)
    for degree in sorted(PADE_LOW):
        theta, coeffs = PADE_LOW[degree]
        if norm <= theta:
            result = _pade_low(matrix, coeffs)
            break
    else:
        squarings = max(0, int(math.ceil(math.log2(norm / THETA_13))))
        result = _pade_13(matrix / 2.0 ** squarings)
        for _ in range(squarings):
            result = result @ result
    if not np.all(np.isfinite(result)):
        raise NonFiniteError("Matrix exponential overflowed (1-norm %g)" %
                             norm)
    return result


def propagate(matrix, start, duration, n_steps, shift=None):
    """Propagate exp(M tau) v0 over a uniform grid of tau in [0, duration].

    One step matrix E = exp((M + shift I) dt) is applied repeatedly and
    shift dt is taken off the logarithms after every step.  When M has
    nonnegative off-diagonal entries the default shift makes the diagonal
    nonnegative, E is then entrywise nonnegative (rounding noise below zero
    is clamped) and the product is formed in log space, one logarithm per
    component.  Other matrices are applied to the max-normalized vector.

    Args:
        matrix:  square array M
        start:  ScaledPositiveVector v0
        duration:  nonnegative length of the propagation interval
        n_steps:  number of grid steps (positive)
        shift:  diagonal shift sigma (optional)
    Returns:
        list of n_steps + 1 ScaledPositiveVector; entry k represents
        exp(M k dt) v0
    Raises:
        NonFiniteError:  on overflow
        PositivityLostError:  if a component stops being strictly positive
    """
    matrix = _as_matrix(matrix)
    if duration < 0:
        raise ValueError("Duration must be nonnegative, got %r" % (duration,))
    if n_steps < 1:
        raise ValueError("Number of steps must be positive, got %r" %
                         (n_steps,))
    if len(start) != matrix.shape[0]:
        raise ValueError("Vector length %d does not match matrix size %d" %
                         (len(start), matrix.shape[0]))
    n_dim = matrix.shape[0]
    diagonal = np.diag(matrix)
    off_diagonal = matrix - np.diag(diagonal)
    metzler = bool(np.all(off_diagonal >= 0))
    if shift is None:
        shift = max(0.0, -float(diagonal.min())) if metzler else 0.0
    step = duration / n_steps
    step_matrix = expm((matrix + shift * np.eye(n_dim)) * step)
    if metzler and shift + diagonal.min() >= 0:
        negative = step_matrix < 0
        if negative.any():
            worst = -step_matrix[negative].min() / np.abs(step_matrix).max()
            if worst > CLAMP_WARN_LEVEL:
                _LOGGER.warning("Clamped negative step-matrix entries "
                                "(relative size %g).", worst)
            step_matrix = np.where(negative, 0.0, step_matrix)

    log_shift = shift * step
    if np.all(step_matrix >= 0):
        return _propagate_log(step_matrix, start, log_shift, n_steps)
    return _propagate_scaled(step_matrix, start, log_shift, n_steps)


def _propagate_log(step_matrix, start, log_shift, n_steps):
    """Apply a nonnegative step matrix in log space.

    log (E v)_i = logsumexp_j (log E_ij + log v_j), so components that differ
    by more than the float range keep exact logarithms.
    """
    with np.errstate(divide="ignore"):
        log_step = np.log(step_matrix)
    log_values = start.log_values()
    result = [start]
    for k in range(1, n_steps + 1):
        with np.errstate(divide="ignore"):
            log_values = logsumexp(log_step + log_values[None, :],
                                   axis=1) - log_shift
        if np.any(np.isnan(log_values)) or np.any(log_values == np.inf):
            raise NonFiniteError("Propagation overflowed at step %d" % k)
        if np.any(log_values == -np.inf):
            raise PositivityLostError(
                "Propagated vector lost positivity at step %d (components "
                "%s are zero)" % (k, np.flatnonzero(log_values == -np.inf)))
        result.append(ScaledPositiveVector(log_values))
    return result


def _propagate_scaled(step_matrix, start, log_shift, n_steps):
    """Apply a step matrix with negative entries to a max-normalized vector."""
    direction = start.direction
    log_scale = start.log_scale
    if np.any(direction <= 0):
        raise PositivityLostError("Start vector spans more than the float "
                                  "range")
    result = [start]
    for k in range(1, n_steps + 1):
        image = step_matrix @ direction
        if not np.all(np.isfinite(image)):
            raise NonFiniteError("Propagation overflowed at step %d" % k)
        peak = image.max()
        if peak <= 0 or np.any(image <= 0):
            raise PositivityLostError(
                "Propagated vector lost positivity at step %d (smallest "
                "entry %g relative to the largest)" % (k, image.min() / peak
                                                        if peak > 0 else 0.0))
        direction = image / peak
        log_scale += math.log(peak) - log_shift
        result.append(ScaledPositiveVector(log_scale + np.log(direction)))
    return result


def power_iteration(matrix, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Dominant eigenpair of a primitive nonnegative matrix.

    The iterate stays max-normalized; the estimate of the spectral radius is
    max(M v), and iteration stops once ||M v - rho v||_inf <= tol *
    max(1, rho).

    Args:
        matrix:  nonnegative, irreducible matrix with positive diagonal
        tol:  residual tolerance, relative to max(1, rho); rounding in M v
            grows with rho, so an absolute bound is out of reach for large rho
        max_iter:  iteration cap
    Returns:
        EigenPair with a strictly positive vector
    Raises:
        PreconditionViolatedError:  negative entries, reducible pattern,
            non-positive diagonal, or a collapsing iterate
        NoConvergenceError:  if max_iter is reached
    """
    matrix = _as_matrix(matrix)
    if np.any(matrix < 0):
        raise PreconditionViolatedError("Matrix has negative entries")
    if np.any(np.diag(matrix) <= 0):
        raise PreconditionViolatedError("Matrix diagonal is not positive")
    if not util.is_irreducible(matrix):
        raise PreconditionViolatedError("Matrix is reducible")

    vector = np.ones(matrix.shape[0])
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        image = matrix @ vector
        value = image.max()
        if not np.isfinite(value) or value <= 0:
            raise PreconditionViolatedError(
                "Power iterate collapsed at iteration %d" % iteration)
        residual = np.abs(image - value * vector).max()
        if residual <= tol * max(1.0, value):
            _LOGGER.debug("Power iteration converged in %d iterations "
                          "(residual %g).", iteration, residual)
            if np.any(vector <= 0):
                raise PreconditionViolatedError(
                    "Perron vector has non-positive entries")
            return EigenPair(value, vector, residual, iteration)
        vector = image / value
    raise NoConvergenceError(max_iter, residual)
