"""entrograph

Optimal control of a continuous-time Markov chain on a finite directed graph
when the running cost is of entropy type.  The Hamilton-Jacobi system of
these problems becomes linear after an exponential change of variables, so
value functions, optimal intensities and ergodic constants are computed with
matrix exponentials and Perron vectors, and are cross-checked by a
Runge-Kutta oracle and Monte Carlo simulation.
"""
import logging
from sys import version_info
assert version_info >= (3, 8)
from .main import main, build_parser


_LOGGER = logging.getLogger(__name__)
logging.captureWarnings(True)
