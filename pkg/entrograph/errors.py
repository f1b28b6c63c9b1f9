"""Exceptions raised by entrograph.

Every exception carries the offending datum as attributes so callers can
report it; the command-line driver turns any EntrographError into exit
code 1.
"""


class EntrographError(Exception):
    """Base class for all domain errors."""
    pass


class ProblemError(EntrographError, ValueError):
    """A problem instance violates a structural assumption."""
    pass


class TooFewNodesError(ProblemError):
    """The graph has fewer than two nodes."""
    def __init__(self, n_nodes):
        super().__init__("Graph needs at least 2 nodes, got %r" % (n_nodes,))
        self.n_nodes = n_nodes


class SelfLoopError(ProblemError):
    """An edge connects a node to itself."""
    def __init__(self, node):
        super().__init__("Self-loop at node %d" % node)
        self.node = node


class DuplicateEdgeError(ProblemError):
    """The same directed edge appears twice."""
    def __init__(self, source, target):
        super().__init__("Duplicate edge %d -> %d" % (source, target))
        self.source = source
        self.target = target


class IndexOutOfRangeError(ProblemError):
    """A node index lies outside 0..N-1."""
    def __init__(self, field, index, n_nodes):
        super().__init__("Node index %r in %s is outside 0..%d" %
                         (index, field, n_nodes - 1))
        self.field = field
        self.index = index


class NonFiniteValueError(ProblemError):
    """A numeric field holds NaN or infinity."""
    def __init__(self, field):
        super().__init__("Non-finite value in field %s" % field)
        self.field = field


class NonPositiveHorizonError(ProblemError):
    """The horizon T is not strictly positive."""
    def __init__(self, horizon):
        super().__init__("Horizon must be positive, got %r" % (horizon,))
        self.horizon = horizon


class DimensionMismatchError(ProblemError):
    """A per-node vector has the wrong length."""
    def __init__(self, field, expected, actual):
        super().__init__("Field %s has length %d, expected %d" %
                         (field, actual, expected))
        self.field = field
        self.expected = expected
        self.actual = actual


class ParseError(EntrographError, ValueError):
    """A document could not be parsed."""
    def __init__(self, location, text):
        super().__init__(location, text)
        self.location = location
        self.text = text

    def __str__(self):
        return "Parse error at %s: %s" % (self.location, self.text)


class PolicyError(EntrographError, ValueError):
    """A user-supplied policy is not usable on the given problem."""
    pass


class NonFiniteIntensityError(PolicyError):
    """A policy returned a negative or non-finite intensity."""
    def __init__(self, time):
        super().__init__("Policy has a negative or non-finite intensity "
                         "at t=%r" % (time,))
        self.time = time


class OutOfRangeError(EntrographError, ValueError):
    """A query time lies outside [0, T]."""
    def __init__(self, time, horizon):
        super().__init__("Time %r is outside [0, %r]" % (time, horizon))
        self.time = time
        self.horizon = horizon


class GridMismatchError(EntrographError, ValueError):
    """Two solutions are not defined on the same time grid."""
    pass


class NotStronglyConnectedError(EntrographError, ValueError):
    """The ergodic analysis needs a strongly connected graph."""
    def __init__(self, components):
        super().__init__("Graph is not strongly connected (%d components)" %
                         len(components))
        self.components = components


class NumericalError(EntrographError, ArithmeticError):
    """Base class for failures of the numerical kernels."""
    pass


class NonFiniteError(NumericalError):
    """A computation produced NaN or infinity."""
    pass


class ExponentOverflowError(NumericalError):
    """An exponent is too large for double precision."""
    def __init__(self, exponent):
        super().__init__("Exponent %r overflows double precision" %
                         (exponent,))
        self.exponent = exponent


class PositivityLostError(NumericalError):
    """A propagated vector lost strict positivity."""
    pass


class PreconditionViolatedError(NumericalError):
    """A matrix does not satisfy the kernel's structural requirements."""
    pass


class NoConvergenceError(NumericalError):
    """An iteration hit its iteration cap."""
    def __init__(self, max_iter, residual):
        super().__init__("No convergence after %d iterations (residual %g)" %
                         (max_iter, residual))
        self.max_iter = max_iter
        self.residual = residual


class InternalPositivityError(NumericalError):
    """A quantity that is positive by construction came out non-positive."""
    pass
