"""Problem instances: validation, graph structure, and (de)serialization.

A problem instance bundles a finite directed graph without self-loops, one
real offset b_ij per edge, node reward rates r, terminal rewards g and the
horizon T.  Nodes are 0-based everywhere.
"""
import json
import logging
import math
from collections import OrderedDict
import numpy as np
from . import utilities as util
from .config import PROBLEM_KEYS, EDGE_KEYS, MIN_NODES
from .errors import (ParseError, TooFewNodesError, SelfLoopError,
                     DuplicateEdgeError, IndexOutOfRangeError,
                     NonFiniteValueError, NonPositiveHorizonError,
                     DimensionMismatchError)


_LOGGER = logging.getLogger(__name__)


def _frozen(array):
    """Return a read-only float copy of an array."""
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


class GraphProblem(object):
    """A validated problem instance.

    Instances are immutable: array attributes are read-only and no method
    mutates state, so one instance can be shared across threads.  Build them
    through validate_problem() or load_problem().
    """

    def __init__(self, n_nodes, neighborhoods, edge_offsets, rewards,
                 terminal_rewards, horizon):
        """Initialize without checks (see validate_problem).

        Args:
            n_nodes:  number of nodes N
            neighborhoods:  per-node sequence of out-neighbors, in edge order
            edge_offsets:  dict mapping (i, j) to b_ij
            rewards:  length-N reward rates r
            terminal_rewards:  length-N terminal rewards g
            horizon:  time horizon T
        """
        self._n_nodes = int(n_nodes)
        self._neighborhoods = tuple(tuple(int(j) for j in nbrs)
                                    for nbrs in neighborhoods)
        self._edge_offsets = dict(edge_offsets)
        self._rewards = _frozen(rewards)
        self._terminal_rewards = _frozen(terminal_rewards)
        self._horizon = float(horizon)
        offsets = np.zeros((self._n_nodes, self._n_nodes))
        mask = np.zeros((self._n_nodes, self._n_nodes), dtype=bool)
        for (i, j), b_ij in self._edge_offsets.items():
            offsets[i, j] = b_ij
            mask[i, j] = True
        self._offset_matrix = _frozen(offsets)
        mask.setflags(write=False)
        self._edge_mask = mask

    @property
    def n_nodes(self):
        """Number of nodes N."""
        return self._n_nodes

    @property
    def neighborhoods(self):
        """Tuple of per-node out-neighbor tuples."""
        return self._neighborhoods

    @property
    def edge_offsets(self):
        """Copy of the {(i, j): b_ij} mapping."""
        return dict(self._edge_offsets)

    @property
    def rewards(self):
        """Reward rates r (read-only array)."""
        return self._rewards

    @property
    def terminal_rewards(self):
        """Terminal rewards g (read-only array)."""
        return self._terminal_rewards

    @property
    def horizon(self):
        """Horizon T."""
        return self._horizon

    @property
    def offset_matrix(self):
        """N x N array holding b_ij on edges and 0 elsewhere."""
        return self._offset_matrix

    @property
    def edge_mask(self):
        """N x N boolean array, True exactly on edges."""
        return self._edge_mask

    @property
    def edges(self):
        """List of (i, j, b_ij) in canonical order (by source, then
        neighborhood order)."""
        return [(i, j, self._edge_offsets[(i, j)])
                for i, nbrs in enumerate(self._neighborhoods) for j in nbrs]

    @property
    def n_edges(self):
        """Number of directed edges."""
        return len(self._edge_offsets)

    @property
    def adjacency(self):
        """Adjacency mapping {i: [j, ...]} of the graph."""
        return {i: list(nbrs) for i, nbrs in enumerate(self._neighborhoods)}

    def offset(self, i, j):
        """Return b_ij for the edge i -> j.

        Raises:
            KeyError:  if there is no such edge
        """
        return self._edge_offsets[(i, j)]

    def replace(self, rewards=None, terminal_rewards=None, horizon=None):
        """Return a copy with some per-node data or the horizon replaced.

        Args:
            rewards:  new r (optional)
            terminal_rewards:  new g (optional)
            horizon:  new T (optional)
        Returns:
            validated GraphProblem
        """
        raw = self.to_dict()
        if rewards is not None:
            raw["r"] = [float(x) for x in rewards]
        if terminal_rewards is not None:
            raw["g"] = [float(x) for x in terminal_rewards]
        if horizon is not None:
            raw["T"] = float(horizon)
        return validate_problem(raw)

    def to_dict(self):
        """Return the problem as a document dictionary (canonical order)."""
        doc = OrderedDict()
        doc["n_nodes"] = self._n_nodes
        doc["edges"] = [OrderedDict([("from", i), ("to", j), ("b", b_ij)])
                        for i, j, b_ij in self.edges]
        doc["r"] = [float(x) for x in self._rewards]
        doc["g"] = [float(x) for x in self._terminal_rewards]
        doc["T"] = self._horizon
        return doc

    def __eq__(self, other):
        if not isinstance(other, GraphProblem):
            return NotImplemented
        return (self._n_nodes == other.n_nodes and
                self._neighborhoods == other.neighborhoods and
                self._edge_offsets == other.edge_offsets and
                np.array_equal(self._rewards, other.rewards) and
                np.array_equal(self._terminal_rewards,
                               other.terminal_rewards) and
                self._horizon == other.horizon)

    def __hash__(self):
        return hash((self._n_nodes, self._neighborhoods, self._horizon))

    def __str__(self):
        return "GraphProblem(N=%d, edges=%d, T=%g)" % (
            self._n_nodes, self.n_edges, self._horizon)


class ConnectivityReport(object):
    """Strong-connectivity facts of a graph."""

    def __init__(self, components):
        """Initialize from the list of strongly connected components."""
        self.components = [list(scc) for scc in components]

    @property
    def strongly_connected(self):
        """True iff the graph has exactly one strongly connected component."""
        return len(self.components) == 1

    def __str__(self):
        return "ConnectivityReport(strongly_connected=%s, components=%s)" % (
            self.strongly_connected, self.components)


def _check_finite(value, field):
    """Convert to float and reject NaN/Inf."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParseError(field, "expected a number, got %r" % (value,))
    if not math.isfinite(value):
        raise NonFiniteValueError(field)
    return value


def _check_index(value, field, n_nodes):
    """Check a node index."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParseError(field, "expected an integer node index, got %r" %
                         (value,))
    if value < 0 or value >= n_nodes:
        raise IndexOutOfRangeError(field, value, n_nodes)
    return int(value)


def _check_vector(values, field, n_nodes):
    """Check a per-node vector."""
    if isinstance(values, (str, bytes)) or not hasattr(values, "__len__"):
        raise ParseError(field, "expected a list of %d numbers" % n_nodes)
    if len(values) != n_nodes:
        raise DimensionMismatchError(field, n_nodes, len(values))
    return [_check_finite(x, "%s[%d]" % (field, k))
            for k, x in enumerate(values)]


def validate_problem(raw):
    """Validate a candidate problem and build the immutable instance.

    Args:
        raw:  mapping with keys n_nodes, edges (list of {from, to, b}), r, g, T
    Returns:
        GraphProblem
    Raises:
        ParseError:  missing/unknown keys or wrongly typed values
        ProblemError:  (subclasses) structural violations
    """
    if not isinstance(raw, dict):
        raise ParseError("document", "expected an object, got %s" %
                         type(raw).__name__)
    missing = [key for key in PROBLEM_KEYS if key not in raw]
    if missing:
        raise ParseError("document", "missing field(s): %s" %
                         ", ".join(missing))
    unknown = sorted(key for key in raw if key not in PROBLEM_KEYS)
    if unknown:
        raise ParseError("document", "unknown field(s): %s" %
                         ", ".join(unknown))

    n_nodes = raw["n_nodes"]
    if isinstance(n_nodes, bool) or not isinstance(n_nodes, (int, np.integer)):
        raise ParseError("n_nodes", "expected an integer, got %r" % (n_nodes,))
    if n_nodes < MIN_NODES:
        raise TooFewNodesError(n_nodes)
    n_nodes = int(n_nodes)

    horizon = _check_finite(raw["T"], "T")
    if horizon <= 0:
        raise NonPositiveHorizonError(horizon)
    rewards = _check_vector(raw["r"], "r", n_nodes)
    terminal_rewards = _check_vector(raw["g"], "g", n_nodes)

    edges = raw["edges"]
    if not isinstance(edges, (list, tuple)):
        raise ParseError("edges", "expected a list of edges")
    neighborhoods = [[] for _ in range(n_nodes)]
    offsets = {}
    for k, edge in enumerate(edges):
        where = "edges[%d]" % k
        if not isinstance(edge, dict):
            raise ParseError(where, "expected an object with keys %s" %
                             ", ".join(EDGE_KEYS))
        if set(edge) != set(EDGE_KEYS):
            raise ParseError(where, "expected exactly the keys %s, got %s" %
                             (", ".join(EDGE_KEYS), ", ".join(sorted(edge))))
        source = _check_index(edge["from"], where + ".from", n_nodes)
        target = _check_index(edge["to"], where + ".to", n_nodes)
        if source == target:
            raise SelfLoopError(source)
        if (source, target) in offsets:
            raise DuplicateEdgeError(source, target)
        offsets[(source, target)] = _check_finite(edge["b"], where + ".b")
        neighborhoods[source].append(target)

    problem = GraphProblem(n_nodes, neighborhoods, offsets, rewards,
                           terminal_rewards, horizon)
    _LOGGER.debug("Validated %s.", problem)
    return problem


def strong_connectivity(problem):
    """Decompose the graph into strongly connected components.

    Args:
        problem:  GraphProblem
    Returns:
        ConnectivityReport
    """
    components = util.strongly_connected_components(problem.adjacency,
                                                    problem.n_nodes)
    return ConnectivityReport(components)


def load_problem(text):
    """Parse and validate a JSON problem document.

    Args:
        text:  document text
    Returns:
        GraphProblem
    Raises:
        ParseError:  malformed JSON or schema violations
        ProblemError:  structural violations
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError("line %d column %d" % (err.lineno, err.colno),
                         err.msg)
    return validate_problem(raw)


def save_problem(problem):
    """Serialize a problem to its canonical JSON document.

    Floats are written with the shortest repr that round-trips, so
    load_problem(save_problem(p)) == p.

    Args:
        problem:  GraphProblem
    Returns:
        document text (ends with a newline)
    """
    return json.dumps(problem.to_dict(), indent=2) + "\n"


def read_problem(path):
    """Load a problem document from a file.

    Args:
        path:  file path
    Returns:
        GraphProblem
    Raises:
        ParseError:  unreadable file or malformed document
        ProblemError:  structural violations
    """
    try:
        with open(path, "rt", encoding="utf-8") as problem_file:
            text = problem_file.read()
    except (OSError, UnicodeDecodeError) as err:
        raise ParseError(str(path), str(err))
    _LOGGER.info("Loaded problem document %s.", path)
    return load_problem(text)
