"""Functions related to reading and writing data."""
import json
import logging
import os
from collections import Counter, OrderedDict
from pathlib import Path
import pandas
from . import hjb
from .policy import ConstantPolicy
from .config import FILTER_WARNINGS_LIMIT, FILTER_WARNINGS
from .errors import ParseError, PolicyError


_LOGGER = logging.getLogger(__name__)


# Columns of a constant-policy file
POLICY_FILE_COLUMNS = ["from", "to", "lambda"]


class DuplicateFilter(logging.Filter):
    """Filter duplicate messages."""
    def __init__(self):
        super().__init__()
        self.warn_count = Counter()

    def filter(self, record):
        """Filter current record."""
        if record.levelname == "WARNING":
            for fwarn in FILTER_WARNINGS:
                if record.getMessage().startswith(fwarn):
                    self.warn_count.update([fwarn])
                    if self.warn_count[fwarn] > FILTER_WARNINGS_LIMIT:
                        return False
                    elif self.warn_count[fwarn] == FILTER_WARNINGS_LIMIT:
                        _LOGGER.warning("Suppressing further '%s' messages",
                                        fwarn)
                        return False
                    else:
                        return True
        return True


class ArtifactSet(object):
    """Output files staged next to their destinations.

    Text is written to "<path>.tmp" and renamed over the destination only
    when the whole set is committed; used as a context manager, the set is
    committed on success and the staged files are removed on error.
    """

    def __init__(self):
        self._staged = []

    def add_text(self, path, text):
        """Stage text for a destination path."""
        path = Path(path)
        staging = path.with_name(path.name + ".tmp")
        try:
            staging.write_text(text, encoding="utf-8")
        except OSError:
            if staging.exists():
                staging.unlink()
            raise
        self._staged.append((staging, path))

    def commit(self):
        """Rename every staged file into place.

        Returns:
            list of destination paths (as strings)
        """
        written = []
        for staging, path in self._staged:
            os.replace(staging, path)
            written.append(str(path))
        self._staged = []
        return written

    def discard(self):
        """Remove every staged file."""
        for staging, _ in self._staged:
            if staging.exists():
                staging.unlink()
        self._staged = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is not None:
            self.discard()
        return False


def value_table(solution):
    """Tabulate u over the grid.

    Args:
        solution:  ValueSolution
    Returns:
        pandas DataFrame with columns t, u_0, ..., u_{N-1}
    """
    table = pandas.DataFrame(
        solution.u, columns=["u_%d" % i for i in range(solution.u.shape[1])])
    table.insert(0, "t", solution.grid)
    return table


def policy_table(problem, solution):
    """Tabulate the optimal intensities on every edge over the grid.

    Args:
        problem:  GraphProblem
        solution:  ValueSolution of the problem
    Returns:
        pandas DataFrame with columns t, from, to, lambda; one row per grid
        time and edge, edges in canonical order
    """
    rows = []
    sources = [i for i, _, _ in problem.edges]
    targets = [j for _, j, _ in problem.edges]
    if problem.n_edges:
        for time, values in zip(solution.grid, solution.u):
            rates = hjb.feedback_intensities(problem, values)
            for i, j in zip(sources, targets):
                rows.append((time, i, j, rates[i, j]))
    table = pandas.DataFrame(rows, columns=["t", "from", "to", "lambda"])
    return table.astype({"t": float, "from": int, "to": int,
                         "lambda": float})


def table_text(table):
    """CSV text of a table; floats in shortest round-trip form."""
    return table.to_csv(index=False, lineterminator="\n")


def ergodic_document(problem, result):
    """JSON-ready ergodic results with a fixed key order.

    Args:
        problem:  GraphProblem
        result:  ErgodicResult with alpha and asymptotic intensities
    Returns:
        OrderedDict
    """
    document = OrderedDict()
    document["gamma"] = result.gamma
    document["alpha"] = result.alpha
    document["f"] = [float(x) for x in result.f]
    document["phi"] = [float(x) for x in result.phi]
    document["sigma"] = result.sigma
    document["lambda_inf"] = [float(result.asymptotic_intensities[i, j])
                              for i, j, _ in problem.edges]
    document["edges"] = [[i, j] for i, j, _ in problem.edges]
    return document


def simulation_document(estimate):
    """JSON-ready simulation estimate with a fixed key order."""
    document = OrderedDict()
    for key, value in estimate.to_dict().items():
        document[key] = value
    return document


def json_text(document):
    """Serialize a document as indented JSON with a trailing newline."""
    return json.dumps(document, indent=2) + "\n"


def read_constant_policy(path, problem):
    """Read a constant policy from a CSV file with columns from, to, lambda.

    Edges missing from the file get intensity 0.

    Args:
        path:  path to the CSV file
        problem:  GraphProblem the policy applies to
    Returns:
        ConstantPolicy
    Raises:
        ParseError:  unreadable file or wrong columns
        PolicyError:  rows naming non-edges or repeating an edge
        NonFiniteIntensityError:  negative or non-finite intensities
    """
    path = Path(path)
    try:
        table = pandas.read_csv(path)
    except FileNotFoundError:
        raise ParseError(str(path), "file not found")
    except (pandas.errors.EmptyDataError, pandas.errors.ParserError,
            UnicodeDecodeError) as error:
        raise ParseError(str(path), str(error))
    if list(table.columns) != POLICY_FILE_COLUMNS:
        raise ParseError(str(path), "expected columns %s, got %s" %
                         (",".join(POLICY_FILE_COLUMNS),
                          ",".join(str(col) for col in table.columns)))
    try:
        table = table.astype({"from": int, "to": int, "lambda": float})
    except (ValueError, TypeError) as error:
        raise ParseError(str(path), str(error))
    edge_rates = {}
    for row in table.itertuples(index=False):
        key = (int(row[0]), int(row[1]))
        if key in edge_rates:
            raise PolicyError("Policy file repeats edge %d -> %d" % key)
        edge_rates[key] = float(row[2])
    _LOGGER.info("Read intensities for %d edges from %s.", len(edge_rates),
                 path)
    return ConstantPolicy(problem, edge_rates)
