"""Graph utilities for entrograph.

Graphs are plain adjacency mappings ``{node: [successor, ...]}`` over the
nodes ``0..n-1``; I/O-related helpers belong in input_output.py.
"""
import logging
import numpy as np


_LOGGER = logging.getLogger(__name__)


def adjacency_from_pattern(matrix):
    """Build the adjacency mapping of a matrix sparsity pattern.

    The entry (i, j) is an edge iff it is nonzero and i != j.

    Args:
        matrix:  square array
    Returns:
        dictionary mapping each row index to the list of nonzero columns
    """
    matrix = np.asarray(matrix)
    adjacency = {}
    for i in range(matrix.shape[0]):
        adjacency[i] = [j for j in np.flatnonzero(matrix[i]) if j != i]
    return adjacency


def strongly_connected_components(map_, n_nodes):
    """Return the strongly connected components of a directed graph.

    Uses Tarjan's algorithm with Nuutila's modifications in its
    non-recursive form, so deep graphs do not hit the recursion limit.

    Args:
        map_:  The adjacency mapping (dict of node -> successors)
        n_nodes:  Number of nodes; nodes are 0..n_nodes-1
    Returns:
        list of components, each a sorted list of nodes; components are
        ordered by their smallest node
    """
    preorder = {}
    lowlink = {}
    scc_found = set()
    scc_queue = []
    scc_list = []
    counter = 0
    for source in range(n_nodes):
        if source in scc_found:
            continue
        queue = [source]
        while queue:
            node = queue[-1]
            if node not in preorder:
                counter += 1
                preorder[node] = counter
            done = True
            successors = map_.get(node, ())
            for succ in successors:
                if succ not in preorder:
                    queue.append(succ)
                    done = False
                    break
            if not done:
                continue
            lowlink[node] = preorder[node]
            for succ in successors:
                if succ in scc_found:
                    continue
                if preorder[succ] > preorder[node]:
                    lowlink[node] = min(lowlink[node], lowlink[succ])
                else:
                    lowlink[node] = min(lowlink[node], preorder[succ])
            queue.pop()
            if lowlink[node] == preorder[node]:
                scc_found.add(node)
                scc = [node]
                while scc_queue and preorder[scc_queue[-1]] > preorder[node]:
                    member = scc_queue.pop()
                    scc_found.add(member)
                    scc.append(member)
                scc_list.append(sorted(scc))
            else:
                scc_queue.append(node)
    scc_list.sort(key=lambda scc: scc[0])
    _LOGGER.debug("Found %d strongly connected components in %d nodes.",
                  len(scc_list), n_nodes)
    return scc_list


def is_irreducible(matrix):
    """Determine whether a square matrix is irreducible.

    Args:
        matrix:  square array
    Returns:
        True if the graph of its nonzero pattern is strongly connected
    """
    matrix = np.asarray(matrix)
    n_nodes = matrix.shape[0]
    if n_nodes == 1:
        return True
    components = strongly_connected_components(
        adjacency_from_pattern(matrix), n_nodes)
    return len(components) == 1
