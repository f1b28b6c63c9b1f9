"""Instance builders and test oracles shared by the tests."""
import math
import numpy as np
from entrograph.problem import validate_problem


def make_problem(n_nodes, edges, rewards, terminal_rewards, horizon):
    """Build a validated GraphProblem from (from, to, b) triples."""
    raw = {"n_nodes": n_nodes,
           "edges": [{"from": i, "to": j, "b": b} for i, j, b in edges],
           "r": list(rewards), "g": list(terminal_rewards), "T": horizon}
    return validate_problem(raw)


def raw_two_cycle(horizon=1.0):
    """Document of the symmetric 2-cycle: b = -1 both ways, r = g = 0."""
    return {"n_nodes": 2,
            "edges": [{"from": 0, "to": 1, "b": -1.0},
                      {"from": 1, "to": 0, "b": -1.0}],
            "r": [0.0, 0.0], "g": [0.0, 0.0], "T": horizon}


def two_cycle(horizon=1.0, terminal_rewards=(0.0, 0.0)):
    """Symmetric 2-cycle; B = [[0, 1], [1, 0]]."""
    return make_problem(2, [(0, 1, -1.0), (1, 0, -1.0)], (0.0, 0.0),
                        terminal_rewards, horizon)


def no_edges(horizon=1.0):
    """Two isolated nodes with r = (1, -1), g = (0, 2)."""
    return make_problem(2, [], (1.0, -1.0), (0.0, 2.0), horizon)


def four_one(horizon=1.0):
    """2-cycle with B = [[0, 4], [1, 0]]."""
    return make_problem(2, [(0, 1, -1.0 - math.log(4.0)), (1, 0, -1.0)],
                        (0.0, 0.0), (0.0, 0.0), horizon)


def slow_pair(horizon=1.0):
    """2-cycle with B = [[0, 0.3], [0.3, 0]] and asymmetric g.

    The eigenvalues of B are 0.3 and -0.3, so finite-horizon quantities
    approach their ergodic limits like exp(-0.6 T).
    """
    offset = -1.0 - math.log(0.3)
    return make_problem(2, [(0, 1, offset), (1, 0, offset)], (0.0, 0.0),
                        (0.5, -0.5), horizon)


def random_connected(seed, n_nodes=4, horizon=2.0, extra=0.4):
    """Random strongly connected instance.

    A Hamiltonian cycle guarantees strong connectivity; every other ordered
    pair becomes an edge with probability extra.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_nodes)
    pairs = {(int(order[k]), int(order[(k + 1) % n_nodes]))
             for k in range(n_nodes)}
    for i in range(n_nodes):
        for j in range(n_nodes):
            if i != j and rng.random() < extra:
                pairs.add((i, j))
    edges = [(i, j, float(rng.uniform(-1.5, 0.5))) for i, j in sorted(pairs)]
    rewards = rng.uniform(-1.0, 1.0, n_nodes)
    terminal_rewards = rng.uniform(-1.0, 1.0, n_nodes)
    return make_problem(n_nodes, edges, rewards, terminal_rewards, horizon)


def random_instance(seed, n_nodes, density=0.3, offsets=3.0, rewards=2.0,
                    terminal_rewards=2.0, horizon=1.0):
    """Random instance with edge probability density; sinks are allowed.

    b, r and g are uniform on [-offsets, offsets], [-rewards, rewards] and
    [-terminal_rewards, terminal_rewards].
    """
    rng = np.random.default_rng(seed)
    pattern = rng.random((n_nodes, n_nodes)) < density
    np.fill_diagonal(pattern, False)
    edges = [(int(i), int(j), float(rng.uniform(-offsets, offsets)))
             for i, j in zip(*np.nonzero(pattern))]
    return make_problem(n_nodes, edges,
                        rng.uniform(-rewards, rewards, n_nodes),
                        rng.uniform(-terminal_rewards, terminal_rewards,
                                    n_nodes),
                        horizon)


def random_pattern(seed, n_nodes, density):
    """Random boolean adjacency matrix without self-loops."""
    rng = np.random.default_rng(seed)
    pattern = rng.random((n_nodes, n_nodes)) < density
    np.fill_diagonal(pattern, False)
    return pattern


def transitive_closure(pattern):
    """Reachability by repeated boolean matrix products (reflexive)."""
    n_nodes = pattern.shape[0]
    reach = pattern.astype(bool) | np.eye(n_nodes, dtype=bool)
    for _ in range(n_nodes):
        reach = reach | ((reach.astype(int) @ reach.astype(int)) > 0)
    return reach


def closure_components(pattern):
    """Strongly connected components from the closure oracle."""
    reach = transitive_closure(pattern)
    mutual = reach & reach.T
    components = []
    seen = set()
    for i in range(pattern.shape[0]):
        if i in seen:
            continue
        component = [int(j) for j in np.flatnonzero(mutual[i])]
        seen.update(component)
        components.append(component)
    return components


def taylor_expm(matrix, terms=60):
    """Truncated Taylor series of the matrix exponential."""
    result = np.eye(matrix.shape[0])
    term = np.eye(matrix.shape[0])
    for k in range(1, terms):
        term = term @ matrix / k
        result = result + term
    return result
