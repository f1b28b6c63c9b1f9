"""Monte Carlo simulation of the controlled continuous-time Markov chain.

The policy is frozen on each step of a uniform grid.  With frozen rates the
integrated hazard of leaving node i, H_i(t), is piecewise linear, so a jump
is sampled exactly by drawing E ~ Exp(1) on entering a node and solving
H_i(t) = H_i(t_enter) + E.  The running cost is integrated the same way.
All paths of a block advance together, one jump per round.

Each block of SIM_BLOCK_SIZE paths draws from its own Philox stream, keyed
by (master_seed, block index), so an estimate does not depend on the number
of worker processes.
"""
import logging
import math
from multiprocessing import Pool
import numpy as np
from . import hjb
from . import oracle
from .policy import check_rates
from .config import SIM_STEPS_PER_UNIT, SIM_MAX_STEPS, SIM_BLOCK_SIZE
from .config import STEPS_PER_RATE
from .errors import IndexOutOfRangeError, PolicyError


_LOGGER = logging.getLogger(__name__)


class PathRecord(object):
    """One sampled trajectory on [0, T]."""

    def __init__(self, jump_times, states, running_cost, terminal_reward):
        """Initialize object.

        Args:
            jump_times:  increasing jump times in (0, T)
            states:  visited nodes, starting with the initial node; one more
                entry than jump_times
            running_cost:  integral of L along the path
            terminal_reward:  g at the final node
        """
        self.jump_times = list(jump_times)
        self.states = list(states)
        self.running_cost = float(running_cost)
        self.terminal_reward = float(terminal_reward)

    @property
    def objective(self):
        """-running_cost + terminal_reward."""
        return -self.running_cost + self.terminal_reward

    @property
    def final_state(self):
        """Node occupied at T."""
        return self.states[-1]

    def __str__(self):
        return "PathRecord(%d jumps, objective %.6g)" % (len(self.jump_times),
                                                         self.objective)


class SimulationEstimate(object):
    """Monte Carlo mean and standard error of the objective."""

    def __init__(self, mean, stderr, n_paths, master_seed):
        self.mean = float(mean)
        self.stderr = float(stderr)
        self.n_paths = int(n_paths)
        self.master_seed = int(master_seed)

    def to_dict(self):
        """Return the estimate with the keys of the sim.json artifact."""
        return {"mean": self.mean, "stderr": self.stderr,
                "n_paths": self.n_paths, "seed": self.master_seed}

    def __str__(self):
        return "%.10g +/- %.3g (%d paths, seed %d)" % (
            self.mean, self.stderr, self.n_paths, self.master_seed)


def default_sim_steps(horizon):
    """Return min(SIM_MAX_STEPS, ceil(SIM_STEPS_PER_UNIT * T))."""
    return max(1, min(SIM_MAX_STEPS,
                      int(math.ceil(SIM_STEPS_PER_UNIT * horizon))))


class RateTable(object):
    """A policy frozen on a uniform grid, with integrated hazards and costs.

    hazard[k, i] and cost[k, i] are the integrals over [0, t_k] of the total
    intensity out of i and of L(i, .) with the frozen rates.
    """

    def __init__(self, problem, policy, n_time_steps):
        """Initialize object.

        Args:
            problem:  GraphProblem
            policy:  IntensityPolicy of the problem
            n_time_steps:  number of grid steps
        Raises:
            NonFiniteIntensityError:  if the policy is negative or not finite
                on an edge at a grid time
        """
        if n_time_steps < 1:
            raise ValueError("Number of time steps must be positive, got %r" %
                             (n_time_steps,))
        self.n_steps = int(n_time_steps)
        self.grid = np.linspace(0.0, problem.horizon, self.n_steps + 1)
        self.step = problem.horizon / self.n_steps
        rates = np.asarray(policy.rates_table(self.grid[:-1]), dtype=float)
        on_edges = rates[:, problem.edge_mask]
        bad = ~np.all(np.isfinite(on_edges) & (on_edges >= 0), axis=1)
        if np.any(bad):
            check_rates(problem, rates[int(np.argmax(bad))],
                        float(self.grid[int(np.argmax(bad))]))
        if np.any(rates[:, ~problem.edge_mask] != 0):
            raise PolicyError("Intensities are nonzero on pairs that are not "
                              "edges")
        self.rates = rates
        self.totals = rates.sum(axis=2)
        self.costs = hjb.running_cost_rates(problem, rates)
        self.hazard = self._integrate(self.totals)
        self.cost = self._integrate(self.costs)
        self.terminal_rewards = np.array(problem.terminal_rewards)

    def _integrate(self, rates):
        """Running integrals of piecewise-constant rates at the grid times.

        Nodes whose rate never changes get rate * t_k instead of a cumulative
        sum, so a path that never jumps pays exactly rate * T.
        """
        integral = np.zeros((self.n_steps + 1, rates.shape[1]))
        integral[1:] = np.cumsum(rates * self.step, axis=0)
        constant = np.all(rates == rates[0], axis=0)
        integral[:, constant] = self.grid[:, None] * rates[0, constant]
        return integral


def _simulate_block(table, start, seed_sequence, n_lanes, record=False):
    """Sample n_lanes paths from one random stream.

    Args:
        table:  RateTable
        start:  initial node
        seed_sequence:  numpy SeedSequence of the block
        n_lanes:  number of paths
        record:  keep jump times and states
    Returns:
        (objectives, paths); paths is None unless record is set, otherwise a
        list of PathRecord
    """
    generator = np.random.Generator(np.random.Philox(seed_sequence))
    last = table.n_steps
    nodes = np.full(n_lanes, start, dtype=int)
    times = np.zeros(n_lanes)
    steps = np.zeros(n_lanes, dtype=int)
    costs = np.zeros(n_lanes)
    history = [([], [start]) for _ in range(n_lanes)] if record else None
    active = np.arange(n_lanes)
    while active.size:
        node = nodes[active]
        step = steps[active]
        elapsed = times[active] - table.grid[step]
        level = table.hazard[step, node] + table.totals[step, node] * elapsed
        entered = table.cost[step, node] + table.costs[step, node] * elapsed
        target = level + generator.standard_exponential(active.size)

        done = target >= table.hazard[last, node]
        costs[active[done]] += table.cost[last, node[done]] - entered[done]

        jumping = ~done
        lanes = active[jumping]
        if not lanes.size:
            break
        node = node[jumping]
        target = target[jumping]
        jump_step = np.empty(lanes.size, dtype=int)
        for i in np.unique(node):
            here = node == i
            jump_step[here] = np.searchsorted(table.hazard[:, i], target[here],
                                              side="right") - 1
        jump_step = np.clip(jump_step, steps[lanes], last - 1)
        rate = table.totals[jump_step, node]
        jump_time = (table.grid[jump_step] +
                     (target - table.hazard[jump_step, node]) / rate)
        jump_time = np.clip(jump_time, np.maximum(table.grid[jump_step],
                                                  times[lanes]),
                            table.grid[jump_step + 1])
        costs[lanes] += (table.cost[jump_step, node] +
                         table.costs[jump_step, node] *
                         (jump_time - table.grid[jump_step]) -
                         entered[jumping])

        cumulative = np.cumsum(table.rates[jump_step, node], axis=1)
        total = cumulative[:, -1]
        pick = np.minimum(generator.random(lanes.size) * total,
                          np.nextafter(total, 0.0))
        destination = np.sum(cumulative <= pick[:, None], axis=1)

        nodes[lanes] = destination
        times[lanes] = jump_time
        steps[lanes] = jump_step
        if record:
            for lane, time, dest in zip(lanes, jump_time, destination):
                history[lane][0].append(float(time))
                history[lane][1].append(int(dest))
        active = lanes

    objectives = -costs + table.terminal_rewards[nodes]
    paths = None
    if record:
        paths = [PathRecord(jump_times, states, cost,
                            table.terminal_rewards[states[-1]])
                 for (jump_times, states), cost in zip(history, costs)]
    return objectives, paths


def _block_seed(master_seed, block):
    """SeedSequence of one block of paths."""
    return np.random.SeedSequence(master_seed, spawn_key=(block,))


def _run_blocks(task):
    """Worker entry point: simulate a contiguous run of blocks."""
    table, start, master_seed, blocks = task
    results = [_simulate_block(table, start, _block_seed(master_seed, block),
                               size)[0]
               for block, size in blocks]
    return np.concatenate(results) if results else np.zeros(0)


def _check_start(problem, start):
    if not 0 <= start < problem.n_nodes:
        raise IndexOutOfRangeError("i0", start, problem.n_nodes)


def _check_seed(seed):
    if seed < 0:
        raise ValueError("Seeds must be nonnegative, got %r" % (seed,))


def sample_path(problem, policy, start, seed, n_time_steps=None):
    """Simulate one path of the controlled chain.

    Args:
        problem:  GraphProblem
        policy:  IntensityPolicy of the problem
        start:  initial node i0
        seed:  nonnegative integer seed
        n_time_steps:  policy-freezing grid (default: default_sim_steps())
    Returns:
        PathRecord
    Raises:
        NonFiniteIntensityError:  if the policy is negative or not finite
    """
    _check_start(problem, start)
    _check_seed(seed)
    if n_time_steps is None:
        n_time_steps = default_sim_steps(problem.horizon)
    table = RateTable(problem, policy, n_time_steps)
    _, paths = _simulate_block(table, start, np.random.SeedSequence(seed), 1,
                               record=True)
    return paths[0]


def estimate_objective(problem, policy, start, n_paths, master_seed,
                       n_time_steps=None, workers=1):
    """Monte Carlo estimate of the expected objective from node i0 at t = 0.

    Args:
        problem:  GraphProblem
        policy:  IntensityPolicy of the problem
        start:  initial node i0
        n_paths:  number of paths (at least 2)
        master_seed:  nonnegative integer seed
        n_time_steps:  policy-freezing grid (default: default_sim_steps())
        workers:  number of worker processes
    Returns:
        SimulationEstimate; identical for identical arguments, whatever the
        number of workers
    Raises:
        NonFiniteIntensityError:  if the policy is negative or not finite
    """
    if n_paths < 2:
        raise ValueError("At least 2 paths are needed, got %r" % (n_paths,))
    if workers < 1:
        raise ValueError("Number of workers must be positive, got %r" %
                         (workers,))
    _check_start(problem, start)
    _check_seed(master_seed)
    if n_time_steps is None:
        n_time_steps = default_sim_steps(problem.horizon)
    table = RateTable(problem, policy, n_time_steps)
    n_blocks = int(math.ceil(n_paths / SIM_BLOCK_SIZE))
    blocks = [(block, min(SIM_BLOCK_SIZE, n_paths - block * SIM_BLOCK_SIZE))
              for block in range(n_blocks)]
    workers = min(workers, n_blocks)
    _LOGGER.info("Sampling %d paths from node %d in %d blocks on %d "
                 "worker(s), %d time steps.", n_paths, start, n_blocks,
                 workers, n_time_steps)
    groups = np.array_split(np.arange(n_blocks), workers)
    tasks = [(table, start, master_seed, [blocks[k] for k in group])
             for group in groups]
    if workers == 1:
        results = [_run_blocks(task) for task in tasks]
    else:
        with Pool(processes=workers) as pool:
            results = pool.map(_run_blocks, tasks)
    objectives = np.concatenate(results)
    if np.all(objectives == objectives[0]):
        mean, stderr = objectives[0], 0.0
    else:
        mean = objectives.mean()
        stderr = objectives.std(ddof=1) / math.sqrt(n_paths)
    estimate = SimulationEstimate(mean, stderr, n_paths, master_seed)
    _LOGGER.info("Objective estimate %s.", estimate)
    return estimate


def evaluate_fixed_policy(problem, policy, n_steps=None):
    """Expected objective of a policy from every node at t = 0.

    Integrates dV_i/dt = L(i, lam_i.) - sum_j lam_ij (V_j - V_i) backward
    from V(T) = g with RK4, evaluating the policy at the stage times.

    Args:
        problem:  GraphProblem
        policy:  IntensityPolicy of the problem
        n_steps:  RK4 steps (default: resolves both B and the policy rates)
    Returns:
        length-N array V(0)
    """
    if n_steps is None:
        fastest = policy.rates_at(0.0).sum(axis=1).max()
        n_steps = max(hjb.default_steps(problem),
                      int(math.ceil(STEPS_PER_RATE * problem.horizon *
                                    (1.0 + fastest))))

    def rhs(time, values):
        rates = check_rates(problem, policy.rates_at(time), time)
        pull = np.sum(rates * (values[None, :] - values[:, None]), axis=1)
        return hjb.running_cost_rates(problem, rates) - pull

    _LOGGER.debug("Evaluating a fixed policy with %d RK4 steps.", n_steps)
    _, values = oracle.rk4_backward(rhs, problem.terminal_rewards,
                                    problem.horizon, n_steps)
    return values[0]
