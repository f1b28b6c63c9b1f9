"""Perform functions related to _main_ execution of entrograph.

This module is intended for functions that directly touch arguments provided
at the invocation of entrograph.  It was created to avoid cluttering the
__init__.py file.
"""
import logging
import argparse
from pathlib import Path
from . import hjb
from . import oracle
from . import ergodic
from . import simulate
from . import problem as prob
from . import input_output as io
from .policy import OptimalPolicy
from .config import VERSION, TITLE_FORMAT_STRING, CHECK_TOLERANCE
from .config import SIM_PATHS, SIM_SEED, SIM_STEPS_PER_UNIT
from .errors import EntrographError, ParseError


_LOGGER = logging.getLogger(__name__)


# Exit codes
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


class CommandResult(object):
    """Exit code and written artifacts of one command."""

    def __init__(self, exit_code, artifacts=None):
        self.exit_code = exit_code
        self.artifacts = list(artifacts or [])

    def __str__(self):
        return "CommandResult(%d, %s)" % (self.exit_code, self.artifacts)


def build_parser():
    """Build an argument parser.

    Return:
        ArgumentParser() object
    """
    desc = TITLE_FORMAT_STRING.format(version=VERSION)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem_file", help="Problem document (JSON)")
    common.add_argument("--out", default=None,
                        help=("Prefix of the output files (default: problem "
                              "file without its extension)"))
    common.add_argument("--log-level", help="Logging level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR",
                                 "CRITICAL"])
    pars = argparse.ArgumentParser(
        description=desc,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    subs = pars.add_subparsers(dest="command", metavar="command")
    subs.required = True

    solve = subs.add_parser(
        "solve", parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Tabulate the value function and optimal intensities")
    solve.add_argument("--steps", type=int, default=None,
                       help="Number of grid steps (default: resolve B)")

    subs.add_parser(
        "ergodic", parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Ergodic constant, Perron vectors and limit intensities")

    sim = subs.add_parser(
        "simulate", parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Monte Carlo estimate of the objective under a policy")
    sim.add_argument("--policy", default="optimal",
                     help="'optimal' or 'constant:<CSV file with from,to,"
                          "lambda>'")
    sim.add_argument("--start", type=int, default=0, help="Initial node")
    sim.add_argument("--paths", type=int, default=SIM_PATHS,
                     help="Number of sample paths")
    sim.add_argument("--seed", type=int, default=SIM_SEED,
                     help="Master random seed")
    sim.add_argument("--steps", type=int, default=None,
                     help="Policy-freezing time steps (default: %d per unit "
                          "of horizon)" % SIM_STEPS_PER_UNIT)
    sim.add_argument("--workers", type=int, default=1,
                     help="Number of worker processes")

    check = subs.add_parser(
        "check", parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Compare the closed form with the Runge-Kutta oracle")
    check.add_argument("--steps", type=int, default=None,
                       help="Number of grid steps (default: resolve B)")
    return pars


def output_prefix(problem_file, out_prefix):
    """Return the artifact prefix: --out, or the problem path minus suffix."""
    if out_prefix is not None:
        return str(out_prefix)
    return str(Path(problem_file).with_suffix(""))


def cmd_solve(problem_file, n_steps=None, out_prefix=None):
    """Write <prefix>_value.csv and <prefix>_policy.csv.

    Args:
        problem_file:  path to the problem document
        n_steps:  grid steps (default: hjb.default_steps)
        out_prefix:  artifact prefix
    Returns:
        CommandResult
    """
    prefix = output_prefix(problem_file, out_prefix)
    problem = prob.read_problem(problem_file)
    _LOGGER.info("Solving the value function.")
    solution = hjb.solve_value_function(problem, n_steps)
    _LOGGER.info("Writing value function and policy tables.")
    with io.ArtifactSet() as artifacts:
        artifacts.add_text(prefix + "_value.csv",
                           io.table_text(io.value_table(solution)))
        artifacts.add_text(prefix + "_policy.csv",
                           io.table_text(io.policy_table(problem, solution)))
        written = artifacts.commit()
    return CommandResult(EXIT_OK, written)


def cmd_ergodic(problem_file, out_prefix=None):
    """Write <prefix>_ergodic.json.

    Args:
        problem_file:  path to the problem document
        out_prefix:  artifact prefix
    Returns:
        CommandResult
    """
    prefix = output_prefix(problem_file, out_prefix)
    problem = prob.read_problem(problem_file)
    _LOGGER.info("Running the ergodic analysis.")
    result = ergodic.analyze(problem)
    _LOGGER.info("Spectral gap of B + %g I: %.6g.", result.sigma,
                 ergodic.spectral_gap(problem, result.sigma))
    with io.ArtifactSet() as artifacts:
        artifacts.add_text(prefix + "_ergodic.json",
                           io.json_text(io.ergodic_document(problem, result)))
        written = artifacts.commit()
    return CommandResult(EXIT_OK, written)


def load_policy(policy_spec, problem):
    """Build the policy named by --policy.

    Args:
        policy_spec:  "optimal" or "constant:<file>"
        problem:  GraphProblem
    Returns:
        IntensityPolicy
    Raises:
        ParseError:  unknown policy specification
    """
    if policy_spec == "optimal":
        return OptimalPolicy(problem)
    kind, _, path = policy_spec.partition(":")
    if kind != "constant" or not path:
        raise ParseError("--policy", "expected 'optimal' or "
                         "'constant:<file>', got %r" % policy_spec)
    return io.read_constant_policy(path, problem)


def cmd_simulate(problem_file, policy_spec="optimal", start=0,
                 n_paths=SIM_PATHS, seed=SIM_SEED, out_prefix=None,
                 n_time_steps=None, workers=1):
    """Write <prefix>_sim.json with a Monte Carlo estimate of the objective.

    Args:
        problem_file:  path to the problem document
        policy_spec:  "optimal" or "constant:<file>"
        start:  initial node i0
        n_paths:  number of sample paths
        seed:  master seed
        out_prefix:  artifact prefix
        n_time_steps:  policy-freezing grid
        workers:  worker processes
    Returns:
        CommandResult
    """
    prefix = output_prefix(problem_file, out_prefix)
    problem = prob.read_problem(problem_file)
    policy = load_policy(policy_spec, problem)
    estimate = simulate.estimate_objective(problem, policy, start, n_paths,
                                           seed, n_time_steps, workers)
    if isinstance(policy, OptimalPolicy):
        value = float(policy.solution.u[0, start])
        print("Simulated objective %.10g +/- %.3g; value u_%d(0) = %.10g "
              "(difference %.3g, %.2f standard errors)." % (
                  estimate.mean, estimate.stderr, start, value,
                  estimate.mean - value,
                  (estimate.mean - value) / estimate.stderr
                  if estimate.stderr > 0 else 0.0))
    with io.ArtifactSet() as artifacts:
        artifacts.add_text(prefix + "_sim.json",
                           io.json_text(io.simulation_document(estimate)))
        written = artifacts.commit()
    return CommandResult(EXIT_OK, written)


def cmd_check(problem_file, n_steps=None):
    """Compare the closed form with the Runge-Kutta oracle.

    Args:
        problem_file:  path to the problem document
        n_steps:  grid steps shared by both solvers
    Returns:
        CommandResult with exit code 0 iff the deviation is at most
        CHECK_TOLERANCE and the residual is within its grid bound
    """
    problem = prob.read_problem(problem_file)
    if n_steps is None:
        n_steps = hjb.default_steps(problem)
    solution = hjb.solve_value_function(problem, n_steps)
    _LOGGER.info("Integrating the Runge-Kutta oracle on %d steps.", n_steps)
    reference = oracle.integrate_hj_backward(problem, n_steps)
    deviation = oracle.compare_solutions(solution, reference)
    residual = hjb.hj_residual(solution, problem)
    bound = hjb.residual_bound(solution)
    print("Max deviation from the Runge-Kutta oracle: %.3e (tolerance %.1e)"
          % (deviation, CHECK_TOLERANCE))
    print("Max Hamilton-Jacobi residual: %.3e (bound %.3e)" % (residual,
                                                                bound))
    exit_code = EXIT_OK
    if deviation > CHECK_TOLERANCE:
        _LOGGER.error("Deviation %.3e exceeds %.1e.", deviation,
                      CHECK_TOLERANCE)
        exit_code = EXIT_DOMAIN_ERROR
    if residual > bound:
        _LOGGER.error("Residual %.3e exceeds its bound %.3e.", residual,
                      bound)
        exit_code = EXIT_DOMAIN_ERROR
    return CommandResult(exit_code)


def run_command(args):
    """Dispatch parsed arguments to a command.

    Args:
        args:  argparse namespace
    Returns:
        CommandResult
    """
    if args.command == "solve":
        return cmd_solve(args.problem_file, args.steps, args.out)
    if args.command == "ergodic":
        return cmd_ergodic(args.problem_file, args.out)
    if args.command == "simulate":
        return cmd_simulate(args.problem_file, args.policy, args.start,
                            args.paths, args.seed, args.out, args.steps,
                            args.workers)
    return cmd_check(args.problem_file, args.steps)


def main(argv=None):
    """Main driver for running program from the command line.

    Args:
        argv:  argument list (default: sys.argv[1:])
    Returns:
        exit code: 0 success, 1 domain error, 2 usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_USAGE_ERROR if exit_.code else EXIT_OK
    logging.basicConfig(level=getattr(logging, args.log_level))
    logging.captureWarnings(True)
    for handler in logging.getLogger().handlers:
        if not any(isinstance(filter_, io.DuplicateFilter)
                   for filter_ in handler.filters):
            handler.addFilter(io.DuplicateFilter())
    _LOGGER.debug("Invoked with arguments: %s", args)
    _LOGGER.info("%s", TITLE_FORMAT_STRING.format(version=VERSION))
    try:
        result = run_command(args)
    except EntrographError as error:
        _LOGGER.error("%s", error)
        return EXIT_DOMAIN_ERROR
    except ValueError as error:
        _LOGGER.error("%s", error)
        return EXIT_USAGE_ERROR
    for path in result.artifacts:
        _LOGGER.info("Wrote %s.", path)
    return result.exit_code
