"""Tests for the matrix exponential, propagation and power iteration."""
import math
import numpy as np
import pytest
from scipy import linalg
from entrograph import numerics
from entrograph import hjb
from entrograph import errors
import common


def test_expm_zero():
    assert np.array_equal(numerics.expm(np.zeros((3, 3))), np.eye(3))


def test_expm_diagonal():
    result = numerics.expm(np.diag([0.3, -2.0]))
    np.testing.assert_allclose(result, np.diag([math.exp(0.3),
                                                math.exp(-2.0)]),
                               rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("time", [0.01, 0.2, 1.0, 3.0, 12.0])
def test_expm_hyperbolic(time):
    """exp([[0, 1], [1, 0]] t) against cosh/sinh and the Taylor series."""
    matrix = np.array([[0.0, 1.0], [1.0, 0.0]]) * time
    expected = np.array([[math.cosh(time), math.sinh(time)],
                         [math.sinh(time), math.cosh(time)]])
    result = numerics.expm(matrix)
    np.testing.assert_allclose(result, expected, rtol=1e-12)
    if time <= 1.0:
        np.testing.assert_allclose(result, common.taylor_expm(matrix),
                                   rtol=1e-13)


@pytest.mark.parametrize("seed", range(10))
def test_expm_inverse(seed):
    """expm(M) expm(-M) = I."""
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-1.0, 1.0, (5, 5))
    matrix *= 3.0 / np.abs(matrix).sum(axis=1).max()
    product = numerics.expm(matrix) @ numerics.expm(-matrix)
    assert np.abs(product - np.eye(5)).max() <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_expm_matches_scipy(seed):
    rng = np.random.default_rng(100 + seed)
    scale = [0.01, 0.1, 0.5, 1.5, 3.0, 5.0][seed % 6]
    matrix = rng.normal(size=(4, 4)) * scale
    expected = linalg.expm(matrix)
    np.testing.assert_allclose(numerics.expm(matrix), expected,
                               rtol=1e-10, atol=1e-12 * np.abs(expected).max())


def test_expm_rejects_nan():
    with pytest.raises(errors.NonFiniteError):
        numerics.expm(np.array([[0.0, np.nan], [0.0, 0.0]]))


def test_scaled_vector():
    vector = numerics.ScaledPositiveVector.from_log(np.array([1000.0,
                                                              999.0]))
    assert vector.log_scale == 1000.0
    np.testing.assert_allclose(vector.direction, [1.0, math.exp(-1.0)])
    np.testing.assert_allclose(vector.log_values(), [1000.0, 999.0])
    with pytest.raises(errors.PositivityLostError):
        numerics.ScaledPositiveVector.from_values([1.0, 0.0])


def test_propagate_identity_flow():
    start = numerics.ScaledPositiveVector.from_values([1.0, 2.0, 3.0])
    states = numerics.propagate(np.zeros((3, 3)), start, 2.0, 10)
    assert len(states) == 11
    for state in states:
        np.testing.assert_allclose(state.log_values(), start.log_values(),
                                   atol=1e-14)


def test_propagate_diagonal():
    """log of the k-th point is g + r tau_k."""
    rewards = np.array([1.0, -0.5, 2.0])
    terminal = np.array([0.0, 1.0, -3.0])
    start = numerics.ScaledPositiveVector.from_log(terminal)
    states = numerics.propagate(np.diag(rewards), start, 4.0, 8)
    for k, state in enumerate(states):
        np.testing.assert_allclose(state.log_values(),
                                   terminal + rewards * 0.5 * k, atol=1e-12)


def test_propagate_no_overflow():
    matrix = np.array([[0.0, 1.0], [1.0, 0.0]])
    start = numerics.ScaledPositiveVector.from_values([1.0, 1.0])
    final = numerics.propagate(matrix, start, 50.0, 100)[-1]
    assert final.log_scale == pytest.approx(50.0, abs=1e-9)
    np.testing.assert_allclose(final.direction, [1.0, 1.0], atol=1e-12)


def test_propagate_negative_off_diagonal():
    """A step matrix with negative entries: exp(M tau) (1, 1) decays."""
    matrix = np.array([[0.0, -0.1], [-0.1, 0.0]])
    start = numerics.ScaledPositiveVector.from_values([1.0, 1.0])
    states = numerics.propagate(matrix, start, 2.0, 4)
    for k, state in enumerate(states):
        np.testing.assert_allclose(state.log_values(), [-0.05 * k] * 2,
                                   atol=1e-13)
    with pytest.raises(errors.PositivityLostError):
        numerics.propagate(np.array([[0.0, -5.0], [-5.0, 0.0]]),
                           numerics.ScaledPositiveVector.from_values(
                               [1.0, 0.5]), 1.0, 2)


@pytest.mark.parametrize("seed", range(5))
def test_propagate_refinement(seed):
    """n and 2n steps agree on shared grid points."""
    problem = common.random_connected(seed, n_nodes=5)
    matrix = hjb.build_generator_matrix(problem).matrix
    start = numerics.ScaledPositiveVector.from_log(problem.terminal_rewards)
    coarse = numerics.propagate(matrix, start, 3.0, 30)
    fine = numerics.propagate(matrix, start, 3.0, 60)
    for k, state in enumerate(coarse):
        np.testing.assert_allclose(state.log_values(),
                                   fine[2 * k].log_values(), atol=1e-10)
    for state in fine:
        assert np.all(np.isfinite(state.log_values()))


def test_power_iteration_ones():
    pair = numerics.power_iteration(np.ones((2, 2)))
    assert pair.value == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(pair.vector, [1.0, 1.0])


@pytest.mark.parametrize("sigma", [1.0, 2.5, 7.0])
def test_power_iteration_two_by_two(sigma):
    matrix = np.array([[sigma, 4.0], [1.0, sigma]])
    pair = numerics.power_iteration(matrix)
    assert pair.value == pytest.approx(sigma + 2.0, abs=1e-10)
    np.testing.assert_allclose(pair.vector, [1.0, 0.5], atol=1e-10)


def test_power_iteration_large_radius():
    """The stopping residual scales with rho."""
    matrix = 1e6 * np.array([[2.0, 1.0], [0.5, 2.0]])
    pair = numerics.power_iteration(matrix)
    expected = 1e6 * (2.0 + math.sqrt(0.5))
    assert pair.value == pytest.approx(expected, rel=1e-12)
    assert pair.residual <= numerics.POWER_TOL * expected
    np.testing.assert_allclose(pair.vector, [1.0, math.sqrt(0.5)], atol=1e-10)


def test_power_iteration_guards():
    with pytest.raises(errors.PreconditionViolatedError):
        numerics.power_iteration(np.eye(2))
    with pytest.raises(errors.PreconditionViolatedError):
        numerics.power_iteration(np.array([[1.0, -1.0], [1.0, 1.0]]))
    with pytest.raises(errors.PreconditionViolatedError):
        numerics.power_iteration(np.array([[0.0, 1.0], [1.0, 1.0]]))


def test_power_iteration_cap():
    with pytest.raises(errors.NoConvergenceError) as info:
        numerics.power_iteration(np.array([[1.0, 0.5], [0.2, 1.0]]),
                                 max_iter=1)
    assert info.value.max_iter == 1


@pytest.mark.parametrize("seed", range(15))
def test_power_iteration_matches_eigvals(seed):
    rng = np.random.default_rng(seed)
    n_dim = 2 + seed % 9
    matrix = rng.random((n_dim, n_dim)) * (rng.random((n_dim, n_dim)) < 0.5)
    matrix += np.diag(np.ones(n_dim))
    cycle = np.roll(np.eye(n_dim), 1, axis=1)
    matrix += 0.1 * cycle
    pair = numerics.power_iteration(matrix)
    expected = np.abs(np.linalg.eigvals(matrix)).max()
    assert pair.value == pytest.approx(expected, abs=1e-9)
    assert np.all(pair.vector > 0)
    assert np.abs(matrix @ pair.vector - pair.value * pair.vector).max() \
        <= 1e-9
