"""Tests for the ergodic analysis."""
import math
import numpy as np
import pytest
from entrograph import ergodic
from entrograph import hjb
from entrograph import errors
import common


def test_choose_shift():
    assert ergodic.choose_shift(common.two_cycle()) == 1.0
    problem = common.make_problem(2, [(0, 1, 0.0), (1, 0, 0.0)], (-3.0, 2.0),
                                  (0.0, 0.0), 1.0)
    assert ergodic.choose_shift(problem) == 4.0


def test_two_cycle():
    result = ergodic.analyze(common.two_cycle())
    assert result.gamma == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(result.f, [1.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(result.phi, [1.0, 1.0], atol=1e-10)
    assert result.alpha == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(result.asymptotic_intensities,
                               [[0.0, 1.0], [1.0, 0.0]], atol=1e-10)


def test_four_one():
    result = ergodic.analyze(common.four_one())
    assert result.gamma == pytest.approx(2.0, abs=1e-10)
    np.testing.assert_allclose(result.f, [1.0, 0.5], atol=1e-10)
    np.testing.assert_allclose(result.phi, [0.5, 1.0], atol=1e-10)
    assert result.alpha == pytest.approx(math.log(1.5), abs=1e-10)
    np.testing.assert_allclose(
        [result.asymptotic_intensities[0, 1],
         result.asymptotic_intensities[1, 0]], [2.0, 2.0], rtol=1e-9)


def test_limit_values_need_alpha():
    result = ergodic.perron_data(common.two_cycle())
    assert result.alpha is None
    with pytest.raises(ValueError):
        result.limit_values()


def test_not_strongly_connected():
    with pytest.raises(errors.NotStronglyConnectedError) as info:
        ergodic.analyze(common.no_edges())
    assert info.value.components == [[0], [1]]
    chain = common.make_problem(3, [(0, 1, 0.0), (1, 0, 0.0), (1, 2, 0.0)],
                                (0, 0, 0), (0, 0, 0), 1.0)
    with pytest.raises(errors.NotStronglyConnectedError):
        ergodic.perron_data(chain)


@pytest.mark.parametrize("seed", range(20))
def test_perron_vectors(seed):
    problem = common.random_connected(seed, n_nodes=2 + seed % 7)
    matrix = hjb.build_generator_matrix(problem).matrix
    result = ergodic.analyze(problem)
    assert np.all(result.f > 0)
    assert np.all(result.phi > 0)
    assert result.f.max() == pytest.approx(1.0, abs=1e-15)
    assert result.phi.max() == pytest.approx(1.0, abs=1e-15)
    assert np.abs(matrix @ result.f - result.gamma * result.f).max() <= 1e-9
    assert np.abs(result.phi @ matrix -
                  result.gamma * result.phi).max() <= 1e-9
    assert result.gamma == pytest.approx(np.linalg.eigvals(matrix).real.max(),
                                         abs=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_gamma_is_simple(seed):
    problem = common.random_connected(seed, n_nodes=2 + seed % 7)
    gamma = ergodic.perron_data(problem).gamma
    eigenvalues = np.linalg.eigvals(hjb.build_generator_matrix(problem).matrix)
    assert np.sum(np.abs(eigenvalues - gamma) <= 1e-9) == 1
    assert np.sum(np.abs(eigenvalues.real - gamma) <= 1e-6) == 1


@pytest.mark.parametrize("seed", range(3))
def test_shift_invariance(seed):
    problem = common.random_connected(seed, n_nodes=4)
    base = ergodic.perron_data(problem)
    moved = ergodic.perron_data(problem, base.sigma + 5.0)
    assert moved.gamma == pytest.approx(base.gamma, abs=1e-9)
    np.testing.assert_allclose(moved.f, base.f, atol=1e-8)
    np.testing.assert_allclose(moved.phi, base.phi, atol=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_reward_shift(seed):
    """r + rho moves gamma by rho and leaves f and phi alone."""
    problem = common.random_connected(seed, n_nodes=4)
    base = ergodic.analyze(problem)
    moved = ergodic.analyze(problem.replace(rewards=problem.rewards + 0.8))
    assert moved.gamma == pytest.approx(base.gamma + 0.8, abs=1e-9)
    np.testing.assert_allclose(moved.f, base.f, atol=1e-8)
    np.testing.assert_allclose(moved.asymptotic_intensities,
                               base.asymptotic_intensities, rtol=1e-7,
                               atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_terminal_shift(seed):
    """g + c moves alpha by c."""
    problem = common.random_connected(seed, n_nodes=4)
    base = ergodic.analyze(problem)
    moved = ergodic.analyze(problem.replace(
        terminal_rewards=problem.terminal_rewards + 1.25))
    assert moved.alpha == pytest.approx(base.alpha + 1.25, abs=1e-9)
    assert moved.gamma == pytest.approx(base.gamma, abs=1e-12)


def test_spectral_gap():
    assert ergodic.spectral_gap(common.two_cycle()) == pytest.approx(2.0)
    assert ergodic.spectral_gap(common.four_one()) == pytest.approx(2.0)


def test_limit_gaps_decrease():
    problem = common.slow_pair()
    result = ergodic.perron_data(problem)
    gaps = ergodic.limit_gaps(problem, result, [5.0, 10.0, 20.0, 40.0])
    assert result.alpha is not None
    assert [gap.horizon for gap in gaps] == [5.0, 10.0, 20.0, 40.0]
    for before, after in zip(gaps, gaps[1:]):
        assert after.value_gap < before.value_gap
        assert after.policy_gap < before.policy_gap
    assert gaps[-1].value_gap < 1e-6
    assert gaps[-1].policy_gap < 1e-6
    assert gaps[-1].average_reward == pytest.approx(result.gamma, abs=0.05)


def test_random_limit_gaps():
    """Limit gaps shrink with T and vanish at T = 40 when gap * T >= 20."""
    horizons = [5.0, 10.0, 20.0, 40.0]
    checked = 0
    for seed in range(30):
        problem = common.random_connected(100 + seed, n_nodes=3 + seed % 5)
        gap = ergodic.spectral_gap(problem)
        if gap < 0.2:
            continue
        gaps = ergodic.limit_gaps(problem, ergodic.perron_data(problem),
                                  horizons)
        for before, after in zip(gaps, gaps[1:]):
            assert after.value_gap < before.value_gap or \
                after.value_gap <= 1e-9
        if gap * horizons[-1] >= 20.0:
            assert gaps[-1].value_gap <= 1e-6
            assert gaps[-1].policy_gap <= 1e-6
            checked += 1
    assert checked > 0


def test_finite_horizon_converges():
    """u^T(0) - gamma T matches alpha + log f on a well-separated instance."""
    problem = common.four_one(horizon=20.0)
    result = ergodic.analyze(problem)
    values = hjb.value_at(problem, 0.0)
    np.testing.assert_allclose(values - result.gamma * problem.horizon,
                               result.limit_values(), atol=1e-9)


def test_offset_and_policy_from_perron_data():
    problem = common.four_one().replace(terminal_rewards=[0.0, math.log(2.0)])
    result = ergodic.perron_data(problem)
    # <phi, exp(g)> = 0.5 + 2, <phi, f> = 1
    assert ergodic.asymptotic_offset(problem, result) == \
        pytest.approx(math.log(2.5), abs=1e-10)
    np.testing.assert_allclose(ergodic.asymptotic_policy(problem, result),
                               [[0.0, 2.0], [2.0, 0.0]], rtol=1e-9)
