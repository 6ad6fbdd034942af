import numpy as np
import pytest

from shardgame.libs import game_core
from shardgame.libs.equilibrium_engine import (solve_followers_equilibrium, uniqueness_probe, concavity_check,
                                               rosen_dsc_check, pseudo_gradient_jacobian,
                                               random_interior_allocation, uniform_allocation)
from shardgame.libs.utils import central_difference_hessian

from tests.unit.conftest import contest_config


def test_figure3_equilibrium(figure3_config):
    result = solve_followers_equilibrium(figure3_config, figure3_config.payments)
    totals = result.allocation.sum(axis=1)

    assert result.converged
    assert result.sweeps <= 10
    assert totals[0] == pytest.approx(100, abs=0.01)
    assert totals[1] == pytest.approx(200, abs=0.01)
    assert totals[2] < 300 - 0.01
    assert totals[3] < 500 - 0.01
    assert totals[1] > totals[2]
    assert result.at_capacity.tolist() == [True, True, False, False]


def test_figure3_equilibrium_is_a_fixed_point(figure3_config):
    config = figure3_config.replace(br_tolerance=1e-8)
    result = solve_followers_equilibrium(config, config.payments)

    again = solve_followers_equilibrium(config.replace(max_sweeps=1), config.payments, init=result.allocation)
    assert np.max(np.abs(again.allocation - result.allocation)) <= config.br_tolerance


def test_equilibrium_utilities_are_non_negative(figure3_config):
    result = solve_followers_equilibrium(figure3_config, figure3_config.payments)
    assert np.all(result.follower_utilities >= -1e-9)


def test_symmetric_followers_split_the_shard():
    config = contest_config([1, 1], capacity=1000)
    result = solve_followers_equilibrium(config, [100])

    assert result.converged
    assert result.allocation[:, 0] == pytest.approx([25, 25], abs=1e-3)


def test_zero_payments_are_a_fixed_point(figure3_config):
    result = solve_followers_equilibrium(figure3_config, [0, 0])

    assert result.converged
    assert result.sweeps == 1
    assert result.residual == pytest.approx(500 / 4)
    assert np.all(result.allocation == 0)


def test_exhausted_sweeps_are_reported(figure3_config):
    result = solve_followers_equilibrium(figure3_config.replace(max_sweeps=1), figure3_config.payments)

    assert not result.converged
    assert result.sweeps == 1
    assert result.residual > figure3_config.br_tolerance


def test_trajectory_starts_at_the_initial_profile(figure3_config):
    result = solve_followers_equilibrium(figure3_config, figure3_config.payments, record_trajectory=True)

    assert len(result.trajectory) == result.sweeps + 1
    assert np.array_equal(result.trajectory[0], uniform_allocation(figure3_config))
    assert np.array_equal(result.trajectory[-1], result.allocation)


def test_infeasible_initial_profile_is_rejected(figure3_config):
    init = np.full((4, 2), 1000.0)
    with pytest.raises(ValueError):
        solve_followers_equilibrium(figure3_config, figure3_config.payments, init=init)


def test_unknown_initialisation_is_rejected(figure3_config):
    with pytest.raises(ValueError):
        solve_followers_equilibrium(figure3_config, figure3_config.payments, init="random")


def test_payments_length_is_checked(figure3_config):
    with pytest.raises(ValueError):
        solve_followers_equilibrium(figure3_config, [1, 2, 3])


def test_uniqueness_probe_on_figure3(figure3_config):
    config = figure3_config.replace(br_tolerance=1e-8)
    report = uniqueness_probe(config, config.payments, num_seeds=10)

    assert report.runs == 10
    assert report.non_converged == 0
    assert report.max_deviation <= 1e-3


def test_uniqueness_probe_single_follower_single_shard():
    config = contest_config([1.0], capacity=100)
    report = uniqueness_probe(config, [10], num_seeds=5, workers=2)
    assert report.max_deviation <= config.br_tolerance


def test_uniqueness_probe_without_payments(figure3_config):
    report = uniqueness_probe(figure3_config, [0, 0], num_seeds=4)
    assert report.max_deviation == 0
    assert report.non_converged == 0


def test_uniqueness_probe_needs_two_seeds(figure3_config):
    with pytest.raises(ValueError):
        uniqueness_probe(figure3_config, figure3_config.payments, num_seeds=1)


def test_concavity_check_passes_on_figure3(figure3_config):
    report = concavity_check(figure3_config, figure3_config.payments, num_samples=100)

    assert report.passed
    assert report.max_eigenvalue <= 1e-6
    assert report.samples == 100


def test_concavity_check_passes_without_payments(figure3_config):
    report = concavity_check(figure3_config, [0, 0], num_samples=5)
    assert report.passed


def test_single_shard_second_derivative():
    def utility(row):
        return game_core.shard_payoff(row[0], 10, 100) - row[0]

    hessian = central_difference_hessian(utility, np.array([10.0]), 1e-4 * 100)
    assert hessian[0, 0] == pytest.approx(-0.25, abs=1e-6)


def test_rosen_check_passes_on_figure3(figure3_config):
    report = rosen_dsc_check(figure3_config, figure3_config.payments, num_samples=100)

    assert report.passed
    assert not report.degenerate
    assert report.max_eigenvalue < 0
    assert report.samples == 100


def test_rosen_check_is_degenerate_without_payments(figure3_config):
    report = rosen_dsc_check(figure3_config, [0, 0], num_samples=5)

    assert report.degenerate
    assert not report.passed


def test_rosen_check_rejects_bad_weights(figure3_config):
    with pytest.raises(ValueError):
        rosen_dsc_check(figure3_config, figure3_config.payments, weights=[1, 1, 1, 0])
    with pytest.raises(ValueError):
        rosen_dsc_check(figure3_config, figure3_config.payments, weights=[1, 1])


def test_jacobian_diagonal_blocks_are_own_hessians():
    config = contest_config([0.5, 0.8], payments_alphas=(1.0, 2.0), capacity=100)
    rng = np.random.default_rng(21)
    payments = np.array([40.0, 70.0])
    allocation = random_interior_allocation(config, rng)

    jacobian = pseudo_gradient_jacobian(config, payments, allocation, np.ones(2))
    for n in range(2):
        def own_utility(row):
            profile = allocation.copy()
            profile[n] = row
            return game_core.follower_utilities(profile, payments, config.unit_costs)[n]

        hessian = central_difference_hessian(own_utility, allocation[n], 1e-4 * 100)
        block = jacobian[2 * n:2 * n + 2, 2 * n:2 * n + 2]
        assert block == pytest.approx(hessian, abs=1e-4)


def test_checks_are_reproducible(figure3_config):
    first = concavity_check(figure3_config, figure3_config.payments, num_samples=5)
    second = concavity_check(figure3_config, figure3_config.payments, num_samples=5)
    assert first.max_eigenvalue == second.max_eigenvalue
