import concurrent.futures
import logging
from dataclasses import dataclass

import numpy as np

from shardgame.libs import game_core
from shardgame.libs.follower_solver import BestResponseInput, best_response
from shardgame.libs.game_core import EquilibriumResult
from shardgame.libs.utils import central_difference_hessian, central_difference_jacobian

FINITE_DIFFERENCE_STEP = 1e-4
CONCAVITY_TOLERANCE = 1e-6
DEGENERACY_TOLERANCE = 1e-9


@dataclass
class ProbeReport:
    max_deviation: float
    runs: int
    non_converged: int


@dataclass
class CheckReport:
    name: str
    max_eigenvalue: float
    passed: bool
    degenerate: bool
    samples: int


def uniform_allocation(config):
    return np.outer(config.capacities, np.full(config.num_shards, 1.0 / (2 * config.num_shards)))


def random_feasible_allocation(config, rng):
    """A random profile using a random share of every follower's capacity."""
    shares = rng.dirichlet(np.ones(config.num_shards + 1), size=config.num_followers)[:, :-1]
    return shares * config.capacities[:, None]


def random_interior_allocation(config, rng):
    """A random profile bounded away from zero and from every capacity."""
    fractions = 0.05 + 0.9 * rng.random((config.num_followers, config.num_shards))
    return fractions * (config.capacities / config.num_shards)[:, None] * 0.95


def _result(config, payments, allocation, sweeps, converged, residual, trajectory=None):
    capacities = config.capacities
    return EquilibriumResult(
        allocation=allocation,
        payments=payments,
        sweeps=sweeps,
        converged=converged,
        residual=residual,
        follower_utilities=game_core.follower_utilities(allocation, payments, config.unit_costs),
        leader_utility=game_core.leader_utility(allocation, payments, config.shards, config.leader_variant),
        at_capacity=allocation.sum(axis=1) >= capacities - config.br_tolerance,
        trajectory=trajectory)


def solve_followers_equilibrium(config, payments, init="uniform", record_trajectory=False):
    """
    Gauss-Seidel best-response iteration: followers update in index order,
    each against the latest rows of the others, until a full sweep moves no
    coordinate by more than br_tolerance or max_sweeps is exhausted.
    """
    payments = game_core.as_payments(payments, config.num_shards)
    if isinstance(init, str):
        if init != "uniform":
            raise ValueError(f"unknown initialisation {init!r}")
        allocation = uniform_allocation(config)
    else:
        allocation = game_core.check_allocation(init, config.capacities).copy()

    trajectory = [allocation.copy()] if record_trajectory else None
    capacities, unit_costs = config.capacities, config.unit_costs
    residual = np.inf
    sweeps = 0
    converged = False

    while sweeps < config.max_sweeps:
        sweeps += 1
        residual = 0.0
        totals = allocation.sum(axis=0)
        for n in range(config.num_followers):
            others = np.maximum(totals - allocation[n], 0.0)
            row = best_response(BestResponseInput(payments, others, unit_costs[n], capacities[n],
                                                  config.epsilon_grain, config.br_tolerance))
            residual = max(residual, float(np.max(np.abs(row - allocation[n]))))
            allocation[n] = row
            totals = others + row
        if record_trajectory:
            trajectory.append(allocation.copy())
        logging.debug(f"Sweep {sweeps}: residual {residual:.3g}")

        # every best response to a zero prize is zero, so one sweep reaches the fixed point
        if residual <= config.br_tolerance or not payments.any():
            converged = True
            break

    if not converged:
        logging.warning(f"Followers did not converge after {sweeps} sweeps at payments {payments.tolist()} "
                        f"(residual {residual:.3g})")
    return _result(config, payments, allocation, sweeps, converged, residual, trajectory)


def uniqueness_probe(config, payments, num_seeds=10, workers=1):
    """Largest coordinate distance between equilibria reached from random starts."""
    if num_seeds < 2:
        raise ValueError(f"num_seeds must be >= 2, got {num_seeds}")
    streams = np.random.SeedSequence(config.rng_seed).spawn(num_seeds)

    def run(stream):
        init = random_feasible_allocation(config, np.random.default_rng(stream))
        return solve_followers_equilibrium(config, payments, init=init)

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(run, streams))

    outcomes = []
    non_converged = 0
    for result in results:
        if result.converged:
            outcomes.append(result.allocation)
        else:
            non_converged += 1

    if non_converged:
        logging.warning(f"{non_converged} of {num_seeds} uniqueness runs did not converge")
    deviation = 0.0
    for i in range(len(outcomes)):
        for j in range(i + 1, len(outcomes)):
            deviation = max(deviation, float(np.max(np.abs(outcomes[i] - outcomes[j]))))
    return ProbeReport(deviation, num_seeds, non_converged)


def _own_utility(config, payments, allocation, n):
    def utility(row):
        profile = allocation.copy()
        profile[n] = row
        return game_core.follower_utilities(profile, payments, config.unit_costs)[n]
    return utility


def concavity_check(config, payments, num_samples=100):
    """Largest eigenvalue of every follower's own-row Hessian over random interior points."""
    payments = game_core.as_payments(payments, config.num_shards)
    rng = np.random.default_rng(config.rng_seed)
    worst = -np.inf
    for _ in range(num_samples):
        allocation = random_interior_allocation(config, rng)
        for n, follower in enumerate(config.followers):
            hessian = central_difference_hessian(_own_utility(config, payments, allocation, n), allocation[n],
                                                 FINITE_DIFFERENCE_STEP * follower.capacity)
            worst = max(worst, float(np.max(np.linalg.eigvalsh(hessian))))
    return CheckReport("concavity", worst, worst <= CONCAVITY_TOLERANCE,
                       abs(worst) <= DEGENERACY_TOLERANCE, num_samples)


def pseudo_gradient_jacobian(config, payments, allocation, weights):
    """Jacobian of the weighted pseudo-gradient, stacked follower by follower."""
    shape = allocation.shape
    unit_costs = config.unit_costs

    def pseudo_gradient(flat):
        profile = flat.reshape(shape)
        return np.concatenate([weights[n] * game_core.follower_utility_gradient(n, profile, payments, unit_costs[n])
                               for n in range(shape[0])])

    steps = np.repeat(FINITE_DIFFERENCE_STEP * config.capacities, shape[1])
    return central_difference_jacobian(pseudo_gradient, allocation.ravel(), steps)


def rosen_dsc_check(config, payments, weights=None, num_samples=100):
    """
    Diagonal strict concavity: the symmetrised Jacobian of the weighted
    pseudo-gradient must be negative definite at every sampled point.
    """
    payments = game_core.as_payments(payments, config.num_shards)
    weights = np.ones(config.num_followers) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (config.num_followers,) or np.any(weights <= 0):
        raise ValueError(f"weights must be {config.num_followers} positive values, got {weights.tolist()}")

    rng = np.random.default_rng(config.rng_seed)
    worst = -np.inf
    for _ in range(num_samples):
        allocation = random_interior_allocation(config, rng)
        jacobian = pseudo_gradient_jacobian(config, payments, allocation, weights)
        worst = max(worst, float(np.max(np.linalg.eigvalsh(jacobian + jacobian.T))))

    degenerate = abs(worst) <= DEGENERACY_TOLERANCE
    if degenerate:
        logging.warning("Pseudo-gradient Jacobian is degenerate (largest eigenvalue ~ 0); "
                        "diagonal strict concavity does not hold strictly")
    return CheckReport("rosen_dsc", worst, worst < 0 and not degenerate, degenerate, num_samples)
