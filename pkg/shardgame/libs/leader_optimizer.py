import concurrent.futures
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from shardgame.libs import game_core
from shardgame.libs.equilibrium_engine import solve_followers_equilibrium
from shardgame.libs.game_core import EquilibriumResult, LeaderVariant


@dataclass
class TraceEntry:
    payments: np.ndarray
    leader_utility: float
    converged: bool
    accepted: bool
    allocation: np.ndarray = field(repr=False)


@dataclass
class LeaderSearchResult:
    """
    Outcome of the payment search. When no evaluated payment vector reached a
    followers' equilibrium, best_utility is -inf, equilibrium is None and
    best_payments is the all-ones starting vector.
    """
    best_payments: np.ndarray
    best_utility: float
    equilibrium: Optional[EquilibriumResult]
    trace: List[TraceEntry]

    @property
    def evaluations(self):
        return len(self.trace)


@dataclass
class InteriorBenchmark:
    payments: np.ndarray
    shard_totals: Optional[np.ndarray]
    allocation: Optional[np.ndarray]
    leader_utility: Optional[float]
    applicable: bool
    reason: str = ""


@dataclass
class AlphaSweepPoint:
    factor: float
    alphas: np.ndarray
    search: LeaderSearchResult

    @property
    def total_resources(self):
        return self.search.equilibrium.total_resources if self.search.equilibrium is not None else float("nan")


def algorithm1_search(config):
    """
    Integer coordinate ascent on the payment grid, starting from all ones.
    Each pass tries P + e_m for every shard in order and keeps an increment only
    when the followers' equilibrium there raises the leader's utility. Stops on a
    pass with no improvement or when a coordinate reaches payment_grid_max.
    """
    if config.payment_grid_max < config.num_shards:
        raise ValueError(f"payment_grid_max ({config.payment_grid_max}) must be at least the number "
                         f"of shards ({config.num_shards})")

    trace = []
    solved = {}

    def evaluate(payments):
        key = tuple(int(p) for p in payments)
        if key not in solved:
            result = solve_followers_equilibrium(config, payments.astype(float))
            if not result.converged:
                logging.warning(f"Skipping payments {list(key)}: followers did not converge")
            entry = TraceEntry(payments.copy(), result.leader_utility, result.converged, False, result.allocation)
            solved[key] = (result, entry)
            trace.append(entry)
        return solved[key]

    payments = np.ones(config.num_shards, dtype=int)
    start, entry = evaluate(payments)
    best_utility = start.leader_utility if start.converged else -np.inf
    best_payments = payments.copy()
    if start.converged:
        entry.accepted = True

    at_limit = payments.max() >= config.payment_grid_max
    passes = 0
    while not at_limit:
        passes += 1
        improved = False
        for m in range(config.num_shards):
            candidate = payments.copy()
            candidate[m] += 1
            result, entry = evaluate(candidate)
            if result.converged and result.leader_utility > best_utility:
                payments, best_payments, best_utility = candidate, candidate.copy(), result.leader_utility
                entry.accepted = True
                improved = True
                logging.debug(f"Pass {passes}: accepted payments {candidate.tolist()} "
                              f"with leader utility {best_utility:.9g}")
                if payments[m] >= config.payment_grid_max:
                    at_limit = True
                    break
        if not improved:
            break

    best, _ = solved[tuple(int(p) for p in best_payments)]
    logging.info(f"Leader search finished after {passes} passes and {len(trace)} evaluations: "
                 f"P* = {best_payments.tolist()}, U_L = {best_utility:.9g}")
    return LeaderSearchResult(best_payments, best_utility, best if best.converged else None, trace)


def tullock_equilibrium_closed_form(payment, unit_costs):
    """
    Equilibrium of a single proportional contest without capacity limits.
    The active set is the longest prefix of followers sorted by cost whose
    costs all stay below payment / X.
    """
    unit_costs = np.asarray(unit_costs, dtype=float)
    if len(unit_costs) < 2:
        raise ValueError("a proportional contest needs at least 2 followers")
    if not payment > 0:
        raise ValueError(f"payment must be > 0, got {payment}")
    if np.any(unit_costs <= 0):
        raise ValueError("unit costs must be > 0")

    order = np.argsort(unit_costs, kind="stable")
    active = len(unit_costs)
    while active > 2:
        total = (active - 1) * payment / unit_costs[order[:active]].sum()
        if unit_costs[order[active - 1]] < payment / total:
            break
        active -= 1
    total = (active - 1) * payment / unit_costs[order[:active]].sum()

    contributions = np.zeros_like(unit_costs)
    chosen = order[:active]
    contributions[chosen] = np.maximum(total * (1 - unit_costs[chosen] * total / payment), 0.0)
    return contributions


def analytic_interior_benchmark(shards, followers):
    """
    Log-utility optimum when the contest is interior: X_m is proportional to
    P_m, so the leader's first-order condition gives P_m = alpha_m.
    """
    payments = np.array([shard.alpha for shard in shards], dtype=float)
    costs = np.array([follower.unit_cost for follower in followers], dtype=float)
    capacities = np.array([follower.capacity for follower in followers], dtype=float)

    try:
        columns = [tullock_equilibrium_closed_form(payment, costs) for payment in payments]
    except ValueError as error:
        return InteriorBenchmark(payments, None, None, None, False, str(error))

    allocation = np.column_stack(columns)
    used = allocation.sum(axis=1)
    if np.any(used > capacities):
        binding = [followers[n].id for n in np.flatnonzero(used > capacities)]
        logging.warning(f"Analytic benchmark not applicable: capacities bind for followers {binding}")
        return InteriorBenchmark(payments, None, None, None, False, f"capacities bind for followers {binding}")

    utility = game_core.leader_utility(allocation, payments, shards, LeaderVariant.LOG)
    return InteriorBenchmark(payments, allocation.sum(axis=0), allocation, utility, True)


def alpha_sweep(config, factors=None, workers=1):
    """Leader search repeated with every shard priority scaled by each factor."""
    factors = config.alpha_factors if factors is None else factors
    base = config.alphas

    def run(factor):
        scaled = config.with_alphas(base * factor)
        return AlphaSweepPoint(float(factor), scaled.alphas, algorithm1_search(scaled))

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, factors))
