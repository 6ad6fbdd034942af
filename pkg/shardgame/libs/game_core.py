import enum
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

LOG_FLOOR = 1e-12
FEASIBILITY_TOLERANCE = 1e-9


class LeaderVariant(str, enum.Enum):
    LOG = "log"
    LINEAR = "linear"


@dataclass(frozen=True)
class FollowerSpec:
    id: str
    capacity: float
    unit_cost: float

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError(f"follower '{self.id}': capacity must be > 0, got {self.capacity}")
        if not self.unit_cost > 0:
            raise ValueError(f"follower '{self.id}': unit_cost must be > 0, got {self.unit_cost}")


@dataclass(frozen=True)
class ShardSpec:
    id: str
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"shard '{self.id}': alpha must be > 0, got {self.alpha}")


@dataclass
class EquilibriumResult:
    """Followers' profile reached by best-response iteration at fixed payments."""
    allocation: np.ndarray
    payments: np.ndarray
    sweeps: int
    converged: bool
    residual: float
    follower_utilities: np.ndarray
    leader_utility: float
    at_capacity: np.ndarray
    trajectory: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def shard_totals(self):
        return self.allocation.sum(axis=0)

    @property
    def total_resources(self):
        return float(self.allocation.sum())


def as_payments(payments, num_shards=None):
    payments = np.asarray(payments, dtype=float)
    if payments.ndim != 1:
        raise ValueError(f"payments must be a vector, got shape {payments.shape}")
    if num_shards is not None and len(payments) != num_shards:
        raise ValueError(f"payments has {len(payments)} entries but there are {num_shards} shards")
    if np.any(payments < 0):
        raise ValueError(f"payments must be non-negative, got {payments.tolist()}")
    return payments


def check_allocation(allocation, capacities):
    """Return the allocation as a float matrix after checking r >= 0 and row budgets."""
    allocation = np.asarray(allocation, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    if allocation.ndim != 2 or allocation.shape[0] != len(capacities):
        raise ValueError(f"allocation must be {len(capacities)} x M, got shape {allocation.shape}")
    if np.any(allocation < 0):
        raise ValueError("allocation entries must be non-negative")
    excess = allocation.sum(axis=1) - capacities * (1 + FEASIBILITY_TOLERANCE)
    if np.any(excess > 0):
        row = int(np.argmax(excess))
        raise ValueError(f"allocation row {row} exceeds its capacity {capacities[row]}")
    return allocation


def shard_payoff(r, others_total, payment):
    """Proportional share of a shard's payment earned by contributing r."""
    if r < 0 or others_total < 0 or payment < 0:
        raise ValueError(f"shard_payoff needs non-negative inputs, got r={r}, "
                         f"others_total={others_total}, payment={payment}")
    total = r + others_total
    if total == 0:
        return 0.0
    return r / total * payment


def _proportional_shares(allocation, payments):
    totals = allocation.sum(axis=0)
    safe_totals = np.where(totals > 0, totals, 1.0)
    return np.where(totals > 0, allocation / safe_totals, 0.0) * payments


def follower_utility(n, allocation, payments, specs):
    allocation = np.asarray(allocation, dtype=float)
    payments = as_payments(payments, allocation.shape[1])
    if not 0 <= n < len(specs):
        raise ValueError(f"follower index {n} out of range for {len(specs)} followers")
    row = allocation[n]
    others = allocation.sum(axis=0) - row
    reward = sum(shard_payoff(r, max(t, 0.0), p) for r, t, p in zip(row, others, payments))
    return reward - specs[n].unit_cost * row.sum()


def follower_utilities(allocation, payments, unit_costs):
    allocation = np.asarray(allocation, dtype=float)
    payments = as_payments(payments, allocation.shape[1])
    rewards = _proportional_shares(allocation, payments).sum(axis=1)
    return rewards - np.asarray(unit_costs, dtype=float) * allocation.sum(axis=1)


def follower_utility_gradient(n, allocation, payments, unit_cost):
    """Gradient of follower n's utility with respect to its own row."""
    allocation = np.asarray(allocation, dtype=float)
    payments = as_payments(payments, allocation.shape[1])
    row = allocation[n]
    others = np.maximum(allocation.sum(axis=0) - row, 0.0)
    totals = row + others
    safe_totals = np.where(totals > 0, totals, 1.0)
    marginal = np.where(totals > 0, payments * others / safe_totals ** 2, 0.0)
    return marginal - unit_cost


def leader_utility(allocation, payments, shards, variant=LeaderVariant.LOG):
    allocation = np.asarray(allocation, dtype=float)
    if len(payments) != len(shards):
        raise ValueError(f"payments has {len(payments)} entries but there are {len(shards)} shards")
    payments = as_payments(payments)
    variant = LeaderVariant(variant)
    alphas = np.array([shard.alpha for shard in shards])
    totals = allocation.sum(axis=0)
    if variant is LeaderVariant.LOG:
        value = alphas * np.log(np.maximum(totals, LOG_FLOOR))
    else:
        value = alphas * totals
    return float(np.sum(value - payments))

