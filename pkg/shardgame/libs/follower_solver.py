import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from shardgame.libs.utils import project_onto_capped_simplex

BISECTION_MAX_ITERATIONS = 200
ORACLE_GRADIENT_MAPPING_TOLERANCE = 1e-8


@dataclass
class BestResponseInput:
    """What follower n sees: the shard payments and the other followers' totals."""
    payments: np.ndarray
    opponents_totals: np.ndarray
    unit_cost: float
    capacity: float
    epsilon_grain: float = 1e-6
    tolerance: Optional[float] = None

    def __post_init__(self):
        self.payments = np.asarray(self.payments, dtype=float)
        self.opponents_totals = np.asarray(self.opponents_totals, dtype=float)
        if self.payments.shape != self.opponents_totals.shape or self.payments.ndim != 1:
            raise ValueError(f"payments {self.payments.shape} and opponents_totals "
                             f"{self.opponents_totals.shape} must be vectors of equal length")
        if np.any(self.payments < 0):
            raise ValueError("payments must be non-negative")
        if np.any(self.opponents_totals < 0):
            raise ValueError("opponents_totals must be non-negative")
        if not self.unit_cost > 0:
            raise ValueError(f"unit_cost must be > 0, got {self.unit_cost}")
        if not self.capacity > 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity}")
        if self.tolerance is None:
            self.tolerance = 1e-9 * self.capacity

    def utility(self, row):
        totals = row + self.opponents_totals
        safe_totals = np.where(totals > 0, totals, 1.0)
        reward = np.where(totals > 0, row / safe_totals, 0.0) * self.payments
        return float(reward.sum() - self.unit_cost * row.sum())

    def gradient(self, row):
        totals = row + self.opponents_totals
        safe_totals = np.where(totals > 0, totals, 1.0)
        return np.where(totals > 0, self.payments * self.opponents_totals / safe_totals ** 2, 0.0) - self.unit_cost


@dataclass
class BestResponse:
    allocation: np.ndarray
    multiplier: float
    budget_binds: bool

    @property
    def total(self):
        return float(self.allocation.sum())


@dataclass
class OracleResult:
    allocation: np.ndarray
    converged: bool
    iterations: int
    gradient_mapping_norm: float


def best_response(inp: BestResponseInput):
    return best_response_with_multiplier(inp).allocation


def best_response_with_multiplier(inp: BestResponseInput):
    """
    Water-filling best response. Shards already contested get
    sqrt(P*T/(C+lambda)) - T clipped at zero; lambda is 0 while the capacity
    is slack, otherwise bisected until the row uses exactly the capacity.
    Uncontested paid shards get the entry grain, unpaid shards get nothing.
    """
    payments, totals = inp.payments, inp.opponents_totals
    contested = (totals > 0) & (payments > 0)
    empty = (totals == 0) & (payments > 0)

    row = np.zeros_like(payments)
    grain_count = int(empty.sum())
    if grain_count:
        grain = min(inp.epsilon_grain, inp.capacity / grain_count)
        row[empty] = grain
    budget = inp.capacity - row.sum()

    if not contested.any() or budget <= 0:
        return BestResponse(row, 0.0, budget <= 0)

    p, t = payments[contested], totals[contested]

    def interior(multiplier):
        return np.maximum(0.0, np.sqrt(p * t / (inp.unit_cost + multiplier)) - t)

    unconstrained = interior(0.0)
    if unconstrained.sum() <= budget:
        row[contested] = unconstrained
        return BestResponse(row, 0.0, False)

    # at this multiplier every contested shard's marginal value is below cost
    upper = float(np.max(p / t)) - inp.unit_cost
    multiplier = optimize.bisect(lambda lam: interior(lam).sum() - budget, 0.0, upper,
                                 xtol=inp.tolerance * 1e-3, rtol=4 * np.finfo(float).eps,
                                 maxiter=BISECTION_MAX_ITERATIONS)
    contribution = interior(multiplier)
    spent = contribution.sum()
    if spent > budget:
        contribution *= budget / spent
    row[contested] = contribution
    logging.debug(f"Budget binds: multiplier={multiplier:.9g}, row={row}")
    return BestResponse(row, float(multiplier), True)


def projected_gradient_oracle(inp: BestResponseInput, step=1.0, iterations=20000, memory=10):
    """
    Spectral projected gradient ascent on the follower's utility over
    {r >= 0, sum(r) <= R}, with a non-monotone Armijo line search.
    Independent of the closed form; only valid when every opponents' total is positive.
    """
    if np.any(inp.opponents_totals <= 0):
        raise ValueError("projected_gradient_oracle needs every opponents_total > 0")

    def project(point):
        return project_onto_capped_simplex(point, inp.capacity)

    x = project(np.full_like(inp.payments, inp.capacity / (2 * len(inp.payments))))
    g = inp.gradient(x)
    history = [inp.utility(x)]
    alpha = step
    norm = np.inf

    for k in range(iterations):
        norm = float(np.max(np.abs(project(x + g) - x)))
        if norm <= ORACLE_GRADIENT_MAPPING_TOLERANCE:
            return OracleResult(x, True, k, norm)

        d = project(x + alpha * g) - x
        reference = max(history[-memory:])
        slope = float(g @ d)
        t = 1.0
        while inp.utility(x + t * d) < reference + 1e-4 * t * slope and t > 1e-20:
            t *= 0.5

        x_new = x + t * d
        g_new = inp.gradient(x_new)
        s, y = x_new - x, g_new - g
        curvature = -float(s @ y)
        alpha = step if curvature <= 0 else float(np.clip(s @ s / curvature, 1e-10, 1e10))
        x, g = x_new, g_new
        history.append(inp.utility(x))

    logging.warning(f"Projected gradient oracle stopped after {iterations} iterations "
                    f"(gradient mapping {norm:.3g})")
    return OracleResult(x, False, iterations, norm)
