import concurrent.futures
import logging
from dataclasses import dataclass

import numpy as np

from shardgame.libs import game_core

ROUNDS_PER_CHUNK = 10_000


@dataclass
class PayoutLedger:
    """Per follower (rows) and shard (columns) payout statistics."""
    expected_tokens: np.ndarray
    simulated_tokens: np.ndarray
    shares_observed: np.ndarray
    relative_error: np.ndarray
    paid_rounds: np.ndarray
    max_conservation_error: float

    @property
    def max_relative_error(self):
        return float(np.max(self.relative_error))


def expected_payouts(allocation, payments):
    allocation = np.asarray(allocation, dtype=float)
    expected = np.zeros_like(allocation)
    totals = allocation.sum(axis=0)
    for n in range(allocation.shape[0]):
        for m in range(allocation.shape[1]):
            expected[n, m] = game_core.shard_payoff(allocation[n, m], max(totals[m] - allocation[n, m], 0.0),
                                                    payments[m])
    return expected


def _simulate_chunk(means, payments, rounds, seed_sequence):
    rng = np.random.default_rng(seed_sequence)
    counts = rng.poisson(means, size=(rounds,) + means.shape)
    return _settle(counts, payments)


def _settle(counts, payments):
    """Split each round's payment in proportion to that round's share counts."""
    totals = counts.sum(axis=1)
    paid = totals > 0
    safe_totals = np.where(paid, totals, 1)
    payouts = counts / safe_totals[:, None, :] * payments
    conservation = np.abs(payouts.sum(axis=1) - payments)[paid]
    worst = float(conservation.max()) if conservation.size else 0.0
    return payouts.sum(axis=0), counts.sum(axis=0), paid.sum(axis=0), worst


def simulate_pay_per_share(allocation, payments, shares_per_unit=10.0, rounds=100_000, seed=0,
                           deterministic=False, workers=1):
    """
    Every round, follower n submits Poisson(shares_per_unit * r_n^m) shares to
    shard m and the shard's payment is split by that round's share counts.
    Rounds without any share in a shard pay nothing there and are not averaged.
    """
    allocation = np.asarray(allocation, dtype=float)
    payments = game_core.as_payments(payments, allocation.shape[1])
    if not shares_per_unit > 0:
        raise ValueError(f"shares_per_unit must be > 0, got {shares_per_unit}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if np.any(allocation < 0):
        raise ValueError("allocation entries must be non-negative")

    means = shares_per_unit * allocation
    expected = expected_payouts(allocation, payments)

    if deterministic:
        payout, shares, paid_rounds, worst = _settle(means[None, :, :], payments)
        payout = payout * rounds
        paid_rounds = paid_rounds * rounds
        shares = shares * rounds
    else:
        chunks = [ROUNDS_PER_CHUNK] * (rounds // ROUNDS_PER_CHUNK)
        if rounds % ROUNDS_PER_CHUNK:
            chunks.append(rounds % ROUNDS_PER_CHUNK)
        streams = np.random.SeedSequence(seed).spawn(len(chunks))
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(lambda job: _simulate_chunk(means, payments, *job), zip(chunks, streams)))

        payout = np.zeros_like(allocation)
        shares = np.zeros(allocation.shape, dtype=np.int64)
        paid_rounds = np.zeros(allocation.shape[1], dtype=np.int64)
        worst = 0.0
        for chunk_payout, chunk_shares, chunk_paid, chunk_worst in partials:
            payout += chunk_payout
            shares += chunk_shares
            paid_rounds += chunk_paid
            worst = max(worst, chunk_worst)

    simulated = np.where(paid_rounds > 0, payout / np.maximum(paid_rounds, 1), 0.0)
    relative_error = np.abs(simulated - expected) / np.maximum(expected, 1e-12)
    logging.debug(f"Pay-per-share simulation over {rounds} rounds: worst relative error "
                  f"{relative_error.max():.3g}")
    return PayoutLedger(expected, simulated, shares, relative_error, paid_rounds, worst)
