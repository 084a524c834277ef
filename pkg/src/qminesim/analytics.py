"""Closed-form synchronous-model formulas and double-spend thresholds.

These are the analytic companions to the simulator: the stale rate of a
network of n synchronized miners that all run for t minutes and measure
together, parameterized by the expected block interval I (Bitcoin's 10
minutes by default, shorter for desk-scale runs — the formulas are scale
free in t/I). They double as the oracle for the simulator's acceptance
tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SyncModelParams:
    """Run time t and target block interval of the synchronous model."""

    t: float  # minutes spent per mining run
    block_interval: float = 10.0

    def __post_init__(self):
        if self.block_interval <= 0.0:
            raise ValueError(
                f"block_interval must be > 0, got {self.block_interval}"
            )
        if not 0.0 < self.t < self.block_interval:
            raise ValueError(
                f"t must satisfy 0 < t < block_interval, got t={self.t}, "
                f"block_interval={self.block_interval}"
            )


def lambda_of_t(p: SyncModelParams) -> float:
    """Expected number of successful miners per synchronized run."""
    return math.log(p.block_interval / (p.block_interval - p.t))


def extension_probability(p: SyncModelParams) -> float:
    """Probability that at least one miner succeeds in a run, 1 - e^-lambda.

    By the calibration of lambda this equals t/I identically; the assertion
    guards the two formulas against drifting apart.
    """
    val = 1.0 - math.exp(-lambda_of_t(p))
    assert abs(val - p.t / p.block_interval) < 1e-12
    return val


def analytic_stale_rate(p: SyncModelParams) -> float:
    """Fraction of mined blocks that end up outside the longest chain.

    1 - (t/I) / lambda(t): the chain grows by one block per run with at
    least one success, while every success mints a block.
    """
    return 1.0 - p.t / (p.block_interval * lambda_of_t(p))


def blocks_per_minute(p: SyncModelParams) -> float:
    """Total block production rate lambda(t)/t; tends to 1/I as t -> 0."""
    return lambda_of_t(p) / p.t


def double_spend_threshold(p_stale: float) -> float:
    """Minimum relative hash power for a guaranteed private-chain double spend.

    An attacker mining a fork-free private chain beats the honest side, which
    wastes a p_stale fraction of its power on stale blocks, as soon as
    q > (1 - p_stale) * (1 - q), i.e. q > (1 - p_stale) / (2 - p_stale).
    """
    if not 0.0 <= p_stale < 1.0:
        raise ValueError(f"p_stale must be in [0, 1), got {p_stale}")
    return (1.0 - p_stale) / (2.0 - p_stale)


def classical_fork_probability(n: int, p_success: float) -> float:
    """Upper bound on a same-round classical fork: min(1, n * p_success).

    With the network calibrated so n * p_success * h = 1/I, this equals
    1/(I*h), vanishingly small for realistic hash rates h.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p_success <= 1.0:
        raise ValueError(f"p_success must be in [0, 1], got {p_success}")
    return min(1.0, n * p_success)
