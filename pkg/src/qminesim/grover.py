"""Closed-form success models for quantum (Grover) and classical mining attempts.

The quantum model is the exact amplitude formula sin^2((2q+1)*theta) with
theta = arcsin(sqrt(K/N)); it reduces to the quadratic ~((2q+1)*theta)^2 law
in the small-angle regime and is well defined for partial runs, which is what
an aggressive miner measures mid-run. Calibration back-solves an effective
theta so that one full run of q_total iterations succeeds with a prescribed
probability, instead of fixing K/N from hardware constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CalibrationError(ValueError):
    """Requested block interval is unreachable for the given miner count."""


@dataclass(frozen=True)
class GroverModel:
    """Per-iteration rotation angle and the wall time of one Grover iteration."""

    theta: float  # radians, arcsin(sqrt(K/N))
    t_iteration: float  # minutes per iteration

    def __post_init__(self):
        if not 0.0 < self.theta <= math.pi / 2:
            raise ValueError(f"theta must be in (0, pi/2], got {self.theta}")
        if self.t_iteration <= 0.0:
            raise ValueError(f"t_iteration must be > 0, got {self.t_iteration}")


@dataclass(frozen=True)
class ClassicalModel:
    """Per-hash success probability and hash throughput of a classical miner."""

    p_hash: float  # probability that a single hash attempt wins (= k/N)
    hashes_per_minute: float

    def __post_init__(self):
        if not 0.0 < self.p_hash <= 1.0:
            raise ValueError(f"p_hash must be in (0, 1], got {self.p_hash}")
        if self.hashes_per_minute <= 0.0:
            raise ValueError(
                f"hashes_per_minute must be > 0, got {self.hashes_per_minute}"
            )


@dataclass(frozen=True)
class CalibratedRun:
    """A full mining run: q_total iterations succeeding with probability p_full.

    theta_eff is back-solved so that sin^2((2*q_total+1)*theta_eff) == p_full,
    which also defines the success probability of a run stopped early.
    """

    q_total: int
    p_full: float
    theta_eff: float


def grover_success_probability(q: int, model: GroverModel) -> float:
    """Probability that measuring after q Grover iterations yields a solution.

    Clamped to [0, 1] to guard against floating-point overshoot near the
    sin^2 extrema. Monotone nondecreasing while (2q+1)*theta <= pi/2.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    s = math.sin((2 * q + 1) * model.theta)
    p = s * s
    return min(1.0, max(0.0, p))


def classical_success_probability(q: int, model: ClassicalModel) -> float:
    """Probability that at least one of q independent hash attempts succeeds."""
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    return 1.0 - (1.0 - model.p_hash) ** q


def calibrate(
    n_miners: int, t: float, block_interval: float, t_iteration: float
) -> CalibratedRun:
    """Fix the per-run success probability so the network extends the chain
    once per block_interval in expectation.

    With n_miners running synchronized full runs of t minutes each, the number
    of successes per run is ~Binomial(n, p_full) ~= Poisson(lambda(t)) for
    large n, where lambda(t) = ln(I/(I-t)). p_full = lambda(t)/n delivers that
    expectation exactly.
    """
    if n_miners < 1:
        raise ValueError(f"n_miners must be >= 1, got {n_miners}")
    if t_iteration <= 0.0:
        raise ValueError(f"t_iteration must be > 0, got {t_iteration}")
    if not 0.0 < t < block_interval:
        raise ValueError(
            f"t must satisfy 0 < t < block_interval, got t={t}, "
            f"block_interval={block_interval}"
        )
    q_total = int(round(t / t_iteration))
    lam = math.log(block_interval / (block_interval - t))
    p_full = lam / n_miners
    if p_full > 1.0:
        raise CalibrationError(
            f"per-miner success probability {p_full:.6g} > 1: "
            f"t={t} is too close to block_interval={block_interval} "
            f"for n_miners={n_miners}"
        )
    theta_eff = math.asin(math.sqrt(p_full)) / (2 * q_total + 1)
    return CalibratedRun(q_total=q_total, p_full=p_full, theta_eff=theta_eff)
