"""Miner behavior: quantum peaceful/aggressive, classical counterparts, and
the timestamp-forging attacker.

A quantum miner commits to a template (parent, timestamp) and an iteration
count Q before the run starts; the timestamp cannot change afterwards. On
hearing a competitor's block, a peaceful miner discards the run and restarts
on the new tip, while an aggressive miner measures immediately — the success
probability of the partial run is sin^2((2k+1)*theta) after k of the Q
committed iterations — and broadcasts on success.

Classical miners are modeled at block granularity: each next find is an
exponential draw at the calibrated rate (statistically exact for memoryless
mining). The classical aggressive/peaceful distinction reduces to a single
pending hash, which is negligible by construction.

The functions here are the reference semantics; the event-loop engines
inline the same arithmetic for speed, and the equivalence is pinned by
tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class StrategyKind(enum.IntEnum):
    QUANTUM_PEACEFUL = 0
    QUANTUM_AGGRESSIVE = 1
    CLASSICAL_PEACEFUL = 2
    CLASSICAL_AGGRESSIVE = 3
    MALLORY = 4

    @classmethod
    def from_config(cls, name: str) -> "StrategyKind":
        try:
            return cls[name.upper()]
        except KeyError:
            valid = ", ".join(s.name.lower() for s in cls)
            raise ValueError(
                f"unknown strategy {name!r}; expected one of {valid}"
            ) from None


class TimestampPolicy(enum.IntEnum):
    COMMIT_EXPECTED_FINISH = 0  # timestamp = scheduled measurement time
    COMMIT_START = 1  # timestamp = run start
    MALLORY_OFFSET = 2  # timestamp = victim block timestamp + offset

    @classmethod
    def from_config(cls, name: str) -> "TimestampPolicy":
        aliases = {
            "expected_finish": cls.COMMIT_EXPECTED_FINISH,
            "commit_expected_finish": cls.COMMIT_EXPECTED_FINISH,
            "start": cls.COMMIT_START,
            "commit_start": cls.COMMIT_START,
            "mallory_offset": cls.MALLORY_OFFSET,
        }
        try:
            return aliases[name.lower()]
        except KeyError:
            raise ValueError(
                f"unknown timestamp_policy {name!r}; expected one of "
                f"{', '.join(sorted(set(aliases)))}"
            ) from None


QUANTUM = (StrategyKind.QUANTUM_PEACEFUL, StrategyKind.QUANTUM_AGGRESSIVE)
CLASSICAL = (StrategyKind.CLASSICAL_PEACEFUL, StrategyKind.CLASSICAL_AGGRESSIVE)


@dataclass(frozen=True)
class QDistribution:
    """Distribution of the committed iteration count: a point mass when
    lo == hi, else uniform over the inclusive integer range [lo, hi]."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"invalid Q range [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q: int) -> "QDistribution":
        return cls(q, q)

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "QDistribution":
        return cls(lo, hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def sample(self, rng) -> int:
        """Draw Q. A point mass consumes no randomness, keeping replication
        streams stable across roster edits."""
        if self.lo == self.hi:
            return self.lo
        span = self.hi - self.lo + 1
        return self.lo + min(int(rng.random() * span), span - 1)


@dataclass(frozen=True)
class MinerSpec:
    """Static description of one miner in the roster."""

    miner_id: int
    strategy: StrategyKind
    q_distribution: QDistribution
    timestamp_policy: TimestampPolicy = TimestampPolicy.COMMIT_EXPECTED_FINISH
    target_victim: int | None = None  # MALLORY only
    mallory_offset: float = 1.0 / 60.0  # minutes added to the victim timestamp
    mallory_find_delay: float = 100.0 / 60.0  # minutes (deterministic mode)
    mallory_stochastic: bool = False  # draw the find like a Grover run instead
    p_full_override: float | None = None  # full-run success prob, for scenarios

    def __post_init__(self):
        if self.strategy == StrategyKind.MALLORY:
            if self.target_victim is None:
                raise ValueError("MALLORY requires target_victim")
            if self.timestamp_policy != TimestampPolicy.MALLORY_OFFSET:
                raise ValueError("MALLORY requires the MALLORY_OFFSET policy")
        else:
            if self.timestamp_policy == TimestampPolicy.MALLORY_OFFSET:
                raise ValueError(
                    "MALLORY_OFFSET policy is only valid for MALLORY"
                )
            if self.target_victim is not None:
                raise ValueError("target_victim is only valid for MALLORY")
        if self.p_full_override is not None:
            if not 0.0 <= self.p_full_override <= 1.0:
                raise ValueError(
                    f"p_full_override must be in [0, 1], "
                    f"got {self.p_full_override}"
                )
            if not self.q_distribution.is_point:
                raise ValueError(
                    "p_full_override requires a point-mass Q distribution"
                )


@dataclass
class MinerState:
    """One in-flight mining run. committed_timestamp is fixed here and is the
    only timestamp the run may ever emit."""

    current_parent: int
    run_start: float
    q_committed: int
    committed_timestamp: float

    def iterations_elapsed(self, now: float, t_iteration: float) -> int:
        k = int(math.floor((now - self.run_start) / t_iteration))
        return max(0, min(k, self.q_committed))


class ActionKind(enum.IntEnum):
    DISCARD_AND_RESTART = 0
    MEASURE_NOW = 1


@dataclass(frozen=True)
class Action:
    """Outcome of a state-machine step: what to do, and for measurements,
    whether the collapse produced a valid block."""

    kind: ActionKind
    success: bool | None = None
    emitted_timestamp: float | None = None


def measure_success_probability(k: int, theta: float) -> float:
    """Success probability of measuring after k of the committed iterations."""
    s = math.sin((2 * k + 1) * theta)
    p = s * s
    return min(1.0, max(0.0, p))


def start_run(
    spec: MinerSpec,
    parent: int,
    now: float,
    rng,
    t_iteration: float,
    victim_anchor_timestamp: float | None = None,
    restart_delay: float = 0.0,
) -> MinerState | None:
    """Begin a mining run on the given parent tip.

    Returns None for a MALLORY miner with no observed victim block: she
    stays idle until one arrives. For MALLORY, `parent` should be the
    victim block's parent so her block competes at equal height.
    """
    start = now + restart_delay
    if spec.strategy == StrategyKind.MALLORY:
        if victim_anchor_timestamp is None:
            return None
        q = spec.q_distribution.sample(rng) if spec.mallory_stochastic else 0
        return MinerState(
            current_parent=parent,
            run_start=start,
            q_committed=q,
            committed_timestamp=victim_anchor_timestamp + spec.mallory_offset,
        )
    q = spec.q_distribution.sample(rng)
    if spec.timestamp_policy == TimestampPolicy.COMMIT_EXPECTED_FINISH:
        committed = start + q * t_iteration
    else:  # COMMIT_START
        committed = start
    return MinerState(
        current_parent=parent,
        run_start=start,
        q_committed=q,
        committed_timestamp=committed,
    )


def on_run_complete(spec: MinerSpec, state: MinerState, rng, theta: float) -> bool:
    """Scheduled measurement at the end of the committed run; True iff the
    measurement produced a valid block (always emitted with the committed
    timestamp)."""
    p = measure_success_probability(state.q_committed, theta)
    return rng.random() < p


def on_block_received(
    spec: MinerSpec,
    state: MinerState,
    incoming,
    now: float,
    rng,
    theta: float,
    t_iteration: float,
    p_hash: float = 0.0,
    aggressive_on_tie: bool = True,
    incoming_is_tie: bool = False,
) -> Action:
    """React to a competitor block that extends or ties the known chain.

    Peaceful miners discard and restart; aggressive quantum miners measure
    the partial run (success probability nondecreasing in the elapsed
    iterations), and an aggressive classical miner resolves its one pending
    hash. An emitted block always carries the timestamp committed at
    start_run.
    """
    kind = spec.strategy
    if kind == StrategyKind.QUANTUM_AGGRESSIVE and (
        not incoming_is_tie or aggressive_on_tie
    ):
        k = state.iterations_elapsed(now, t_iteration)
        p = measure_success_probability(k, theta)
        success = rng.random() < p
        return Action(
            kind=ActionKind.MEASURE_NOW,
            success=success,
            emitted_timestamp=state.committed_timestamp if success else None,
        )
    if kind == StrategyKind.CLASSICAL_AGGRESSIVE and not incoming_is_tie:
        success = rng.random() < p_hash
        return Action(
            kind=ActionKind.MEASURE_NOW,
            success=success,
            emitted_timestamp=now if success else None,
        )
    return Action(kind=ActionKind.DISCARD_AND_RESTART)
