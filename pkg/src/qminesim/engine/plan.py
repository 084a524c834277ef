"""Flattened per-replication inputs and raw outputs shared by both kernels.

A ReplicationPlan is everything one replication needs, reduced to plain
arrays so the compiled core can consume it without touching Python objects
in the hot loop. Both kernels derive per-miner PCG64 substreams from
plan.seed via SeedSequence.spawn, and draw only uniform doubles from them,
so their event traces are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# event kinds
RUN_COMPLETE = 0
BLOCK_ARRIVAL = 1
CLASSICAL_FIND = 2

# delay models
DELAY_ZERO = 0
DELAY_CONSTANT = 1
DELAY_PER_EDGE = 2


class EventQueueOverflow(RuntimeError):
    """Scheduled event count exceeded the configured cap (runaway config)."""


@dataclass
class ReplicationPlan:
    n: int
    t_iteration: float  # minutes per Grover iteration
    strategy: np.ndarray  # int64[n], strategy.StrategyKind values
    theta: np.ndarray  # float64[n], effective per-iteration angle
    q_lo: np.ndarray  # int64[n], committed-iteration range (inclusive)
    q_hi: np.ndarray  # int64[n]
    ts_policy: np.ndarray  # int64[n], strategy.TimestampPolicy values
    classical_rate: np.ndarray  # float64[n], finds per minute
    p_hash: np.ndarray  # float64[n], single pending-hash success prob
    victim: np.ndarray  # int64[n], -1 when not MALLORY
    mallory_offset: np.ndarray  # float64[n] minutes
    mallory_delay: np.ndarray  # float64[n] minutes, deterministic find time
    mallory_stochastic: np.ndarray  # uint8[n]
    delay_kind: int
    delay_const: float
    delay_matrix: np.ndarray | None  # float64[n, n], zero diagonal
    rule: int  # tiebreak.TieBreakRule value
    aggressive_on_tie: bool
    restart_delay: float
    horizon_time: float  # minutes; inf when unbounded
    horizon_blocks: int  # main-chain target; 0 when unbounded
    event_cap: int
    seed: int
    record_arrivals: bool = False  # python kernel only, for causality tests


@dataclass
class RawResult:
    """Raw per-replication output; index 0 of the block arrays is genesis."""

    parent: np.ndarray  # int64[B]
    miner: np.ndarray  # int64[B]
    height: np.ndarray  # int64[B]
    timestamp: np.ndarray  # float64[B]
    created: np.ndarray  # float64[B]
    reactive: np.ndarray  # uint8[B], emitted from an arrival-triggered measure
    node_tip: np.ndarray  # int64[n], final adopted tip per node
    epoch_hist: dict  # successes per quantum completion epoch -> count
    correlated: int  # blocks created within t_iteration of an arrival
    events: int
    end_time: float
    arrivals: list | None = field(default=None)  # (node, block, time) triples
