"""Pure-Python event-loop kernel.

This is the reference implementation of the replication semantics; the
compiled core in _core.pyx mirrors it statement for statement. Everything
is deterministic given the plan: events are processed in (time, sequence)
order, and all randomness is uniform doubles drawn from per-miner PCG64
substreams spawned from the replication seed.

Node behavior on a block arrival:

* strictly longer chain  -> adopt it; peaceful miners discard and restart,
  aggressive quantum miners measure the partial run first, an aggressive
  classical miner resolves its one pending hash first.
* equal-height tie       -> the node switches tips only when the incoming
  tip strictly improves the rule's minimized quantity (never on equality);
  switching discards the current run. Aggressive quantum miners measure on
  ties too when aggressive_on_tie is set.
* shorter chain          -> recorded, nothing else.

After emitting a block a miner keeps mining on its own block unless a
competing tip strictly beats it under the active rule.
"""

from __future__ import annotations

import math
from heapq import heappop, heappush

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from .plan import (
    BLOCK_ARRIVAL,
    CLASSICAL_FIND,
    DELAY_CONSTANT,
    DELAY_PER_EDGE,
    DELAY_ZERO,
    RUN_COMPLETE,
    EventQueueOverflow,
    RawResult,
    ReplicationPlan,
)

# strategy kinds (strategy.StrategyKind values)
PQMS = 0
AQMS = 1
CPEACE = 2
CAGGR = 3
MALLORY = 4

# timestamp policies
TS_EXPECTED_FINISH = 0
TS_START = 1

# tie-break rules (tiebreak.TieBreakRule values)
FIRST_SEEN = 0
NEW_PENALTY = 1
OLD_PENALTY = 2
UNIFORM_RANDOM = 3

_PRUNE_EVERY = 512


def make_generators(seed: int, n: int) -> list[Generator]:
    """Per-miner substreams; identical construction in both kernels."""
    return [Generator(PCG64(ss)) for ss in SeedSequence(seed).spawn(n)]


def run(plan: ReplicationPlan) -> RawResult:
    n = plan.n
    t_iter = plan.t_iteration
    rule = plan.rule
    aggressive_on_tie = plan.aggressive_on_tie
    restart_delay = plan.restart_delay
    horizon_time = plan.horizon_time
    horizon_blocks = plan.horizon_blocks
    event_cap = plan.event_cap
    delay_kind = plan.delay_kind
    delay_const = plan.delay_const
    dmat = plan.delay_matrix

    strat = plan.strategy.tolist()
    theta = plan.theta.tolist()
    q_lo = plan.q_lo.tolist()
    q_hi = plan.q_hi.tolist()
    policy = plan.ts_policy.tolist()
    c_rate = plan.classical_rate.tolist()
    p_hash = plan.p_hash.tolist()
    victim = plan.victim.tolist()
    m_offset = plan.mallory_offset.tolist()
    m_delay = plan.mallory_delay.tolist()
    m_stoch = plan.mallory_stochastic.tolist()

    rnd = [g.random for g in make_generators(plan.seed, n)]

    # block store; index 0 is genesis
    bparent = [-1]
    bminer = [-1]
    bheight = [0]
    bs = [0.0]
    bcreated = [0.0]
    breactive = [0]
    arr_rows: dict[int, dict[int, float]] = {0: dict.fromkeys(range(n), 0.0)}

    # per-node state
    cur = [0] * n
    local_max = [0] * n
    tips = [[0] for _ in range(n)]
    tmin = [0.0] * n
    token = [0] * n
    mining = [True] * n  # False: Mallory waiting for a victim block
    run_parent = [0] * n
    run_start = [0.0] * n
    run_q = [0] * n
    run_s = [0.0] * n
    last_arr = [-math.inf] * n

    heap: list[tuple] = []
    seq = 0
    events = 0
    now = 0.0
    max_height = 0
    correlated = 0
    epoch_open = False
    epoch_time = 0.0
    epoch_cnt = 0
    epoch_hist: dict[int, int] = {}
    arrivals = [] if plan.record_arrivals else None

    def sched(t, kind, a, b):
        nonlocal seq
        heappush(heap, (t, seq, kind, a, b))
        seq += 1
        if len(heap) > event_cap:
            raise EventQueueOverflow(
                f"event queue exceeded {event_cap} entries"
            )

    def quantity(j, b):
        # minimized quantity of tip b at node j under the active rule
        t = arr_rows[b][j]
        if rule == FIRST_SEEN:
            return t
        if rule == NEW_PENALTY:
            return t + abs(bs[b] - t)
        return abs(tmin[j] - bs[b])  # OLD_PENALTY

    def emit(i, s_commit, parent, reactive):
        nonlocal correlated, max_height
        bid = len(bparent)
        h = bheight[parent] + 1
        bparent.append(parent)
        bminer.append(i)
        bheight.append(h)
        bs.append(s_commit)
        bcreated.append(now)
        breactive.append(reactive)
        arr_rows[bid] = {i: now}
        if now - last_arr[i] <= t_iter:
            correlated += 1
        last_arr[i] = now
        if h > max_height:
            max_height = h
        if delay_kind == DELAY_ZERO:
            for j in range(n):
                if j != i:
                    sched(now, BLOCK_ARRIVAL, j, bid)
        elif delay_kind == DELAY_CONSTANT:
            for j in range(n):
                if j != i:
                    sched(now + delay_const, BLOCK_ARRIVAL, j, bid)
        else:
            for j in range(n):
                if j != i:
                    sched(now + dmat[i, j], BLOCK_ARRIVAL, j, bid)
        if h > local_max[i]:
            local_max[i] = h
            tips[i] = [bid]
            tmin[i] = now
            cur[i] = bid
        elif h == local_max[i]:
            # the miner prefers its own block unless a competitor strictly
            # beats it under the rule (UNIFORM_RANDOM keeps the own block)
            tips[i].append(bid)
            cur[i] = bid
            if rule != UNIFORM_RANDOM:
                best = bid
                best_q = quantity(i, bid)
                for c in tips[i]:
                    if c != bid:
                        qc = quantity(i, c)
                        if qc < best_q:
                            best_q = qc
                            best = c
                if best != bid:
                    cur[i] = best
        if len(bparent) % _PRUNE_EVERY == 0:
            frontier = min(local_max)
            dead = [b for b, _ in arr_rows.items() if bheight[b] < frontier]
            for b in dead:
                del arr_rows[b]
        return bid

    def start_quantum(i):
        st = now + restart_delay
        if q_lo[i] == q_hi[i]:
            qd = q_lo[i]
        else:
            span = q_hi[i] - q_lo[i] + 1
            qd = q_lo[i] + min(int(rnd[i]() * span), span - 1)
        run_parent[i] = cur[i]
        run_start[i] = st
        run_q[i] = qd
        run_s[i] = st + qd * t_iter if policy[i] == TS_EXPECTED_FINISH else st
        token[i] += 1
        sched(st + qd * t_iter, RUN_COMPLETE, i, token[i])

    def start_classical(i):
        run_parent[i] = cur[i]
        token[i] += 1
        dt = -math.log1p(-rnd[i]()) / c_rate[i]
        sched(now + restart_delay + dt, CLASSICAL_FIND, i, token[i])

    def measure(i):
        # collapse the partial run at the elapsed iteration count
        k = int(math.floor((now - run_start[i]) / t_iter))
        if k < 0:
            k = 0
        elif k > run_q[i]:
            k = run_q[i]
        s = math.sin((2 * k + 1) * theta[i])
        return rnd[i]() < s * s

    def tie_eval(j, bid):
        # returns True when node j switched its tip to an equal-height rival
        if rule == UNIFORM_RANDOM:
            lst = tips[j]
            idx = min(int(rnd[j]() * len(lst)), len(lst) - 1)
            choice = lst[idx]
            if choice != cur[j]:
                cur[j] = choice
                return True
            return False
        if quantity(j, bid) < quantity(j, cur[j]):
            cur[j] = bid
            return True
        return False

    # initial runs at t = 0 (Mallory idles until her victim mines)
    for i in range(n):
        st = strat[i]
        if st == PQMS or st == AQMS:
            start_quantum(i)
        elif st == CPEACE or st == CAGGR:
            start_classical(i)
        else:
            mining[i] = False

    while heap:
        now, _, kind, a, b = heappop(heap)
        if now > horizon_time:
            break
        events += 1

        if kind == RUN_COMPLETE:
            i = a
            if b != token[i]:
                continue
            if strat[i] == MALLORY:
                if m_stoch[i]:
                    s = math.sin((2 * run_q[i] + 1) * theta[i])
                    success = rnd[i]() < s * s
                else:
                    success = True
                if success:
                    emit(i, run_s[i], run_parent[i], 0)
                    mining[i] = False
                else:
                    # recommit to the same anchor and retry
                    if q_lo[i] == q_hi[i]:
                        qd = q_lo[i]
                    else:
                        span = q_hi[i] - q_lo[i] + 1
                        qd = q_lo[i] + min(int(rnd[i]() * span), span - 1)
                    run_q[i] = qd
                    run_start[i] = now
                    token[i] += 1
                    sched(now + qd * t_iter, RUN_COMPLETE, i, token[i])
                continue
            # scheduled quantum measurement; epoch bookkeeping for the
            # synchronous-limit distribution checks
            if not epoch_open or now != epoch_time:
                if epoch_open:
                    epoch_hist[epoch_cnt] = epoch_hist.get(epoch_cnt, 0) + 1
                epoch_time = now
                epoch_cnt = 0
                epoch_open = True
            s = math.sin((2 * run_q[i] + 1) * theta[i])
            if rnd[i]() < s * s:
                epoch_cnt += 1
                emit(i, run_s[i], run_parent[i], 0)
            start_quantum(i)

        elif kind == BLOCK_ARRIVAL:
            j, bid = a, b
            row = arr_rows.get(bid)
            if row is not None:
                row[j] = now
            if arrivals is not None:
                arrivals.append((j, bid, now))
            last_arr[j] = now
            h = bheight[bid]
            st = strat[j]
            if st == MALLORY:
                if h > local_max[j]:
                    local_max[j] = h
                    tips[j] = [bid]
                    tmin[j] = now
                    cur[j] = bid
                elif h == local_max[j]:
                    tips[j].append(bid)
                if not mining[j] and bminer[bid] == victim[j]:
                    run_parent[j] = bparent[bid]
                    run_s[j] = bs[bid] + m_offset[j]
                    run_start[j] = now
                    mining[j] = True
                    token[j] += 1
                    if m_stoch[j]:
                        if q_lo[j] == q_hi[j]:
                            qd = q_lo[j]
                        else:
                            span = q_hi[j] - q_lo[j] + 1
                            qd = q_lo[j] + min(int(rnd[j]() * span), span - 1)
                        run_q[j] = qd
                        sched(now + qd * t_iter, RUN_COMPLETE, j, token[j])
                    else:
                        run_q[j] = 0
                        sched(now + m_delay[j], RUN_COMPLETE, j, token[j])
                continue
            if h > local_max[j]:
                local_max[j] = h
                tips[j] = [bid]
                tmin[j] = now
                cur[j] = bid
                if st == AQMS:
                    if measure(j):
                        emit(j, run_s[j], run_parent[j], 1)
                    start_quantum(j)
                elif st == PQMS:
                    start_quantum(j)
                elif st == CAGGR:
                    if rnd[j]() < p_hash[j]:
                        emit(j, now, run_parent[j], 1)
                    start_classical(j)
                else:
                    start_classical(j)
            elif h == local_max[j]:
                tips[j].append(bid)
                if st == AQMS and aggressive_on_tie:
                    # the measurement consumes the run either way
                    if measure(j):
                        emit(j, run_s[j], run_parent[j], 1)
                    else:
                        tie_eval(j, bid)
                    start_quantum(j)
                else:
                    if tie_eval(j, bid):
                        if st == PQMS or st == AQMS:
                            start_quantum(j)
                        else:
                            start_classical(j)
            # h < local_max[j]: stale arrival, nothing to do

        else:  # CLASSICAL_FIND
            i = a
            if b != token[i]:
                continue
            emit(i, now, run_parent[i], 0)
            start_classical(i)

        if horizon_blocks and max_height >= horizon_blocks:
            break

    if epoch_open:
        epoch_hist[epoch_cnt] = epoch_hist.get(epoch_cnt, 0) + 1

    return RawResult(
        parent=np.asarray(bparent, dtype=np.int64),
        miner=np.asarray(bminer, dtype=np.int64),
        height=np.asarray(bheight, dtype=np.int64),
        timestamp=np.asarray(bs, dtype=np.float64),
        created=np.asarray(bcreated, dtype=np.float64),
        reactive=np.asarray(breactive, dtype=np.uint8),
        node_tip=np.asarray(cur, dtype=np.int64),
        epoch_hist=epoch_hist,
        correlated=correlated,
        events=events,
        end_time=now,
        arrivals=arrivals,
    )
