"""Fork-choice among equal-height tips.

Four pluggable rules:

* FIRST_SEEN       — current default behavior: lowest first-arrival time.
* NEW_PENALTY      — countermeasure: minimize t_i + |s_i - t_i|, where s_i is
                     the committed timestamp; blocks measured far from their
                     committed time accrue a large penalty.
* OLD_PENALTY      — broken earlier rule: minimize |t_min - s_i|; vulnerable
                     to a timestamp-forging attacker who anchors her
                     timestamp to the victim's arrival time.
* UNIFORM_RANDOM   — uniform draw among the tips (Eyal-Sirer style baseline).

Exact ties in the minimized quantity fall back to the earliest arrival, then
the lowest block id, so the choice is deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class TieBreakRule(enum.IntEnum):
    FIRST_SEEN = 0
    NEW_PENALTY = 1
    OLD_PENALTY = 2
    UNIFORM_RANDOM = 3

    @classmethod
    def from_config(cls, name: str) -> "TieBreakRule":
        try:
            return cls[name.upper()]
        except KeyError:
            valid = ", ".join(r.name.lower() for r in cls)
            raise ValueError(
                f"unknown tie_break_rule {name!r}; expected one of {valid}"
            ) from None


@dataclass(frozen=True)
class TipView:
    """A competing tip as seen by one node: committed timestamp s_i and this
    node's first arrival t_i (a node's own block has t_i = created_at)."""

    block_id: int
    timestamp: float  # s_i, minutes
    received_at: float  # t_i, minutes


def penalty_new(view: TipView) -> float:
    """Countermeasure penalty p_i = t_i + |s_i - t_i|."""
    return view.received_at + abs(view.timestamp - view.received_at)


def penalty_old(view: TipView, t_min: float) -> float:
    """Broken earlier penalty p_i = |t_min - s_i|, with t_min the earliest
    arrival among the competing tips."""
    return abs(t_min - view.timestamp)


def select_tip(rule: TieBreakRule, tips: list[TipView], rng=None) -> int:
    """Choose the tip to mine on among equal-height competitors.

    For UNIFORM_RANDOM, rng is a numpy Generator supplying the draw; the
    other rules are pure functions of the tip views.
    """
    if not tips:
        raise ValueError("empty tip set")
    if rule == TieBreakRule.UNIFORM_RANDOM:
        if rng is None:
            raise ValueError("UNIFORM_RANDOM requires an rng")
        u = rng.random()
        idx = min(int(u * len(tips)), len(tips) - 1)
        return tips[idx].block_id

    if rule == TieBreakRule.FIRST_SEEN:
        def key(v: TipView):
            return (v.received_at, v.block_id)
    elif rule == TieBreakRule.NEW_PENALTY:
        def key(v: TipView):
            return (penalty_new(v), v.received_at, v.block_id)
    elif rule == TieBreakRule.OLD_PENALTY:
        t_min = min(v.received_at for v in tips)

        def key(v: TipView):
            return (penalty_old(v, t_min), v.received_at, v.block_id)
    else:  # pragma: no cover - closed enumeration
        raise ValueError(f"unknown rule {rule!r}")
    return min(tips, key=key).block_id
