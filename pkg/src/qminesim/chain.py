"""Block tree: insertion, longest-chain resolution, and stale-rate accounting.

Blocks are abstract: no transactions, no nonces, no hashing. Proof-of-work
validity is decided by the strategy layer's success draws; here a block is
just (id, parent, miner, committed timestamp, creation time). The structure
is a directed tree rooted at the genesis block.
"""

from __future__ import annotations

from dataclasses import dataclass

GENESIS_ID = 0


class UnknownParentError(KeyError):
    """Inserted block references a parent that is not in the tree."""


class DuplicateBlockError(ValueError):
    """Inserted block reuses an existing id."""


class TipNotLongestError(ValueError):
    """Stale statistics requested for a tip that is not at maximum height."""


@dataclass(frozen=True)
class Block:
    """One block. The timestamp is committed before mining begins and is
    immutable afterwards (frozen dataclass); created_at is when the block
    was actually found."""

    id: int
    parent: int | None  # None only for genesis
    miner: int
    timestamp: float  # minutes
    created_at: float  # minutes
    height: int


@dataclass(frozen=True)
class StaleStats:
    """Block counts excluding genesis and the resulting stale rate."""

    total_blocks: int
    main_chain_blocks: int
    stale_rate: float


class BlockTree:
    """Directed tree of blocks rooted at genesis (id 0, height 0)."""

    def __init__(self):
        genesis = Block(
            id=GENESIS_ID, parent=None, miner=-1, timestamp=0.0,
            created_at=0.0, height=0,
        )
        self.blocks: dict[int, Block] = {GENESIS_ID: genesis}
        self.children: dict[int, list[int]] = {GENESIS_ID: []}
        self.max_height = 0

    def insert(
        self, block_id: int, parent: int, miner: int,
        timestamp: float, created_at: float,
    ) -> Block:
        """Insert a block; its height is computed from the parent."""
        if block_id in self.blocks:
            raise DuplicateBlockError(f"block id {block_id} already in tree")
        if parent not in self.blocks:
            raise UnknownParentError(parent)
        height = self.blocks[parent].height + 1
        block = Block(
            id=block_id, parent=parent, miner=miner,
            timestamp=timestamp, created_at=created_at, height=height,
        )
        self.blocks[block_id] = block
        self.children[block_id] = []
        self.children[parent].append(block_id)
        if height > self.max_height:
            self.max_height = height
        return block

    def longest_tips(self) -> list[int]:
        """All and only the block ids at maximum height, ascending."""
        return sorted(
            b.id for b in self.blocks.values() if b.height == self.max_height
        )

    def path_to_genesis(self, block_id: int) -> list[int]:
        """Ids from block_id down to genesis, inclusive."""
        path = []
        cur = self.blocks[block_id]
        while True:
            path.append(cur.id)
            if cur.parent is None:
                return path
            cur = self.blocks[cur.parent]

    def stale_stats(self, canonical_tip: int) -> StaleStats:
        """Stale rate with the main chain defined by canonical_tip.

        The tip must be a longest tip; main_chain_blocks is then its height
        and every other non-genesis block is stale.
        """
        tip = self.blocks[canonical_tip]
        if tip.height != self.max_height:
            raise TipNotLongestError(
                f"block {canonical_tip} has height {tip.height}, "
                f"max height is {self.max_height}"
            )
        total = len(self.blocks) - 1
        main = tip.height
        rate = 0.0 if total == 0 else (total - main) / total
        return StaleStats(
            total_blocks=total, main_chain_blocks=main, stale_rate=rate
        )


class ReceptionLog:
    """Per-node first-arrival times of blocks, the input to tie-breaking.

    Entries are write-once and may not precede the block's creation time. A
    node's own block counts as received at its creation time.
    """

    def __init__(self, tree: BlockTree):
        self._tree = tree
        self._first: dict[tuple[int, int], float] = {}

    def record(self, node: int, block_id: int, time: float) -> None:
        block = self._tree.blocks[block_id]
        key = (node, block_id)
        if key in self._first:
            raise ValueError(
                f"node {node} already received block {block_id} at "
                f"{self._first[key]}"
            )
        if time < block.created_at:
            raise ValueError(
                f"block {block_id} received at {time} before its creation "
                f"at {block.created_at}"
            )
        self._first[key] = time

    def first_arrival(self, node: int, block_id: int) -> float | None:
        return self._first.get((node, block_id))

    def tip_view(self, node: int, block_id: int):
        """TipView of a block as seen by a node; None if never received."""
        from .tiebreak import TipView

        t = self.first_arrival(node, block_id)
        if t is None:
            return None
        return TipView(
            block_id=block_id,
            timestamp=self._tree.blocks[block_id].timestamp,
            received_at=t,
        )
