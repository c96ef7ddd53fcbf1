"""Split a scanned tree into previously-published and never-published parts.

The default protocol walks the tree breadth first and stops querying below
any directory the knowledge base already knows: in a complete Merkle
structure a known directory implies every descendant is known, so whole
subtrees can be marked without further lookups.  Alternative orders (files
first, directories first, seeded random) are provided for comparison; on a
Merkle-consistent knowledge base they all produce the same partition.

Lookups are deduplicated per distinct identifier: the status of an artifact
depends only on its content, so occurrences of the same file or directory at
several paths share one answer.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .ids import NodeId, NodeKind
from .kb import KbBackend
from .tree import MerkleNode, SourceTree, visit_subtree

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    LAYERED = "layered"
    BASELINE = "baseline"
    FILE_FIRST = "file_first"
    DIRECTORY_FIRST = "directory_first"
    RANDOM = "random"


@dataclass(frozen=True)
class Partition:
    """The two-way split of all scanned paths; ``by_id`` is per identifier.

    Paths are relative to the scan root ("." for the root itself).  The two
    sets are disjoint and jointly cover every scanned path.
    """

    known: frozenset[str]
    unknown: frozenset[str]
    by_id: Mapping[NodeId, bool]

    def status_of(self, path: str) -> bool:
        if path in self.known:
            return True
        if path in self.unknown:
            return False
        raise KeyError(path)


@dataclass(frozen=True)
class ScanStats:
    lookups: int
    tree_size: int
    elapsed: float
    strategy: str
    kb_label: str


def _partition_from_status(tree: SourceTree, status: Mapping[NodeId, bool]) -> Partition:
    known: set[str] = set()
    unknown: set[str] = set()
    for node_id, paths in tree.node_index.items():
        (known if status[node_id] else unknown).update(paths)
    return Partition(known=frozenset(known), unknown=frozenset(unknown), by_id=dict(status))


def _mark_subtree_known(node: MerkleNode, status: dict[NodeId, bool]) -> None:
    # setdefault keeps any directly-queried answer authoritative.
    for descendant in visit_subtree(node):
        status.setdefault(descendant.id, True)


def _stats(tree: SourceTree, kb: KbBackend, strategy: Strategy,
           lookups: int, elapsed: float) -> ScanStats:
    return ScanStats(
        lookups=lookups,
        tree_size=tree.size,
        elapsed=elapsed,
        strategy=strategy.value,
        kb_label=kb.label,
    )


def layered_discovery(tree: SourceTree, kb: KbBackend) -> tuple[Partition, ScanStats]:
    """Breadth-first discovery with Merkle subtree pruning.

    Each BFS level is submitted as one batch: within a level no node is an
    ancestor of another, so batching loses no pruning opportunity.  Known
    directories mark their whole subtree known locally; unknown directories
    enqueue their children for the next level.
    """
    start = time.perf_counter()
    before = kb.lookups
    status: dict[NodeId, bool] = {}
    frontier: list[MerkleNode] = [tree.root]

    while frontier:
        pending = [node.id for node in frontier if node.id not in status]
        if pending:
            status.update(kb.knows(pending))
        next_frontier: list[MerkleNode] = []
        for node in frontier:
            if status[node.id]:
                if node.is_dir:
                    _mark_subtree_known(node, status)
            elif node.is_dir:
                next_frontier.extend(node.children)
        frontier = next_frontier

    partition = _partition_from_status(tree, status)
    elapsed = time.perf_counter() - start
    return partition, _stats(tree, kb, Strategy.LAYERED, kb.lookups - before, elapsed)


def baseline_discovery(tree: SourceTree, kb: KbBackend) -> tuple[Partition, ScanStats]:
    """Query every distinct node identifier once, with no pruning.

    If the knowledge base turns out not to be Merkle consistent (a known
    directory with an unknown descendant), the raw per-node answers are kept
    and a consistency warning is logged per violating edge.
    """
    start = time.perf_counter()
    before = kb.lookups
    all_ids = [node.id for node in visit_subtree(tree.root)]
    status = dict(kb.knows(all_ids))

    warned: set[tuple[NodeId, NodeId]] = set()
    for node in visit_subtree(tree.root):
        if not node.is_dir or not status[node.id]:
            continue
        for child in node.children:
            if not status[child.id] and (node.id, child.id) not in warned:
                warned.add((node.id, child.id))
                logger.warning(
                    "knowledge base is not Merkle consistent: directory %s is known "
                    "but its entry %s is not", node.id, child.id,
                )

    partition = _partition_from_status(tree, status)
    elapsed = time.perf_counter() - start
    return partition, _stats(tree, kb, Strategy.BASELINE, kb.lookups - before, elapsed)


def _file_first(tree: SourceTree, kb: KbBackend) -> dict[NodeId, bool]:
    # Query every distinct leaf, then resolve directories bottom-up: a
    # directory with an unknown entry must be unknown, one whose entries are
    # all known is known.  The second step matches how the simulated
    # knowledge bases are constructed (leaves decide directory status).
    leaf_ids = [node.id for node in visit_subtree(tree.root) if not node.is_dir]
    status: dict[NodeId, bool] = dict(kb.knows(leaf_ids)) if leaf_ids else {}

    def resolve(node: MerkleNode) -> bool:
        cached = status.get(node.id)
        if cached is not None:
            return cached
        result = all(resolve(child) for child in node.children)
        status[node.id] = result
        return result

    for node in visit_subtree(tree.root):
        if node.is_dir:
            resolve(node)
    return status


def _directory_first(tree: SourceTree, kb: KbBackend) -> dict[NodeId, bool]:
    # Level-order over directories only, pruning below known ones, then one
    # batch for the leaves that remain unresolved.
    status: dict[NodeId, bool] = {}
    frontier = [tree.root] if tree.root.is_dir else []
    pending_leaves: list[MerkleNode] = []
    if not tree.root.is_dir:
        pending_leaves.append(tree.root)

    while frontier:
        pending = [node.id for node in frontier if node.id not in status]
        if pending:
            status.update(kb.knows(pending))
        next_frontier: list[MerkleNode] = []
        for node in frontier:
            if status[node.id]:
                _mark_subtree_known(node, status)
            else:
                for child in node.children:
                    if child.is_dir:
                        next_frontier.append(child)
                    else:
                        pending_leaves.append(child)
        frontier = next_frontier

    unresolved = [node.id for node in pending_leaves if node.id not in status]
    if unresolved:
        status.update(kb.knows(unresolved))
    return status


def _random_order(tree: SourceTree, kb: KbBackend, seed: int) -> dict[NodeId, bool]:
    # Visit occurrences in a seeded shuffle, one lookup at a time, still
    # pruning whole subtrees when a known directory is hit.
    nodes = list(visit_subtree(tree.root))
    random.Random(seed).shuffle(nodes)
    status: dict[NodeId, bool] = {}
    for node in nodes:
        if node.id in status:
            continue
        answer = kb.knows([node.id])[node.id]
        status[node.id] = answer
        if answer and node.is_dir:
            _mark_subtree_known(node, status)
    return status


def strategy_discovery(tree: SourceTree, kb: KbBackend, strategy: Strategy,
                       seed: int = 0) -> tuple[Partition, ScanStats]:
    """Run discovery with a user-selected query order.

    All strategies return the identical partition on any Merkle-consistent
    knowledge base; they differ in how many lookups they spend getting there.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.LAYERED:
        return layered_discovery(tree, kb)
    if strategy is Strategy.BASELINE:
        return baseline_discovery(tree, kb)

    start = time.perf_counter()
    before = kb.lookups
    if strategy is Strategy.FILE_FIRST:
        status = _file_first(tree, kb)
    elif strategy is Strategy.DIRECTORY_FIRST:
        status = _directory_first(tree, kb)
    elif strategy is Strategy.RANDOM:
        status = _random_order(tree, kb, seed)
    else:
        raise ValueError(f"unsupported strategy: {strategy!r}")

    partition = _partition_from_status(tree, status)
    elapsed = time.perf_counter() - start
    return partition, _stats(tree, kb, strategy, kb.lookups - before, elapsed)
