"""Construct simulated knowledge bases with controlled coverage.

Starting from the full set of identifiers mined from a corpus, coverage is
degraded by marking a seeded random fraction of the distinct leaves unknown
and then walking the trees backward so every directory containing a removed
leaf becomes unknown too.  That backward propagation is what keeps the
simulated sets Merkle consistent: no surviving directory can contain a
removed descendant.

Sampling uses a single seeded permutation of the distinct leaf identifiers,
prefix-sliced per fraction, so the sets produced for increasing fractions
are nested by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence
import random

from .ids import NodeId, NodeKind, render_swhid
from .kb import KbSet, save_kb_file
from .tree import MerkleNode, SourceTree, visit_subtree


@dataclass(frozen=True)
class CoverageSpec:
    """Fraction of distinct leaf ids to mark unknown, and the sampling seed."""

    unknown_leaf_fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.unknown_leaf_fraction <= 1.0:
            raise ValueError("unknown_leaf_fraction must be within [0, 1]")


def coverage_label(fraction: float) -> str:
    return f"known-{round((1.0 - fraction) * 100)}"


def build_full_kb(trees: Iterable[SourceTree]) -> KbSet:
    """Union of every distinct identifier across the corpus ("known-100")."""
    ids: set[NodeId] = set()
    for tree in trees:
        ids.update(tree.node_index)
    return KbSet(ids=frozenset(ids), label="known-100")


def _distinct_leaf_ids(trees: Sequence[SourceTree]) -> list[NodeId]:
    leaves: set[NodeId] = set()
    for tree in trees:
        for node_id in tree.node_index:
            if node_id.kind is NodeKind.CONTENT:
                leaves.add(node_id)
    return sorted(leaves, key=render_swhid)


def _dirs_containing(trees: Sequence[SourceTree], removed: set[NodeId]) -> set[NodeId]:
    tainted: dict[NodeId, bool] = {}

    def taint(node: MerkleNode) -> bool:
        if not node.is_dir:
            return node.id in removed
        cached = tainted.get(node.id)
        if cached is not None:
            return cached
        # Evaluate every child: the visit must reach all directories, not
        # stop at the first tainted sibling.
        result = any([taint(child) for child in node.children])
        tainted[node.id] = result
        return result

    for tree in trees:
        taint(tree.root)
    return {node_id for node_id, hit in tainted.items() if hit}


def degrade_kb(full: KbSet, trees: Sequence[SourceTree], spec: CoverageSpec) -> KbSet:
    """Remove a seeded sample of leaves, then every directory above them.

    The sample is over distinct leaf identifiers (not path occurrences):
    an artifact's status depends only on its content, so removing one
    occurrence while keeping a duplicate would be incoherent.
    """
    leaf_ids = _distinct_leaf_ids(trees)
    perm = list(leaf_ids)
    random.Random(spec.seed).shuffle(perm)
    fraction = spec.unknown_leaf_fraction
    count = len(perm) if fraction >= 1.0 else math.floor(fraction * len(perm))
    removed = set(perm[:count])
    removed_dirs = _dirs_containing(trees, removed) if removed else set()
    kept = full.ids - removed - removed_dirs
    return KbSet(ids=frozenset(kept), label=coverage_label(fraction))


def check_merkle_consistency(kb: KbSet, trees: Iterable[SourceTree]) -> list[tuple[NodeId, NodeId]]:
    """Find (known directory, unknown descendant) pairs; empty means consistent."""
    violations: list[tuple[NodeId, NodeId]] = []
    seen_dirs: set[NodeId] = set()
    for tree in trees:
        for node in visit_subtree(tree.root):
            if not node.is_dir or node.id not in kb.ids or node.id in seen_dirs:
                continue
            seen_dirs.add(node.id)
            missing: set[NodeId] = set()
            for descendant in visit_subtree(node):
                if descendant is node or descendant.id in kb.ids:
                    continue
                if descendant.id not in missing:
                    missing.add(descendant.id)
                    violations.append((node.id, descendant.id))
    return violations


def coverage_ladder(trees: Sequence[SourceTree], fractions: Sequence[float],
                    seed: int = 0) -> list[KbSet]:
    """Degraded KBs for each fraction, nested thanks to the shared seed."""
    full = build_full_kb(trees)
    return [
        degrade_kb(full, trees, CoverageSpec(unknown_leaf_fraction=f, seed=seed))
        for f in fractions
    ]


def write_ladder(trees: Sequence[SourceTree], fractions: Sequence[float],
                 seed: int, out_dir: str | Path) -> list[Path]:
    """Generate the ladder and save one ``<label>.swhids`` file per fraction."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for kb in coverage_ladder(trees, fractions, seed=seed):
        path = out_dir / f"{kb.label}.swhids"
        save_kb_file(kb, path)
        paths.append(path)
    return paths
