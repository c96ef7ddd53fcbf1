"""Render scan partitions as JSON or annotated text listings.

The JSON report carries one key per scanned path, directories with a
trailing ``/``, each mapped to ``{"known": bool, "swhid": "..."}``.  The
rendering is lossless: :func:`partition_from_report` rebuilds the exact
partition from a parsed report.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Mapping

from .discovery import Partition
from .ids import NodeId, parse_swhid, render_swhid
from .tree import MerkleNode, SourceTree, visit_subtree


@dataclass(frozen=True)
class ReportEntry:
    path: str
    known: bool
    swhid: str


def _node_key(node: MerkleNode, prefix: str) -> str:
    if node.path == ".":
        key = prefix if prefix else "./"
    elif prefix:
        key = prefix + node.path
    else:
        key = node.path
    if node.is_dir and not key.endswith("/"):
        key += "/"
    return key


def _root_prefix(tree: SourceTree, relative: bool) -> str:
    if relative:
        return ""
    return os.path.abspath(tree.root_path).rstrip("/") + "/"


def report_entries(partition: Partition, tree: SourceTree,
                   relative: bool = False) -> list[ReportEntry]:
    """One entry per scanned path, sorted by path."""
    prefix = _root_prefix(tree, relative)
    entries = [
        ReportEntry(
            path=_node_key(node, prefix),
            known=partition.by_id[node.id],
            swhid=render_swhid(node.id),
        )
        for node in visit_subtree(tree.root)
    ]
    entries.sort(key=lambda entry: entry.path)
    return entries


def report_dict(partition: Partition, tree: SourceTree,
                relative: bool = False) -> dict[str, dict[str, object]]:
    return {
        entry.path: {"known": entry.known, "swhid": entry.swhid}
        for entry in report_entries(partition, tree, relative)
    }


def render_json(partition: Partition, tree: SourceTree,
                relative: bool = False) -> str:
    """Stable JSON report: sorted keys, one per path, dirs with trailing /."""
    return json.dumps(report_dict(partition, tree, relative),
                      indent=2, sort_keys=True)


def partition_from_report(report: Mapping[str, Mapping[str, object]],
                          root: str | None = None) -> Partition:
    """Rebuild a :class:`Partition` from a parsed JSON report.

    ``root`` is the scanned root path when known; otherwise it is inferred
    from the shortest directory key.
    """
    if not report:
        raise ValueError("empty report")
    dir_keys = [key for key in report if key.endswith("/")]
    if not dir_keys:
        raise ValueError("report has no directory entry (missing root?)")
    root_key = min(dir_keys, key=len) if root is None \
        else (root.rstrip("/") + "/" if root not in (".", "./") else "./")
    prefix = "" if root_key == "./" else root_key
    known: set[str] = set()
    unknown: set[str] = set()
    by_id: dict[NodeId, bool] = {}
    for key, value in report.items():
        if key == root_key:
            path = "."
        elif prefix and key.startswith(prefix):
            path = key[len(prefix):].rstrip("/")
        elif not prefix and not key.startswith("/"):
            path = key.rstrip("/")
        else:
            raise ValueError(f"report key {key!r} is outside root {root_key!r}")
        node_id = parse_swhid(str(value["swhid"]))
        status = value["known"]
        if not isinstance(status, bool):
            raise ValueError(f"non-boolean status for {key!r}")
        if by_id.setdefault(node_id, status) is not status:
            raise ValueError(f"conflicting statuses for {node_id}")
        (known if status else unknown).add(path)
    return Partition(known=frozenset(known), unknown=frozenset(unknown),
                     by_id=by_id)


def render_text(partition: Partition, tree: SourceTree,
                collapse: bool = False) -> str:
    """Recursive-ls style listing with a known/unknown marker per line.

    With ``collapse``, a directory whose whole subtree shares one status is
    printed as a single line and its contents are skipped.
    """
    uniform_cache: dict[NodeId, bool] = {}

    def subtree_uniform(node: MerkleNode) -> bool:
        cached = uniform_cache.get(node.id)
        if cached is not None:
            return cached
        status = partition.by_id[node.id]
        result = all(
            partition.by_id[child.id] is status and
            (not child.is_dir or subtree_uniform(child))
            for child in node.children
        )
        uniform_cache[node.id] = result
        return result

    lines: list[str] = []

    def emit(node: MerkleNode, depth: int, label: str) -> None:
        marker = "known" if partition.by_id[node.id] else "unknown"
        suffix = "/" if node.is_dir else ""
        lines.append(f"{'    ' * depth}{label}{suffix} [{marker}]")
        if node.is_dir and not (collapse and subtree_uniform(node)):
            for child in node.children:
                emit(child, depth + 1, os.fsdecode(child.name))

    emit(tree.root, 0, tree.root_path.rstrip("/") or "/")
    return "\n".join(lines) + "\n"
