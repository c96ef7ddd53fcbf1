"""Filesystem walker that models a code base as an in-memory Merkle tree.

The walk is bottom-up: every file hashes to its blob identifier, every
directory to the tree identifier of its canonical entry list, so the root
identifier commits to the entire content of the scanned code base.
"""

from __future__ import annotations

import fnmatch
import os
import stat
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .ids import DirEntry, EntryMode, NodeId, NodeKind, blob_id, dir_id

#: VCS bookkeeping directories skipped by default; their contents are not
#: source artifacts and would never match a knowledge-base directory hash.
VCS_DIRS = {b".git", b".hg", b".svn"}


class ScanError(Exception):
    """The scan root itself cannot be read."""


@dataclass(frozen=True)
class ScanWarning:
    """A per-path problem that was skipped without aborting the scan."""

    path: str
    message: str


@dataclass(frozen=True)
class ScanConfig:
    exclude_patterns: tuple[str, ...] = ()
    follow_symlinks: bool = False
    max_depth: int | None = None

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive")


@dataclass(frozen=True)
class MerkleNode:
    """One occurrence of an artifact in the scanned tree.

    ``path`` is the POSIX-style path relative to the scan root ("." for the
    root itself).  ``children`` is empty for content nodes and kept in
    canonical hashing order for directories.
    """

    id: NodeId
    name: bytes
    path: str
    perm: EntryMode
    children: tuple["MerkleNode", ...] = ()
    size_bytes: int | None = None

    @property
    def kind(self) -> NodeKind:
        return self.id.kind

    @property
    def is_dir(self) -> bool:
        return self.id.kind is NodeKind.DIRECTORY


@dataclass(frozen=True)
class SourceTree:
    """A built Merkle model plus its deduplication index.

    ``node_index`` maps each distinct identifier to every path where it
    occurs; ``file_count + dir_count`` counts occurrences, so duplicated
    subtrees are counted once per path.
    """

    root: MerkleNode
    root_path: str
    node_index: dict[NodeId, frozenset[str]]
    file_count: int
    dir_count: int
    warnings: tuple[ScanWarning, ...] = ()

    @property
    def size(self) -> int:
        return self.file_count + self.dir_count

    @property
    def distinct_node_count(self) -> int:
        return len(self.node_index)

    def node_at(self, path: str) -> MerkleNode:
        if path in ("", "."):
            return self.root
        node = self.root
        prefix = ""
        for part in path.split("/"):
            prefix = part if not prefix else f"{prefix}/{part}"
            for child in node.children:
                if child.path == prefix:
                    node = child
                    break
            else:
                raise KeyError(path)
        return node


def children(node: MerkleNode) -> tuple[MerkleNode, ...]:
    """Direct (non-recursive) descendants; empty for content nodes."""
    return node.children


def visit_subtree(node: MerkleNode) -> Iterator[MerkleNode]:
    """Yield ``node`` and every recursive descendant, once per occurrence.

    Order is depth-first preorder, which is deterministic for a given build.
    """
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


def tree_from_root(root: MerkleNode, root_path: str = ".",
                   warnings: tuple[ScanWarning, ...] = ()) -> SourceTree:
    """Index an already-assembled node tree into a SourceTree."""
    index: dict[NodeId, set[str]] = {}
    file_count = dir_count = 0
    for node in visit_subtree(root):
        index.setdefault(node.id, set()).add(node.path)
        if node.is_dir:
            dir_count += 1
        else:
            file_count += 1
    return SourceTree(
        root=root,
        root_path=root_path,
        node_index={nid: frozenset(paths) for nid, paths in index.items()},
        file_count=file_count,
        dir_count=dir_count,
        warnings=warnings,
    )


def _matches_exclude(rel_path: str, name: str, patterns: tuple[str, ...]) -> bool:
    for pattern in patterns:
        if fnmatch.fnmatchcase(name, pattern) or fnmatch.fnmatchcase(rel_path, pattern):
            return True
    return False


class _Walker:
    def __init__(self, config: ScanConfig):
        self.config = config
        self.warnings: list[ScanWarning] = []

    def warn(self, path: str, message: str) -> None:
        self.warnings.append(ScanWarning(path=path, message=message))

    def walk_dir(self, dir_path: Path, rel_path: str, name: bytes, depth: int,
                 ancestors: frozenset[tuple[int, int]]) -> MerkleNode:
        entries: list[tuple[DirEntry, MerkleNode]] = []
        try:
            listing = sorted(os.scandir(dir_path), key=lambda e: os.fsencode(e.name))
        except OSError as exc:
            raise ScanError(f"cannot read directory {dir_path}: {exc}") from exc

        for entry in listing:
            child = self.visit_entry(entry, rel_path, depth, ancestors)
            if child is not None:
                entries.append(child)

        entries.sort(key=lambda pair: pair[0].sort_key())
        node_id = dir_id(pair[0] for pair in entries)
        return MerkleNode(
            id=node_id,
            name=name,
            path=rel_path,
            perm=EntryMode.DIRECTORY,
            children=tuple(pair[1] for pair in entries),
        )

    def visit_entry(self, entry: os.DirEntry, parent_rel: str, depth: int,
                    ancestors: frozenset[tuple[int, int]]) -> tuple[DirEntry, MerkleNode] | None:
        name = os.fsencode(entry.name)
        rel = entry.name if parent_rel == "." else f"{parent_rel}/{entry.name}"
        cfg = self.config

        try:
            is_symlink = entry.is_symlink()
            is_dir = entry.is_dir(follow_symlinks=cfg.follow_symlinks)
        except OSError as exc:
            self.warn(rel, f"cannot stat: {exc}")
            return None

        if is_dir and name in VCS_DIRS:
            return None
        if _matches_exclude(rel, entry.name, cfg.exclude_patterns):
            return None

        if is_symlink and not cfg.follow_symlinks:
            return self.symlink_entry(entry, name, rel)

        if is_dir:
            if cfg.max_depth is not None and depth >= cfg.max_depth:
                self.warn(rel, "beyond max depth, skipped")
                return None
            try:
                st = entry.stat(follow_symlinks=True)
            except OSError as exc:
                self.warn(rel, f"cannot stat: {exc}")
                return None
            key = (st.st_dev, st.st_ino)
            if key in ancestors:
                self.warn(rel, "symlink cycle, skipped")
                return None
            try:
                node = self.walk_dir(Path(entry.path), rel, name, depth + 1,
                                     ancestors | {key})
            except ScanError as exc:
                self.warn(rel, str(exc))
                return None
            return DirEntry(name, node.id, EntryMode.DIRECTORY), node

        try:
            st = entry.stat(follow_symlinks=cfg.follow_symlinks)
        except OSError as exc:
            self.warn(rel, f"cannot stat: {exc}")
            return None
        if not stat.S_ISREG(st.st_mode):
            self.warn(rel, "not a regular file, skipped")
            return None

        try:
            with open(entry.path, "rb") as fh:
                content = fh.read()
        except OSError as exc:
            self.warn(rel, f"cannot read: {exc}")
            return None

        perm = EntryMode.EXECUTABLE if st.st_mode & stat.S_IXUSR else EntryMode.REGULAR
        node = MerkleNode(
            id=blob_id(content),
            name=name,
            path=rel,
            perm=perm,
            size_bytes=len(content),
        )
        return DirEntry(name, node.id, perm), node

    def symlink_entry(self, entry: os.DirEntry, name: bytes,
                      rel: str) -> tuple[DirEntry, MerkleNode] | None:
        # Git stores a symlink as a blob whose bytes are the link target.
        try:
            target = os.fsencode(os.readlink(entry.path))
        except OSError as exc:
            self.warn(rel, f"cannot read link: {exc}")
            return None
        node = MerkleNode(
            id=blob_id(target),
            name=name,
            path=rel,
            perm=EntryMode.SYMLINK,
            size_bytes=len(target),
        )
        return DirEntry(name, node.id, EntryMode.SYMLINK), node


def build_tree(root_path: str | Path, config: ScanConfig | None = None) -> SourceTree:
    """Walk ``root_path`` bottom-up and return its Merkle model.

    Every node identifier equals the hash Git would assign to the same
    content or tree.  Symlinks become content nodes holding the link target
    (unless ``follow_symlinks``); sockets, FIFOs and devices are skipped with
    a warning; empty directories are kept and hash to the empty-tree id.

    Raises:
        ScanError: the root itself does not exist or cannot be read.
        Problems below the root are recorded in ``SourceTree.warnings`` and
        the affected entries skipped.
    """
    config = config or ScanConfig()
    root = Path(root_path)
    if not root.is_dir():
        raise ScanError(f"scan root is not a readable directory: {root}")

    walker = _Walker(config)
    try:
        st = root.stat()
        root_node = walker.walk_dir(root, ".", b"", 0, frozenset({(st.st_dev, st.st_ino)}))
    except OSError as exc:
        raise ScanError(f"cannot scan {root}: {exc}") from exc

    return tree_from_root(root_node, root_path=str(root), warnings=tuple(walker.warnings))
