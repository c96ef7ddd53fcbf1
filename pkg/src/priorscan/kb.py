"""Knowledge-base abstraction: a membership oracle over node identifiers.

The file format is deliberately plain: UTF-8 text, one identifier per line,
newline terminated, sorted on save.  Any tool can produce or diff it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .ids import NodeId, SwhidError, parse_swhid, render_swhid


class KbError(Exception):
    """Base class for knowledge-base failures."""


class KbFormatError(KbError):
    """A KB file contains a line that is not a valid identifier."""

    def __init__(self, message: str, line_no: int):
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class KbSet:
    """An explicit set of known identifiers."""

    ids: frozenset[NodeId]
    label: str = ""

    def __contains__(self, node_id: NodeId) -> bool:
        return node_id in self.ids

    def __len__(self) -> int:
        return len(self.ids)


def _dedupe(ids: Iterable[NodeId]) -> list[NodeId]:
    return list(dict.fromkeys(ids))


class KbBackend:
    """Batch membership lookups with a per-backend lookup counter.

    The counter counts distinct identifiers queried, not round trips, and is
    safe to update from concurrent callers.  Subclasses implement
    :meth:`_query` over an already-deduplicated batch.
    """

    label: str = ""

    def __init__(self):
        self._lookups = 0
        self._lock = threading.Lock()

    @property
    def lookups(self) -> int:
        return self._lookups

    def knows(self, ids: Iterable[NodeId]) -> dict[NodeId, bool]:
        """Answer membership for each distinct id in ``ids``."""
        distinct = _dedupe(ids)
        if not distinct:
            return {}
        answers = self._query(distinct)
        with self._lock:
            self._lookups += len(distinct)
        return answers

    def _query(self, ids: Sequence[NodeId]) -> dict[NodeId, bool]:
        raise NotImplementedError


class InMemoryKb(KbBackend):
    """Backend over an in-process :class:`KbSet`."""

    def __init__(self, kb: KbSet):
        super().__init__()
        self.kb = kb
        self.label = kb.label

    def _query(self, ids: Sequence[NodeId]) -> dict[NodeId, bool]:
        return {node_id: node_id in self.kb.ids for node_id in ids}


def load_kb_file(path: str | Path) -> KbSet:
    """Parse a newline-delimited identifier file into a KbSet.

    Duplicate lines are tolerated (set semantics); any malformed line aborts
    with its line number.  The label is taken from the file name stem.
    """
    path = Path(path)
    ids: set[NodeId] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.rstrip("\n")
            try:
                ids.add(parse_swhid(text))
            except SwhidError as exc:
                raise KbFormatError(
                    f"{path}:{line_no}: invalid identifier {text!r}: {exc}", line_no
                ) from exc
    return KbSet(ids=frozenset(ids), label=path.stem)


def save_kb_file(kb: KbSet, path: str | Path) -> None:
    """Write the canonical format: sorted, one identifier per line."""
    lines = sorted(render_swhid(node_id) for node_id in kb.ids)
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")
