"""Intrinsic node identifiers, bit-compatible with Git object hashing.

A node identifier is the SHA-1 of the Git object serialization of the
artifact: blobs for file contents, trees for directories.  The textual
rendering is the ``swh:1:cnt:...`` / ``swh:1:dir:...`` identifier form, so
any knowledge base speaking that format can answer membership queries about
nodes we compute locally.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class NodeKind(Enum):
    """The two artifact kinds handled by the scanner."""

    CONTENT = "cnt"
    DIRECTORY = "dir"


class EntryMode(Enum):
    """Git tree-entry modes; anything else is discarded before hashing."""

    REGULAR = b"100644"
    EXECUTABLE = b"100755"
    SYMLINK = b"120000"
    DIRECTORY = b"40000"


_KIND_BY_TAG = {kind.value: kind for kind in NodeKind}
_HEX_RE = re.compile(r"[0-9a-f]{40}\Z")


class SwhidError(ValueError):
    """Malformed identifier string; ``component`` names the offending part."""

    def __init__(self, message: str, component: str):
        super().__init__(message)
        self.component = component


class DuplicateEntryError(ValueError):
    """Two directory entries collide under Git's ordering key.

    The key is the entry name with ``/`` appended for directories, so a
    file and a subdirectory may legitimately share a name (Git serializes
    both), while two files or two subdirectories may not.
    """


@dataclass(frozen=True)
class NodeId:
    """A typed Merkle node label: artifact kind plus 20-byte SHA-1 digest."""

    kind: NodeKind
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 20:
            raise ValueError(f"digest must be 20 bytes, got {len(self.digest)}")

    @property
    def hex(self) -> str:
        return self.digest.hex()

    def __str__(self) -> str:
        return render_swhid(self)

    def __repr__(self) -> str:
        return f"NodeId({render_swhid(self)!r})"


@dataclass(frozen=True)
class DirEntry:
    """One named edge from a directory to a child node.

    Names are raw bytes: filesystem names need not be valid UTF-8 and Git
    hashes them verbatim.
    """

    name: bytes
    target: NodeId
    perm: EntryMode

    def __post_init__(self):
        if not self.name:
            raise ValueError("entry name must be nonempty")
        if b"\x00" in self.name or b"/" in self.name:
            raise ValueError(f"entry name contains NUL or slash: {self.name!r}")
        is_dir_perm = self.perm is EntryMode.DIRECTORY
        is_dir_target = self.target.kind is NodeKind.DIRECTORY
        if is_dir_perm != is_dir_target:
            raise ValueError(
                f"perm {self.perm.name} inconsistent with target kind "
                f"{self.target.kind.name} for entry {self.name!r}"
            )

    def sort_key(self) -> bytes:
        # Git compares directory names as if suffixed by "/".
        if self.perm is EntryMode.DIRECTORY:
            return self.name + b"/"
        return self.name


def _object_id(obj_type: bytes, payload: bytes) -> bytes:
    header = obj_type + b" " + str(len(payload)).encode("ascii") + b"\x00"
    return hashlib.sha1(header + payload).digest()


def blob_id(content: bytes) -> NodeId:
    """Identifier of a file with the given bytes (Git blob hashing)."""
    return NodeId(NodeKind.CONTENT, _object_id(b"blob", content))


def dir_id(entries: Iterable[DirEntry]) -> NodeId:
    """Identifier of a directory with the given entries (Git tree hashing).

    Entries are serialized in canonical Git order, so the result does not
    depend on the order in which entries are supplied.

    Raises:
        DuplicateEntryError: two entries share a name.
    """
    ordered = sorted(entries, key=DirEntry.sort_key)
    seen: set[bytes] = set()
    chunks: list[bytes] = []
    for entry in ordered:
        key = entry.sort_key()
        if key in seen:
            raise DuplicateEntryError(f"duplicate entry name {entry.name!r}")
        seen.add(key)
        chunks.append(entry.perm.value + b" " + entry.name + b"\x00" + entry.target.digest)
    return NodeId(NodeKind.DIRECTORY, _object_id(b"tree", b"".join(chunks)))


def render_swhid(node_id: NodeId) -> str:
    """Textual form ``swh:1:<kind>:<40 hex>``."""
    return f"swh:1:{node_id.kind.value}:{node_id.digest.hex()}"


def parse_swhid(s: str) -> NodeId:
    """Parse a ``swh:1:(cnt|dir):<40 lowercase hex>`` identifier.

    Anything else is rejected, including the revision/release/snapshot/origin
    kinds this scanner does not handle.

    Raises:
        SwhidError: with ``component`` set to the part that failed
            (scheme, version, kind, or digest).
    """
    parts = s.split(":", 3)
    if len(parts) != 4:
        missing = ("scheme", "version", "kind", "digest")[len(parts)]
        raise SwhidError(f"not a SWHID ({missing} part missing): {s!r}", missing)
    scheme, version, kind_tag, digest_hex = parts
    if scheme != "swh":
        raise SwhidError(f"bad scheme {scheme!r} (expected 'swh')", "scheme")
    if version != "1":
        raise SwhidError(f"unsupported version {version!r} (expected '1')", "version")
    kind = _KIND_BY_TAG.get(kind_tag)
    if kind is None:
        raise SwhidError(f"unsupported kind {kind_tag!r} (expected 'cnt' or 'dir')", "kind")
    if not _HEX_RE.match(digest_hex):
        raise SwhidError(
            f"digest malformed (expected 40 lowercase hex chars): {digest_hex!r}", "digest"
        )
    return NodeId(kind, bytes.fromhex(digest_hex))
