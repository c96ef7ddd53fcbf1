import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from priorscan.ids import (DirEntry, DuplicateEntryError, EntryMode, NodeId,
                           NodeKind, SwhidError, blob_id, dir_id, parse_swhid,
                           render_swhid)

EMPTY_BLOB = "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
HELLO_BLOB = "ce013625030ba8dba906f756967f9e9ca394464a"
EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"


def test_blob_id_empty():
    assert blob_id(b"").digest.hex() == EMPTY_BLOB


def test_blob_id_hello():
    assert blob_id(b"hello\n").digest.hex() == HELLO_BLOB


def test_blob_id_matches_git_header_convention():
    payload = b"some bytes\x00with a NUL"
    expected = hashlib.sha1(
        b"blob " + str(len(payload)).encode() + b"\x00" + payload).hexdigest()
    assert blob_id(payload).digest.hex() == expected


def test_empty_dir_id():
    assert dir_id([]).digest.hex() == EMPTY_TREE


def _entry(name: bytes, node: NodeId, perm: EntryMode) -> DirEntry:
    return DirEntry(name=name, target=node, perm=perm)


def test_dir_sort_treats_directory_names_as_slash_suffixed():
    # git orders (file "a", dir "a.b", dir "a") as a, a.b, a/ because
    # directory names compare as if they ended in "/".  Expected id derived
    # from `git mktree` on the same three entries.
    blob = blob_id(b"x")
    subdir = dir_id([_entry(b"f", blob, EntryMode.REGULAR)])
    entries = [
        _entry(b"a", subdir, EntryMode.DIRECTORY),
        _entry(b"a.b", subdir, EntryMode.DIRECTORY),
        _entry(b"a", blob, EntryMode.REGULAR),
    ]
    assert dir_id(entries).digest.hex() == "8ae3d9a2fdb98cd15116e2af37b2e8f3d83013d6"


@pytest.mark.parametrize("perm", [EntryMode.REGULAR, EntryMode.DIRECTORY])
def test_dir_id_rejects_same_name_same_kind(perm):
    if perm is EntryMode.DIRECTORY:
        targets = [dir_id([]), dir_id([_entry(b"f", blob_id(b"x"), EntryMode.REGULAR)])]
    else:
        targets = [blob_id(b"x"), blob_id(b"y")]
    entries = [_entry(b"a", target, perm) for target in targets]
    with pytest.raises(DuplicateEntryError):
        dir_id(entries)


@pytest.mark.parametrize("name", [b"", b"a/b", b"a\x00b"])
def test_entry_rejects_bad_names(name):
    with pytest.raises(ValueError):
        _entry(name, blob_id(b"x"), EntryMode.REGULAR)


def test_entry_perm_must_match_target_kind():
    blob = blob_id(b"x")
    tree = dir_id([])
    with pytest.raises(ValueError):
        _entry(b"a", blob, EntryMode.DIRECTORY)
    with pytest.raises(ValueError):
        _entry(b"a", tree, EntryMode.REGULAR)


def test_node_id_requires_20_byte_digest():
    with pytest.raises(ValueError):
        NodeId(kind=NodeKind.CONTENT, digest=b"\x00" * 19)


SAMPLE_CNT = "swh:1:cnt:814406a35db163080bbf937524d63690861ff750"
SAMPLE_DIR = "swh:1:dir:fcd9987804d26274fee1eb6711fac38036ccaee7"


@pytest.mark.parametrize("text", [SAMPLE_CNT, SAMPLE_DIR])
def test_parse_render_is_byte_identical(text):
    assert render_swhid(parse_swhid(text)) == text


@pytest.mark.parametrize("text,component", [
    ("swh:1:cnt", "digest"),
    ("swh", "version"),
    ("spdx:1:cnt:" + "0" * 40, "scheme"),
    ("swh:2:cnt:" + "0" * 40, "version"),
    ("swh:1:rev:" + "0" * 40, "kind"),
    ("swh:1:rel:" + "0" * 40, "kind"),
    ("swh:1:snp:" + "0" * 40, "kind"),
    ("swh:1:ori:" + "0" * 40, "kind"),
    ("swh:1:cnt:" + "0" * 39, "digest"),
    ("swh:1:cnt:" + "0" * 41, "digest"),
    ("swh:1:cnt:" + "G" * 40, "digest"),
    ("swh:1:cnt:" + "A" * 40, "digest"),  # uppercase hex is not canonical
])
def test_parse_rejects_and_names_offending_component(text, component):
    with pytest.raises(SwhidError) as exc_info:
        parse_swhid(text)
    assert exc_info.value.component == component


@given(st.binary(min_size=20, max_size=20),
       st.sampled_from([NodeKind.CONTENT, NodeKind.DIRECTORY]))
def test_parse_inverts_render(digest, kind):
    node = NodeId(kind=kind, digest=digest)
    assert parse_swhid(render_swhid(node)) == node


@given(st.binary(max_size=128))
def test_render_of_blob_is_wellformed(content):
    text = render_swhid(blob_id(content))
    assert text.startswith("swh:1:cnt:") and len(text) == 50


@given(st.permutations([
    DirEntry(name=b"a", target=blob_id(b"1"), perm=EntryMode.REGULAR),
    DirEntry(name=b"b", target=blob_id(b"2"), perm=EntryMode.EXECUTABLE),
    DirEntry(name=b"c", target=dir_id([]), perm=EntryMode.DIRECTORY),
    DirEntry(name=b"d", target=blob_id(b"t"), perm=EntryMode.SYMLINK),
]))
def test_dir_id_is_order_independent(entries):
    baseline = dir_id(sorted(entries, key=lambda e: e.name))
    assert dir_id(entries) == baseline
