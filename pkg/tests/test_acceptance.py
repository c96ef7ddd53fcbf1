"""End-to-end acceptance checks.

Each test exercises one headline guarantee of the scanner and prints a
single PASS/FAIL line (run with ``pytest -s`` to see them).  The checks are
deliberately heavier than the unit tests: randomized corpora, a live HTTP
server, and a six-figure-node tree.
"""

import json
import random
import threading
import time

import pytest

from priorscan import (CoverageSpec, InMemoryKb, KbSet, blob_id,
                       build_full_kb, build_tree, check_merkle_consistency,
                       coverage_label, coverage_ladder, degrade_kb,
                       load_kb_file, parse_swhid, partition_from_report,
                       render_json, render_swhid, save_kb_file,
                       strategy_discovery)
from priorscan.bench import run_grid
from priorscan.discovery import Strategy
from priorscan.ids import NodeKind
from priorscan.remote import HttpKb
from priorscan.server import make_server

from _synth import (DirSpec, FileSpec, materialize, merkle_from_spec,
                    random_spec, tree_hex_ids)

FRACTION_LADDER = tuple(round(i / 10, 1) for i in range(11))


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"\n[acceptance] {name}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"{name}: {detail}"


def _random_trees(count: int, seed: int, **kwargs):
    rng = random.Random(seed)
    return [merkle_from_spec(random_spec(rng, **kwargs)) for _ in range(count)]


def test_01_git_hash_oracle_equivalence(git_oracle, tmp_path):
    """Blob and directory ids match `git hash-object` / `git mktree` exactly,
    both for in-memory construction and for trees built from disk."""
    rng = random.Random(20240901)
    started = time.perf_counter()
    trees = nodes = 0
    for index in range(120):
        spec = random_spec(rng, max_nodes=200)
        expected = git_oracle.tree_ids(spec)
        assert tree_hex_ids(merkle_from_spec(spec)) == expected
        if index % 4 == 0:
            disk_root = tmp_path / f"t{index}"
            disk_root.mkdir()
            materialize(spec, disk_root)
            assert tree_hex_ids(build_tree(disk_root)) == expected
        trees += 1
        nodes += len(expected)
    elapsed = time.perf_counter() - started
    _verdict("git hash oracle equivalence",
             elapsed < 60.0,
             f"{trees} trees / {nodes} nodes matched in {elapsed:.1f}s (limit 60s)")


def test_02_full_kb_needs_single_lookup():
    """Against a KB that already contains the root, layered discovery asks
    one question and marks every path known."""
    checked = 0
    for tree in _random_trees(50, seed=51):
        backend = InMemoryKb(build_full_kb([tree]))
        partition, stats = strategy_discovery(tree, backend, "layered")
        assert stats.lookups == 1
        assert not partition.unknown
        assert len(partition.known) == stats.tree_size
        checked += 1
    _verdict("full-KB single lookup", checked == 50,
             f"{checked} trees, 1 lookup each, all paths known")


def test_03_empty_kb_enumerates_every_distinct_node():
    """Against an empty KB every distinct node id is queried exactly once,
    everything is unknown, and pruning buys nothing over the baseline."""
    checked = 0
    for tree in _random_trees(50, seed=52):
        distinct = len(set(tree.node_index))
        results = {}
        for strategy in ("layered", "baseline"):
            partition, stats = strategy_discovery(
                tree, InMemoryKb(KbSet(ids=frozenset())), strategy)
            results[strategy] = stats.lookups
            assert stats.lookups == distinct
            assert not partition.known
            assert len(partition.unknown) == stats.tree_size
        assert results["layered"] == results["baseline"]
        checked += 1
    _verdict("empty-KB full enumeration", checked == 50,
             f"{checked} trees, lookups == distinct node count, layered == baseline")


def test_04_all_strategies_agree():
    """All query orders produce the same partition on Merkle-consistent KBs,
    and layered never asks more than the baseline."""
    rng = random.Random(53)
    pairs = 0
    for _ in range(100):
        tree = merkle_from_spec(random_spec(rng))
        spec = CoverageSpec(unknown_leaf_fraction=rng.choice(FRACTION_LADDER),
                            seed=rng.randrange(10_000))
        kb_set = degrade_kb(build_full_kb([tree]), [tree], spec)
        outcomes = {}
        for strategy in Strategy:
            partition, stats = strategy_discovery(
                tree, InMemoryKb(kb_set), strategy, seed=7)
            outcomes[strategy] = (partition, stats.lookups)
        reference = outcomes[Strategy.LAYERED][0]
        for strategy, (partition, _) in outcomes.items():
            assert partition.known == reference.known, strategy
            assert partition.unknown == reference.unknown, strategy
            assert partition.by_id == reference.by_id, strategy
        assert outcomes[Strategy.LAYERED][1] <= outcomes[Strategy.BASELINE][1]
        pairs += 1
    _verdict("strategy equivalence", pairs == 100,
             f"{pairs} (tree, KB) pairs, {len(list(Strategy))} strategies agree, "
             "layered <= baseline lookups")


def test_05_simulated_kbs_stay_merkle_consistent():
    """degrade_kb never leaves a known directory above an unknown node."""
    trees = _random_trees(6, seed=54)
    full = build_full_kb(trees)
    checks = 0
    for fraction in FRACTION_LADDER:
        for seed in range(10):
            kb = degrade_kb(full, trees, CoverageSpec(fraction, seed))
            violations = check_merkle_consistency(kb, trees)
            assert violations == [], (fraction, seed, violations[:3])
            checks += 1
    _verdict("simulated KB Merkle consistency", checks == 110,
             f"{checks} degraded KBs (11 fractions x 10 seeds), 0 violations")


def test_06_coverage_ladder_trend():
    """More coverage never costs more lookups: mean lookup fraction is
    non-increasing up the known-0..known-100 ladder, hits exactly 1.0 at
    known-0, and collapses to a single lookup at known-100."""
    started = time.perf_counter()
    rng = random.Random(55)
    trees = [merkle_from_spec(random_spec(rng, allow_empty_dirs=False))
             for _ in range(30)]
    corpus = [(f"tree-{i:02d}", tree) for i, tree in enumerate(trees)]
    ladder = coverage_ladder(trees, FRACTION_LADDER, seed=9)
    grid = run_grid(corpus, ladder, ["layered"], seed=9)
    assert not grid.errors

    by_label = {}
    for record in grid.records:
        by_label.setdefault(record.kb_label, []).append(record)
    labels = [coverage_label(f) for f in FRACTION_LADDER]  # known-100 .. known-0
    assert set(by_label) == set(labels)

    means = {}
    for label, records in by_label.items():
        assert len(records) == 30
        means[label] = sum(r.lookup_fraction for r in records) / len(records)
    ascending_coverage = list(reversed(labels))  # known-0 .. known-100
    for lower, higher in zip(ascending_coverage, ascending_coverage[1:]):
        assert means[higher] <= means[lower], (higher, lower)
    assert all(r.lookup_fraction == 1.0 for r in by_label["known-0"])
    assert all(r.lookups == 1 for r in by_label["known-100"])
    elapsed = time.perf_counter() - started
    _verdict("coverage ladder trend", elapsed < 300.0,
             f"30 trees x {len(labels)} KBs, mean fraction non-increasing, "
             f"endpoints exact, {elapsed:.1f}s (limit 300s)")


def test_07_http_backend_matches_in_memory():
    """A thousand randomized batches (duplicates and unknowns included) get
    identical answers from the in-memory backend and the HTTP backend over a
    live socket."""
    trees = _random_trees(3, seed=56)
    kb_set = degrade_kb(build_full_kb(trees), trees, CoverageSpec(0.4, seed=1))
    known_pool = sorted(build_full_kb(trees).ids, key=render_swhid)
    rng = random.Random(57)

    server = make_server(kb_set, max_batch=200)
    thread = threading.Thread(
        target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    local = InMemoryKb(kb_set)
    http = HttpKb(f"http://{host}:{port}", batch_size=50)
    batches = 0
    try:
        for _ in range(1000):
            batch = []
            for _ in range(rng.randint(1, 30)):
                roll = rng.random()
                if roll < 0.55:
                    batch.append(rng.choice(known_pool))
                elif roll < 0.85 and batch:
                    batch.append(rng.choice(batch))  # duplicate
                else:
                    batch.append(blob_id(rng.randbytes(24)))  # likely unknown
            assert http.knows(batch) == local.knows(batch)
            batches += 1
    finally:
        server.shutdown()
        server.server_close()
    _verdict("HTTP/in-memory agreement", batches == 1000,
             f"{batches} randomized batches agreed over a live socket")


def test_08_hundred_thousand_node_discovery(tmp_path):
    """Discovery over a 100k-node tree with a file-backed KB finishes in
    seconds, not minutes."""
    dirs = [DirSpec(name=f"pkg{d:03d}".encode(),
                    entries=[FileSpec(name=f"f{i:04d}".encode(),
                                      content=f"content {d}/{i}".encode())
                             for i in range(1000)])
            for d in range(100)]
    tree = merkle_from_spec(DirSpec(name=b"corpus", entries=dirs))
    node_count = tree.file_count + tree.dir_count
    assert node_count >= 100_000

    kb_set = degrade_kb(build_full_kb([tree]), [tree],
                        CoverageSpec(unknown_leaf_fraction=0.5, seed=11))
    kb_path = tmp_path / "kb.swhids"
    save_kb_file(kb_set, kb_path)
    backend = InMemoryKb(load_kb_file(kb_path))

    started = time.perf_counter()
    partition, stats = strategy_discovery(tree, backend, "layered")
    elapsed = time.perf_counter() - started
    assert len(partition.known) + len(partition.unknown) == node_count
    _verdict("100k-node discovery", elapsed < 10.0,
             f"{node_count} paths, {stats.lookups} lookups, "
             f"{elapsed:.2f}s (limit 10s)")


def test_09_report_round_trip_and_swhid_fidelity():
    """JSON reports mark directories with a trailing slash and parse back
    into the exact partition; canonical SWHID strings survive parse+render
    byte for byte."""
    rng = random.Random(58)
    round_trips = 0
    for _ in range(20):
        tree = merkle_from_spec(random_spec(rng))
        kb_set = degrade_kb(build_full_kb([tree]), [tree],
                            CoverageSpec(0.3, seed=rng.randrange(100)))
        partition, _ = strategy_discovery(tree, InMemoryKb(kb_set), "layered")
        report = json.loads(render_json(partition, tree, relative=True))
        for key, entry in report.items():
            is_dir = parse_swhid(entry["swhid"]).kind is NodeKind.DIRECTORY
            assert key.endswith("/") == is_dir, key
        recovered = partition_from_report(report)
        assert recovered.known == partition.known
        assert recovered.unknown == partition.unknown
        assert recovered.by_id == partition.by_id
        round_trips += 1

    samples = ("swh:1:cnt:814406a35db163080bbf937524d63690861ff750",
               "swh:1:dir:fcd9987804d26274fee1eb6711fac38036ccaee7")
    assert all(render_swhid(parse_swhid(s)) == s for s in samples)
    _verdict("report round trip", round_trips == 20,
             f"{round_trips} reports reconstructed exactly, "
             f"{len(samples)} canonical SWHIDs byte-identical")
