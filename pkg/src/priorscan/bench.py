"""Benchmark grid: scan a corpus against several KBs and strategies.

Each (codebase, kb, strategy) cell yields one record with the lookup count,
the looked-up fraction of distinct nodes, and the discovery wall-clock time.
Tree building is excluded from the timing: the cost under study is the
interaction with the knowledge base, not local hashing.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .discovery import Strategy, strategy_discovery
from .kb import InMemoryKb, KbBackend, KbSet
from .tree import SourceTree

CSV_FIELDS = ("codebase", "tree_size", "strategy", "kb_label", "lookups",
              "lookup_fraction", "elapsed_ms")


@dataclass(frozen=True)
class BenchRecord:
    codebase: str
    tree_size: int
    strategy: str
    kb_label: str
    lookups: int
    lookup_fraction: float
    elapsed_ms: float


@dataclass(frozen=True)
class CellError:
    codebase: str
    kb_label: str
    strategy: str
    message: str


@dataclass(frozen=True)
class GridResult:
    records: list[BenchRecord]
    errors: list[CellError]


@dataclass(frozen=True)
class StatBlock:
    mean: float
    median: float
    p75: float
    p90: float
    p95: float
    p99: float


@dataclass(frozen=True)
class CellSummary:
    count: int
    lookup_fraction: StatBlock
    elapsed_ms: StatBlock


#: summary maps (strategy, kb_label) to the cell's statistics
BenchSummary = dict[tuple[str, str], CellSummary]


def percentile_nearest_rank(values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the value at rank ceil(pct/100 * n)."""
    if not values:
        raise ValueError("percentile of empty sequence")
    ordered = sorted(values)
    rank = max(1, math.ceil(pct / 100.0 * len(ordered)))
    return ordered[rank - 1]


def _stat_block(values: Sequence[float]) -> StatBlock:
    return StatBlock(
        mean=sum(values) / len(values),
        median=percentile_nearest_rank(values, 50),
        p75=percentile_nearest_rank(values, 75),
        p90=percentile_nearest_rank(values, 90),
        p95=percentile_nearest_rank(values, 95),
        p99=percentile_nearest_rank(values, 99),
    )


def _as_backend(kb: KbSet | KbBackend) -> KbBackend:
    if isinstance(kb, KbSet):
        return InMemoryKb(kb)
    return kb


def run_grid(corpus: Sequence[tuple[str, SourceTree]],
             kbs: Sequence[KbSet | KbBackend],
             strategies: Sequence[Strategy],
             seed: int = 0, workers: int = 1) -> GridResult:
    """Run every (codebase, kb, strategy) cell; failures become error rows.

    A failing cell is recorded and the grid continues; it is never silently
    dropped.  With ``workers`` > 1, cells run on a thread pool; that mode
    needs plain :class:`KbSet` sources so each cell can get a backend with
    its own lookup counter.
    """
    if workers > 1 and any(not isinstance(kb, KbSet) for kb in kbs):
        raise ValueError("parallel run_grid requires KbSet sources")
    strategies = [Strategy(strategy) for strategy in strategies]

    def run_cell(cell: tuple[KbSet | KbBackend, Strategy, str, SourceTree]):
        kb, strategy, name, tree = cell
        backend = _as_backend(kb) if workers > 1 else kb
        try:
            _, stats = strategy_discovery(tree, backend, strategy, seed=seed)
        except Exception as exc:  # noqa: BLE001 - per-cell isolation
            return CellError(codebase=name, kb_label=backend.label,
                             strategy=strategy.value, message=str(exc))
        return BenchRecord(
            codebase=name,
            tree_size=stats.tree_size,
            strategy=stats.strategy,
            kb_label=stats.kb_label,
            lookups=stats.lookups,
            lookup_fraction=stats.lookups / tree.distinct_node_count,
            elapsed_ms=stats.elapsed * 1000.0,
        )

    cells = [(kb if workers > 1 else _as_backend(kb), strategy, name, tree)
             for kb in kbs for strategy in strategies for name, tree in corpus]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(cell) for cell in cells]
    records = [out for out in outcomes if isinstance(out, BenchRecord)]
    errors = [out for out in outcomes if isinstance(out, CellError)]
    return GridResult(records=records, errors=errors)


def summarize(records: Iterable[BenchRecord]) -> BenchSummary:
    """Per (strategy, kb_label): mean and nearest-rank percentiles."""
    cells: dict[tuple[str, str], list[BenchRecord]] = {}
    for record in records:
        cells.setdefault((record.strategy, record.kb_label), []).append(record)
    if not cells:
        raise ValueError("no records to summarize")
    summary: BenchSummary = {}
    for key, cell in cells.items():
        summary[key] = CellSummary(
            count=len(cell),
            lookup_fraction=_stat_block([r.lookup_fraction for r in cell]),
            elapsed_ms=_stat_block([r.elapsed_ms for r in cell]),
        )
    return summary


def export_records(records: Iterable[BenchRecord], path: str | Path,
                   fmt: str | None = None) -> None:
    """Write records as ``csv`` or ``jsonl`` (inferred from the extension)."""
    path = Path(path)
    fmt = fmt or _infer_format(path)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_FIELDS)
            for record in records:
                writer.writerow([
                    record.codebase, record.tree_size, record.strategy,
                    record.kb_label, record.lookups,
                    repr(record.lookup_fraction), repr(record.elapsed_ms),
                ])
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")
    else:
        raise ValueError(f"unsupported format: {fmt!r}")


def read_records(path: str | Path, fmt: str | None = None) -> list[BenchRecord]:
    """Inverse of :func:`export_records`."""
    path = Path(path)
    fmt = fmt or _infer_format(path)
    records: list[BenchRecord] = []
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_FIELDS:
                raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
            for row in reader:
                records.append(BenchRecord(
                    codebase=row["codebase"],
                    tree_size=int(row["tree_size"]),
                    strategy=row["strategy"],
                    kb_label=row["kb_label"],
                    lookups=int(row["lookups"]),
                    lookup_fraction=float(row["lookup_fraction"]),
                    elapsed_ms=float(row["elapsed_ms"]),
                ))
    elif fmt == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                records.append(BenchRecord(**json.loads(line)))
    else:
        raise ValueError(f"unsupported format: {fmt!r}")
    return records


def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("csv", "jsonl"):
        return suffix
    raise ValueError(f"cannot infer format from {path.name!r}; pass fmt='csv' or 'jsonl'")
