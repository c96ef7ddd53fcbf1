"""Figures for benchmark output, written next to the CSV/JSONL files."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchRecord, summarize  # noqa: E402

_FIGSIZE = (7.0, 4.5)


def _save(fig: plt.Figure, out_path: Path) -> Path:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_lookups_vs_size(records: Sequence[BenchRecord], out_path: str | Path) -> Path:
    """Scatter lookup counts against tree size, one series per strategy/KB cell.

    The y = x diagonal marks the cost of querying every distinct node once.
    """
    if not records:
        raise ValueError("no records to plot")
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    cells: dict[tuple[str, str], list[BenchRecord]] = {}
    for record in records:
        cells.setdefault((record.strategy, record.kb_label), []).append(record)
    for (strategy, kb_label), cell in sorted(cells.items()):
        cell = sorted(cell, key=lambda r: r.tree_size)
        ax.plot([r.tree_size for r in cell], [r.lookups for r in cell],
                marker="o", markersize=3, linewidth=1.0,
                label=f"{strategy} / {kb_label}")
    max_size = max(r.tree_size for r in records)
    ax.plot([0, max_size], [0, max_size], color="grey", linestyle="--",
            linewidth=0.8, label="one lookup per node")
    ax.set_xlabel("tree size (nodes)")
    ax.set_ylabel("KB lookups")
    ax.set_title("Lookups vs tree size")
    ax.legend(fontsize=7)
    return _save(fig, Path(out_path))


def plot_fraction_by_coverage(records: Sequence[BenchRecord],
                              out_path: str | Path) -> Path:
    """Mean looked-up fraction per KB label, one line per strategy."""
    if not records:
        raise ValueError("no records to plot")
    summary = summarize(records)
    strategies = sorted({strategy for strategy, _ in summary})
    labels = sorted({kb_label for _, kb_label in summary})
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for strategy in strategies:
        xs, ys = [], []
        for idx, label in enumerate(labels):
            cell = summary.get((strategy, label))
            if cell is None:
                continue
            xs.append(idx)
            ys.append(cell.lookup_fraction.mean)
        ax.plot(xs, ys, marker="o", label=strategy)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean looked-up fraction")
    ax.set_title("Lookup fraction by KB coverage")
    ax.legend(fontsize=8)
    return _save(fig, Path(out_path))


def render_bench_figures(records: Iterable[BenchRecord],
                         out_dir: str | Path) -> list[Path]:
    """Render the standard benchmark figures into ``out_dir``."""
    records = list(records)
    out_dir = Path(out_dir)
    return [
        plot_lookups_vs_size(records, out_dir / "lookups_vs_size.png"),
        plot_fraction_by_coverage(records, out_dir / "fraction_by_coverage.png"),
    ]
