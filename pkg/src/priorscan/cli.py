"""Command line interface.

Commands: ``scan`` a source tree against a knowledge base, ``db serve`` a
KB file over HTTP, ``simulate`` coverage-degraded KBs from a corpus, and
``bench`` lookup counts across KBs and strategies.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .bench import export_records, run_grid, summarize
from .discovery import Strategy, strategy_discovery
from .kb import InMemoryKb, KbBackend, KbError, load_kb_file
from .plots import render_bench_figures
from .remote import KbHttpError, KbProtocolError, KbTransportError, http_backend
from .report import render_json, render_text
from .server import ServerConfig, serve
from .simulate import write_ladder
from .tree import ScanConfig, ScanError, build_tree

TOKEN_ENV = "PRIORSCAN_API_TOKEN"

_STRATEGY_CHOICE = click.Choice([s.value for s in Strategy])


@click.group()
def main() -> None:
    """Partition a source tree into known and unknown artifacts."""


def _kb_backend(api: str | None, kb_file: str | None) -> KbBackend:
    if (api is None) == (kb_file is None):
        raise click.ClickException("exactly one of --api or --kb is required")
    if api is not None:
        return http_backend(api, token=os.environ.get(TOKEN_ENV))
    try:
        return InMemoryKb(load_kb_file(kb_file))
    except (OSError, KbError) as exc:
        raise click.ClickException(f"cannot load KB file: {exc}") from exc


@main.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("-f", "--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True, help="Report format.")
@click.option("--strategy", type=_STRATEGY_CHOICE, default=Strategy.LAYERED.value,
              show_default=True, help="Discovery strategy.")
@click.option("--api", help="Base URL of a knowledge base server.")
@click.option("--kb", "kb_file", type=click.Path(dir_okay=False),
              help="Path to a local KB file.")
@click.option("--exclude", "excludes", multiple=True, metavar="GLOB",
              help="Skip paths matching this glob (repeatable).")
@click.option("--stats", is_flag=True, help="Print lookup stats to stderr.")
@click.option("--fail-on-known", is_flag=True,
              help="Exit 2 if any scanned path is known.")
@click.option("--relative", is_flag=True,
              help="Report root-relative paths instead of absolute ones.")
@click.option("--collapse", is_flag=True,
              help="In text format, fold subtrees with a uniform status.")
@click.pass_context
def scan(ctx: click.Context, root: str, fmt: str, strategy: str,
         api: str | None, kb_file: str | None, excludes: tuple[str, ...],
         stats: bool, fail_on_known: bool, relative: bool,
         collapse: bool) -> None:
    """Scan ROOT and report which parts the knowledge base already holds."""
    backend = _kb_backend(api, kb_file)
    try:
        tree = build_tree(root, ScanConfig(exclude_patterns=excludes))
    except ScanError as exc:
        raise click.ClickException(str(exc)) from exc
    try:
        partition, scan_stats = strategy_discovery(tree, backend,
                                                   Strategy(strategy))
    except (KbError, KbTransportError, KbHttpError, KbProtocolError) as exc:
        raise click.ClickException(f"KB lookup failed: {exc}") from exc
    for warning in tree.warnings:
        click.echo(f"warning: {warning.path}: {warning.message}", err=True)
    if fmt == "json":
        click.echo(render_json(partition, tree, relative=relative))
    else:
        click.echo(render_text(partition, tree, collapse=collapse), nl=False)
    if stats:
        click.echo(
            f"lookups={scan_stats.lookups} tree_size={scan_stats.tree_size} "
            f"elapsed_ms={scan_stats.elapsed * 1000.0:.1f}", err=True)
    if fail_on_known and partition.known:
        ctx.exit(2)


@main.group()
def db() -> None:
    """Knowledge base server commands."""


@db.command("serve")
@click.option("-f", "--file", "kb_path", required=True,
              type=click.Path(dir_okay=False), help="KB file to serve.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
def db_serve(kb_path: str, host: str, port: int) -> None:
    """Serve a KB file over HTTP (POST /known, GET /health)."""
    try:
        config = ServerConfig(kb_path=kb_path, host=host, port=port)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    try:
        serve(config)
    except (OSError, KbError) as exc:
        raise click.ClickException(f"server startup failed: {exc}") from exc
    except KeyboardInterrupt:
        pass


def _read_manifest(path: str) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise click.ClickException(f"cannot read manifest: {exc}") from exc
    roots = [line.strip() for line in lines
             if line.strip() and not line.lstrip().startswith("#")]
    if not roots:
        raise click.ClickException(f"manifest {path} lists no corpus roots")
    return roots


def _build_corpus(manifest: str) -> list[tuple[str, object]]:
    corpus = []
    for root in _read_manifest(manifest):
        try:
            corpus.append((root, build_tree(root)))
        except ScanError as exc:
            raise click.ClickException(str(exc)) from exc
    return corpus


def _parse_fractions(spec: str) -> list[float]:
    fractions = []
    for token in spec.split(","):
        token = token.strip()
        try:
            pct = float(token)
        except ValueError:
            raise click.ClickException(f"bad fraction {token!r}") from None
        if not 0.0 <= pct <= 100.0:
            raise click.ClickException(f"fraction {token!r} outside 0..100")
        fractions.append(pct / 100.0)
    return fractions


@main.command()
@click.option("-m", "--manifest", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="File listing corpus roots, one path per line.")
@click.option("--fractions", default="0,10,20,30,40,50,60,70,80,90,100",
              show_default=True,
              help="Comma-separated percentages of leaves to mark unknown.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("-o", "--out-dir", required=True, type=click.Path(file_okay=False))
def simulate(manifest: str, fractions: str, seed: int, out_dir: str) -> None:
    """Write coverage-degraded KB files (known-<pct>.swhids) for a corpus."""
    corpus = _build_corpus(manifest)
    trees = [tree for _, tree in corpus]
    paths = write_ladder(trees, _parse_fractions(fractions), seed, out_dir)
    for path in paths:
        click.echo(str(path))


@main.command()
@click.option("-m", "--manifest", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="File listing corpus roots, one path per line.")
@click.option("--kb", "kb_files", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="KB file to benchmark against (repeatable).")
@click.option("--strategy", "strategies", multiple=True,
              type=_STRATEGY_CHOICE, default=(Strategy.LAYERED.value,),
              show_default=True, help="Strategy to benchmark (repeatable).")
@click.option("-o", "--out", "out_path", required=True,
              type=click.Path(dir_okay=False),
              help="Output table (.csv or .jsonl); figures land beside it.")
def bench(manifest: str, kb_files: tuple[str, ...],
          strategies: tuple[str, ...], out_path: str) -> None:
    """Measure lookup counts over a corpus, per KB and strategy."""
    corpus = _build_corpus(manifest)
    try:
        kbs = [load_kb_file(path) for path in kb_files]
    except (OSError, KbError) as exc:
        raise click.ClickException(f"cannot load KB file: {exc}") from exc
    result = run_grid(corpus, kbs, [Strategy(s) for s in strategies])
    for error in result.errors:
        click.echo(f"error: {error.codebase} x {error.kb_label} x "
                   f"{error.strategy}: {error.message}", err=True)
    if not result.records:
        raise click.ClickException("benchmark produced no records")
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        export_records(result.records, out)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    figures = render_bench_figures(result.records, out.parent)
    click.echo(str(out))
    for figure in figures:
        click.echo(str(figure))
    for (strategy, kb_label), cell in sorted(summarize(result.records).items()):
        click.echo(
            f"{strategy} x {kb_label}: n={cell.count} "
            f"mean_fraction={cell.lookup_fraction.mean:.3f} "
            f"p95_ms={cell.elapsed_ms.p95:.1f}", err=True)


if __name__ == "__main__":
    sys.exit(main())
