"""Batch driver for the pipeline: validate -> stats-collect -> freeze ->
score -> build, plus graph inspection, queries, and the service runner.

Every stage reads and writes plain files so each step is independently
re-runnable and diffable.  Exit codes: 0 success, 1 data/validation
error, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import graph as graph_mod
from . import rds
from .corpus import DEFAULT_ROLE_CONFIG, RecordError, read_corpus
from .graph import ScoredRecord
from .pipeline import score_corpus
from .query import HopSpec, QueryDirection, QuerySpec, multihop
from .service import ServiceConfig, parse_query_spec, result_payload


@click.group()
def main():
    """Descriptive knowledge graph pipeline and operator console."""


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
def validate(corpus):
    """Validate an annotated-corpus file; exit 0 iff every record is clean."""
    errors: list[RecordError] = []
    count = 0
    with open(corpus, "rb") as f:
        for _ in read_corpus(f, on_error=errors.append):
            count += 1
    for err in errors:
        click.echo(f"ERROR {err}", err=True)
    if errors:
        click.echo(f"{count} valid records, {len(errors)} errors", err=True)
        sys.exit(1)
    if count == 0:
        click.echo("warning: corpus is empty", err=True)
    click.echo(f"{count} valid records")


@main.command("stats-collect")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--shards", default=1, show_default=True, type=int)
@click.option("--tag", default="", help="source corpus tag recorded in the stats")
def stats_collect(corpus, out, shards, tag):
    """Collect dependency-path frequency statistics."""
    if shards < 1:
        raise click.UsageError("--shards must be >= 1")
    with open(corpus, "rb") as f:
        sentences = list(read_corpus(f))
    merged = rds.PathStats(source_corpus_tag=tag)
    for i in range(shards):
        shard = sentences[i::shards]
        merged.merge(rds.collect_stats(shard, DEFAULT_ROLE_CONFIG))
    merged.source_corpus_tag = tag
    with open(out, "wb") as f:
        rds.save_stats(merged, f)
    click.echo(
        f"{merged.total_paths} paths over {len(merged.counts)} signatures "
        f"({merged.degenerate_skipped} degenerate skipped)"
    )


@main.command()
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--decay", default=rds.DEFAULT_LENGTH_DECAY, show_default=True, type=float)
@click.option("--length-free", default=rds.DEFAULT_LENGTH_FREE, show_default=True, type=int)
def freeze(stats_path, out, decay, length_free):
    """Freeze collected statistics into an immutable scoring model."""
    with open(stats_path, "rb") as f:
        stats = rds.load_stats(f)
    try:
        model = rds.freeze(stats, length_decay=decay, length_free=length_free)
    except rds.ModelStateError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out, "wb") as f:
        rds.save_model(model, f)
    click.echo(f"frozen model {model.tag()} (f_ref={model.f_ref})")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def score(corpus, model_path, out):
    """Score every candidate pair; emits newline-delimited records."""
    with open(model_path, "rb") as f:
        model = rds.load_model(f)
    skipped: list = []
    n = 0
    with open(corpus, "rb") as f, open(out, "w", encoding="utf-8") as sink:
        for rec in score_corpus(model, read_corpus(f), skipped=skipped):
            sink.write(
                json.dumps(rec.to_record(), sort_keys=True, ensure_ascii=False) + "\n"
            )
            n += 1
    for sid, h, t in skipped:
        click.echo(f"skipped degenerate pair ({h}, {t}) in {sid}", err=True)
    click.echo(f"{n} scored records")


def _read_scored(path):
    with open(path, encoding="utf-8") as f:
        return [
            ScoredRecord.from_record(json.loads(line))
            for line in f
            if line.strip()
        ]


@main.command()
@click.option("--scored", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--threshold", default=graph_mod.DEFAULT_THRESHOLD, show_default=True, type=float)
def build(scored, out, threshold):
    """Build a graph from scored records (admits scores over threshold)."""
    g = graph_mod.build(_read_scored(scored), threshold=threshold)
    with open(out, "wb") as f:
        graph_mod.save(g, f)
    r = g.build_report
    click.echo(
        f"admitted {r.admitted}, rejected {r.rejected_low_score}, "
        f"self-loops {r.self_loops}, duplicates {r.duplicates}"
    )


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scored", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def update(graph_path, scored, out):
    """Fold new scored records into an existing graph."""
    with open(graph_path, "rb") as f:
        g = graph_mod.load(f)
    try:
        g2 = graph_mod.update(g, _read_scored(scored))
    except graph_mod.ModelTagMismatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out, "wb") as f:
        graph_mod.save(g2, f)
    r = g2.build_report
    click.echo(f"admitted {r.admitted}, duplicates {r.duplicates}")


@main.command("stats")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
def graph_stats(graph_path):
    """Print node/edge/description counts and per-type node counts."""
    with open(graph_path, "rb") as f:
        g = graph_mod.load(f)
    s = graph_mod.stats(g)
    click.echo(f"nodes: {s.node_count}")
    click.echo(f"edges: {s.edge_count}")
    click.echo(f"descriptions: {s.description_count}")
    for t, n in s.nodes_per_type.items():
        click.echo(f"type {t}: {n}")


def _parse_hop_flag(text: str) -> HopSpec:
    """Parse "types=A,B;limit=5;direction=out" / "entities=X,Y" hop flags."""
    fields = dict(
        part.split("=", 1) for part in text.split(";") if part
    )
    return HopSpec(
        entities=frozenset(
            x for x in fields.get("entities", "").split(",") if x
        ),
        types=frozenset(x for x in fields.get("types", "").split(",") if x),
        limit=int(fields["limit"]) if "limit" in fields else None,
        direction=QueryDirection(fields.get("direction", "both")),
    )


@main.command("query")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--start", multiple=True, help="start entity id (repeatable)")
@click.option("--hop", "hops", multiple=True, help='hop spec, e.g. "types=Disease;limit=10"')
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json", "dot"]))
def query_cmd(graph_path, spec_path, start, hops, fmt):
    """Run a query from a spec file or from --start/--hop flags."""
    with open(graph_path, "rb") as f:
        g = graph_mod.load(f)
    if spec_path:
        spec = parse_query_spec(json.loads(Path(spec_path).read_text(encoding="utf-8")))
    else:
        if not start or not hops:
            raise click.UsageError("provide --spec, or --start with --hop")
        try:
            spec = QuerySpec(
                start=frozenset(start),
                hops=tuple(_parse_hop_flag(h) for h in hops),
            )
        except ValueError as exc:
            raise click.UsageError(str(exc))
    result = multihop(g, spec)
    if fmt == "json":
        click.echo(json.dumps(result_payload(result), sort_keys=True, ensure_ascii=False))
    elif fmt == "dot":
        click.echo(graph_mod.to_dot(result.subgraph), nl=False)
    else:
        for (h, t) in sorted(result.subgraph.edges):
            edge = result.subgraph.edges[(h, t)]
            click.echo(f"{h} -> {t}")
            for d in edge.descriptions:
                click.echo(f"  [{d.rds_score:.3f}] {d.text}")
        for k, l, c in result.modifier_summary:
            click.echo(f"modifier {k}:{l} ({c})")


@main.command("training-pairs")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def training_pairs(graph_path, out):
    """Export summarization training pairs as newline-delimited records."""
    from .synthesis import build_training_pairs, write_training_pairs

    with open(graph_path, "rb") as f:
        g = graph_mod.load(f)
    with open(out, "w", encoding="utf-8") as sink:
        pairs = list(build_training_pairs(g))
        write_training_pairs(pairs, sink)
    click.echo(f"{len(pairs)} pairs")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
def serve(config_path):
    """Start the HTTP service."""
    if not Path(config_path).exists():
        click.echo(f"error: config file {config_path} not found", err=True)
        sys.exit(1)
    try:
        config = ServiceConfig.from_file(config_path)
    except (ValueError, TypeError, KeyError) as exc:
        click.echo(f"error: bad config: {exc}", err=True)
        sys.exit(1)
    if not Path(config.graph_path).exists():
        click.echo(f"error: graph file {config.graph_path} not found", err=True)
        sys.exit(1)
    from .service import run

    run(config)


if __name__ == "__main__":
    main()
