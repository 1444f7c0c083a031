"""Entity-entity, entity-type, and multi-hop (at most 2) queries over a
DeerGraph, plus modifier extraction, aggregation, and filtering.

All operations are pure reads over an immutable graph; results carry
their own subgraph so callers never index back into the source graph.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedSentence, EntityMention
from .graph import DeerEdge, DeerGraph, RelationDescription
from .rds import path_tokens

MAX_HOPS = 2

NOUN = "noun"
VERB = "verb"
ADJ = "adj"

_POS_TO_KIND = {"NOUN": NOUN, "PROPN": NOUN, "VERB": VERB, "ADJ": ADJ}


class QueryError(Exception):
    pass


class NotFoundError(QueryError):
    """An entity id named in the query does not exist in the graph."""

    def __init__(self, entity_ids: Sequence[str]):
        self.entity_ids = list(entity_ids)
        super().__init__(f"unknown entity id(s): {', '.join(self.entity_ids)}")


class UnsupportedQueryError(QueryError):
    """More hops than the engine supports."""


class QueryDirection(enum.Enum):
    OUT = "out"
    IN = "in"
    BOTH = "both"


@dataclass(frozen=True)
class HopSpec:
    """One expansion stage: either explicit entity ids or entity types."""

    entities: frozenset[str] = frozenset()
    types: frozenset[str] = frozenset()
    limit: Optional[int] = None  # max neighbors kept per expanded node
    direction: QueryDirection = QueryDirection.BOTH

    def __post_init__(self):
        if bool(self.entities) == bool(self.types):
            raise ValueError("a hop selects by entities or by types, exactly one")
        if self.limit is not None and self.limit < 1:
            raise ValueError("hop limit must be >= 1")

    def matches(self, node) -> bool:
        if self.entities:
            return node.entity_id in self.entities
        return bool(node.types & self.types)


@dataclass(frozen=True)
class QuerySpec:
    start: frozenset[str]
    hops: tuple[HopSpec, ...]
    modifier_filter: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        if not self.start:
            raise ValueError("start set must be non-empty")
        if not self.hops:
            raise ValueError("at least one hop required")


@dataclass
class QueryResult:
    subgraph: DeerGraph
    paths: list[tuple[str, ...]] = field(default_factory=list)
    modifier_summary: list[tuple[str, str, int]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _empty_result(graph: DeerGraph) -> QueryResult:
    return QueryResult(subgraph=DeerGraph(graph.threshold, graph.model_tag))


def _finish(graph: DeerGraph, edges: dict, paths: list) -> QueryResult:
    sub = DeerGraph(graph.threshold, graph.model_tag)
    sub.edges = {k: e.copy() for k, e in edges.items()}
    incident = {h for h, _ in sub.edges} | {t for _, t in sub.edges}
    sub.nodes = {eid: graph.nodes[eid].copy() for eid in incident}
    sub._reindex()
    seen = set()
    uniq = []
    for p in paths:
        if p not in seen:
            seen.add(p)
            uniq.append(p)
    result = QueryResult(subgraph=sub, paths=uniq)
    result.modifier_summary = aggregate_modifiers(result)
    return result


def _edges_between(
    graph: DeerGraph, a: str, b: str, direction: QueryDirection
) -> dict[tuple[str, str], DeerEdge]:
    out = {}
    if direction in (QueryDirection.OUT, QueryDirection.BOTH) and (a, b) in graph.edges:
        out[(a, b)] = graph.edges[(a, b)]
    if direction in (QueryDirection.IN, QueryDirection.BOTH) and (b, a) in graph.edges:
        out[(b, a)] = graph.edges[(b, a)]
    return out


def _neighbors(graph: DeerGraph, a: str, direction: QueryDirection) -> set[str]:
    out: set[str] = set()
    if direction in (QueryDirection.OUT, QueryDirection.BOTH):
        out |= graph.out_adj.get(a, set())
    if direction in (QueryDirection.IN, QueryDirection.BOTH):
        out |= graph.in_adj.get(a, set())
    return out


def _rank_key(graph: DeerGraph, a: str, n: str, direction: QueryDirection):
    """Neighbors rank by evidence volume, then best score, then id."""
    edges = _edges_between(graph, a, n, direction)
    count = sum(len(e.descriptions) for e in edges.values())
    best = max(
        (d.rds_score for e in edges.values() for d in e.descriptions), default=0.0
    )
    return (-count, -best, n)


def entity_entity(
    graph: DeerGraph,
    a: str,
    b: str,
    direction: QueryDirection = QueryDirection.BOTH,
) -> QueryResult:
    """Relation descriptions between two entities; empty result (not an
    error) when no connecting edge exists in the requested direction."""
    missing = [x for x in (a, b) if x not in graph.nodes]
    if missing:
        raise NotFoundError(missing)
    edges = _edges_between(graph, a, b, direction)
    if not edges:
        return _empty_result(graph)
    return _finish(graph, edges, [(a, b)])


def entity_type(
    graph: DeerGraph,
    a: str,
    entity_type_name: str,
    direction: QueryDirection = QueryDirection.BOTH,
    limit: Optional[int] = None,
) -> QueryResult:
    """An entity and its neighbors of one type, ranked and truncated."""
    if a not in graph.nodes:
        raise NotFoundError([a])
    if entity_type_name not in graph.type_index:
        res = _empty_result(graph)
        res.diagnostics.append(f"unknown entity type {entity_type_name!r}")
        return res
    neighbors = [
        n
        for n in _neighbors(graph, a, direction)
        if entity_type_name in graph.nodes[n].types
    ]
    neighbors.sort(key=lambda n: _rank_key(graph, a, n, direction))
    if limit is not None:
        neighbors = neighbors[:limit]
    edges: dict = {}
    paths = []
    for n in neighbors:
        edges.update(_edges_between(graph, a, n, direction))
        paths.append((a, n))
    if not edges:
        return _empty_result(graph)
    return _finish(graph, edges, paths)


def _expand(graph: DeerGraph, frm: str, hop: HopSpec) -> list[str]:
    matched = [
        n for n in _neighbors(graph, frm, hop.direction) if hop.matches(graph.nodes[n])
    ]
    matched.sort(key=lambda n: _rank_key(graph, frm, n, hop.direction))
    if hop.limit is not None:
        matched = matched[: hop.limit]
    return matched


def multihop(graph: DeerGraph, spec: QuerySpec) -> QueryResult:
    """Staged neighborhood expansion, one or two hops.

    Each hop expands every frontier node independently (the per-hop limit
    applies per expanded node); paths are deduplicated and cover the full
    hop pattern.
    """
    if len(spec.hops) > MAX_HOPS:
        raise UnsupportedQueryError(
            f"{len(spec.hops)} hops requested; at most {MAX_HOPS} supported"
        )
    missing = [s for s in spec.start if s not in graph.nodes]
    if missing:
        raise NotFoundError(sorted(missing))

    edges: dict = {}
    paths: list[tuple[str, ...]] = []
    frontier: list[tuple[str, ...]] = [(s,) for s in sorted(spec.start)]
    for hop in spec.hops:
        next_frontier: list[tuple[str, ...]] = []
        for prefix in frontier:
            frm = prefix[-1]
            for n in _expand(graph, frm, hop):
                edges.update(_edges_between(graph, frm, n, hop.direction))
                next_frontier.append(prefix + (n,))
        frontier = next_frontier
    paths = frontier
    if not edges:
        return _empty_result(graph)
    result = _finish(graph, edges, paths)
    if spec.modifier_filter:
        result = filter_by_modifiers(result, set(spec.modifier_filter))
    return result


def extract_modifiers(
    sentence: AnnotatedSentence,
    head: EntityMention,
    tail: EntityMention,
) -> frozenset[tuple[str, str]]:
    """Nouns, verbs, and adjectives conveying the relation.

    Collected from tokens on the dependency path between the two mentions
    (mention tokens themselves excluded), plus adjectives directly
    attached to path nouns, keyed by lemma.
    """
    try:
        on_path = path_tokens(sentence, head, tail)
    except Exception:
        return frozenset()
    excluded = set(head.span()) | set(tail.span())
    parent = sentence.head_of()
    kept = [i for i in on_path if i not in excluded]
    path_nouns = {
        i for i in kept if _POS_TO_KIND.get(sentence.tokens[i].pos) == NOUN
    }
    out = set()
    for i in kept:
        kind = _POS_TO_KIND.get(sentence.tokens[i].pos)
        if kind:
            out.add((kind, sentence.tokens[i].lemma))
    for t in sentence.tokens:
        if (
            t.pos == "ADJ"
            and t.index not in excluded
            and parent.get(t.index) in path_nouns
        ):
            out.add((ADJ, t.lemma))
    return frozenset(out)


def aggregate_modifiers(result: QueryResult) -> list[tuple[str, str, int]]:
    """Occurrence counts of each (kind, lemma) across all descriptions,
    descending by count, ties lexicographic."""
    counts: Counter = Counter()
    for edge in result.subgraph.edges.values():
        for d in edge.descriptions:
            for mod in d.modifiers:
                counts[mod] += 1
    return sorted(
        ((k, l, c) for (k, l), c in counts.items()),
        key=lambda item: (-item[2], item[0], item[1]),
    )


def filter_by_modifiers(
    result: QueryResult, wanted: set[tuple[str, str]]
) -> QueryResult:
    """Keep descriptions carrying at least one wanted modifier.

    An empty wanted set means no filtering (checkbox semantics: nothing
    checked shows everything).  Edges emptied by the filter are dropped,
    along with nodes and paths they supported.
    """
    if not wanted:
        return result
    src = result.subgraph
    kept_edges: dict = {}
    for key, edge in src.edges.items():
        descs = [d for d in edge.descriptions if d.modifiers & wanted]
        if descs:
            kept_edges[key] = DeerEdge(edge.head_entity_id, edge.tail_entity_id, descs)
    sub = DeerGraph(src.threshold, src.model_tag)
    sub.edges = kept_edges
    incident = {h for h, _ in kept_edges} | {t for _, t in kept_edges}
    sub.nodes = {eid: src.nodes[eid].copy() for eid in incident}
    sub._reindex()

    def supported(path: tuple[str, ...]) -> bool:
        return all(
            (a, b) in kept_edges or (b, a) in kept_edges
            for a, b in zip(path, path[1:])
        )

    out = QueryResult(
        subgraph=sub,
        paths=[p for p in result.paths if supported(p)],
        diagnostics=list(result.diagnostics),
    )
    out.modifier_summary = aggregate_modifiers(out)
    return out
