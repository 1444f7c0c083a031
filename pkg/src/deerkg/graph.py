"""The descriptive knowledge graph: entity nodes and directed edges that
carry score-filtered relation descriptions.

Graphs are value-like: build/update return new instances, readers never
see partial state, and serialization is canonical so identical graphs
produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

GRAPH_FORMAT_VERSION = 1

DEFAULT_THRESHOLD = 0.7


class GraphError(Exception):
    pass


class GraphLoadError(GraphError):
    """The graph file is corrupt or has an unsupported version."""


class ModelTagMismatchError(GraphError):
    """Update records were scored with a different frozen model."""


@dataclass(frozen=True)
class RelationDescription:
    """One scored sentence attached to a directed entity-pair edge."""

    sentence_id: str
    doc_id: str
    text: str
    head_span: tuple[int, int]
    tail_span: tuple[int, int]
    rds_score: float
    modifiers: frozenset[tuple[str, str]] = frozenset()  # (kind, lemma)

    def sort_key(self):
        return (-self.rds_score, self.sentence_id)


@dataclass(frozen=True)
class ScoredRecord:
    """The unit flowing from scoring into graph construction."""

    sentence_id: str
    doc_id: str
    text: str
    score: float
    model_tag: str
    head_id: str
    head_name: str
    head_types: frozenset[str]
    head_links: frozenset[tuple[str, str]]
    head_span: tuple[int, int]
    tail_id: str
    tail_name: str
    tail_types: frozenset[str]
    tail_links: frozenset[tuple[str, str]]
    tail_span: tuple[int, int]
    modifiers: frozenset[tuple[str, str]] = frozenset()

    def to_record(self) -> dict:
        def mention(prefix):
            return {
                "entity_id": getattr(self, f"{prefix}_id"),
                "entity_name": getattr(self, f"{prefix}_name"),
                "types": sorted(getattr(self, f"{prefix}_types")),
                "links": sorted([o, i] for o, i in getattr(self, f"{prefix}_links")),
                "start": getattr(self, f"{prefix}_span")[0],
                "end": getattr(self, f"{prefix}_span")[1],
            }

        return {
            "sentence_id": self.sentence_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "score": self.score,
            "model_tag": self.model_tag,
            "head": mention("head"),
            "tail": mention("tail"),
            "modifiers": sorted([k, l] for k, l in self.modifiers),
        }

    @classmethod
    def from_record(cls, obj: dict) -> "ScoredRecord":
        h, t = obj["head"], obj["tail"]
        return cls(
            sentence_id=obj["sentence_id"],
            doc_id=obj["doc_id"],
            text=obj["text"],
            score=obj["score"],
            model_tag=obj.get("model_tag", ""),
            head_id=h["entity_id"],
            head_name=h["entity_name"],
            head_types=frozenset(h["types"]),
            head_links=frozenset((o, i) for o, i in h.get("links", [])),
            head_span=(h["start"], h["end"]),
            tail_id=t["entity_id"],
            tail_name=t["entity_name"],
            tail_types=frozenset(t["types"]),
            tail_links=frozenset((o, i) for o, i in t.get("links", [])),
            tail_span=(t["start"], t["end"]),
            modifiers=frozenset((k, l) for k, l in obj.get("modifiers", [])),
        )


@dataclass
class EntityNode:
    entity_id: str
    name_votes: dict[str, int] = field(default_factory=dict)
    types: set[str] = field(default_factory=set)
    ontology_links: set[tuple[str, str]] = field(default_factory=set)

    @property
    def name(self) -> str:
        """Most frequent observed name; ties break lexicographically."""
        return min(self.name_votes, key=lambda n: (-self.name_votes[n], n))

    def vote(self, name: str, types: Iterable[str], links: Iterable[tuple[str, str]]):
        self.name_votes[name] = self.name_votes.get(name, 0) + 1
        self.types.update(types)
        self.ontology_links.update(links)

    def copy(self) -> "EntityNode":
        return EntityNode(
            self.entity_id,
            dict(self.name_votes),
            set(self.types),
            set(self.ontology_links),
        )


@dataclass
class DeerEdge:
    head_entity_id: str
    tail_entity_id: str
    descriptions: list[RelationDescription] = field(default_factory=list)

    def insert(self, d: RelationDescription) -> None:
        """Insert keeping (score desc, sentence_id asc) order."""
        self.descriptions.append(d)
        self.descriptions.sort(key=RelationDescription.sort_key)

    def copy(self) -> "DeerEdge":
        return DeerEdge(self.head_entity_id, self.tail_entity_id, list(self.descriptions))


@dataclass
class BuildReport:
    admitted: int = 0
    rejected_low_score: int = 0
    self_loops: int = 0
    duplicates: int = 0


class DeerGraph:
    """Entity nodes plus directed edges carrying sorted descriptions.

    Readers treat instances as immutable; update() returns a new graph.
    """

    def __init__(self, threshold: float = DEFAULT_THRESHOLD, model_tag: str = "",
                 built_at: str = ""):
        if not (0.0 <= threshold <= 1.0):
            raise ValueError("threshold must be in [0, 1]")
        self.threshold = threshold
        self.model_tag = model_tag
        self.built_at = built_at
        self.nodes: dict[str, EntityNode] = {}
        self.edges: dict[tuple[str, str], DeerEdge] = {}
        self.out_adj: dict[str, set[str]] = {}
        self.in_adj: dict[str, set[str]] = {}
        self.type_index: dict[str, set[str]] = {}
        self._desc_keys: set[tuple[str, str, str]] = set()
        self.build_report = BuildReport()

    # -- construction ---------------------------------------------------

    def _admit(self, rec: ScoredRecord, report: BuildReport) -> None:
        if rec.score <= self.threshold:  # strict: only scores over threshold
            report.rejected_low_score += 1
            return
        if rec.head_id == rec.tail_id:
            report.self_loops += 1
            return
        key = (rec.head_id, rec.tail_id, rec.sentence_id)
        if key in self._desc_keys:
            report.duplicates += 1
            return
        self._desc_keys.add(key)
        for eid, name, types, links in (
            (rec.head_id, rec.head_name, rec.head_types, rec.head_links),
            (rec.tail_id, rec.tail_name, rec.tail_types, rec.tail_links),
        ):
            node = self.nodes.get(eid)
            if node is None:
                node = self.nodes[eid] = EntityNode(eid)
            node.vote(name, types, links)
        edge = self.edges.get((rec.head_id, rec.tail_id))
        if edge is None:
            edge = self.edges[(rec.head_id, rec.tail_id)] = DeerEdge(
                rec.head_id, rec.tail_id
            )
        edge.insert(
            RelationDescription(
                sentence_id=rec.sentence_id,
                doc_id=rec.doc_id,
                text=rec.text,
                head_span=rec.head_span,
                tail_span=rec.tail_span,
                rds_score=rec.score,
                modifiers=rec.modifiers,
            )
        )
        report.admitted += 1

    def _reindex(self) -> None:
        self.out_adj = {}
        self.in_adj = {}
        self.type_index = {}
        for (h, t) in self.edges:
            self.out_adj.setdefault(h, set()).add(t)
            self.in_adj.setdefault(t, set()).add(h)
        for node in self.nodes.values():
            for ty in node.types:
                self.type_index.setdefault(ty, set()).add(node.entity_id)

    # -- degree cache ---------------------------------------------------

    def out_degree(self, entity_id: str) -> int:
        return len(self.out_adj.get(entity_id, ()))

    def in_degree(self, entity_id: str) -> int:
        return len(self.in_adj.get(entity_id, ()))

    def degree(self, entity_id: str) -> int:
        return self.out_degree(entity_id) + self.in_degree(entity_id)

    # -- equality (used by tests) --------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeerGraph):
            return NotImplemented
        return to_bytes(self) == to_bytes(other)

    def __hash__(self):
        return hash(to_bytes(self))


def build(
    scored: Iterable[ScoredRecord],
    threshold: float = DEFAULT_THRESHOLD,
    model_tag: Optional[str] = None,
    built_at: str = "",
) -> DeerGraph:
    """Build a graph from scored records, admitting scores strictly over
    the threshold, merging mentions by entity id, and dropping self-loops.
    """
    records = list(scored)
    if model_tag is None:
        model_tag = records[0].model_tag if records else ""
    g = DeerGraph(threshold=threshold, model_tag=model_tag, built_at=built_at)
    report = BuildReport()
    for rec in records:
        g._admit(rec, report)
    g._reindex()
    g.build_report = report
    return g


def update(graph: DeerGraph, scored: Iterable[ScoredRecord]) -> DeerGraph:
    """New graph equal to building over the union of old and new records.

    Idempotent on duplicate sentence ids; records from a different frozen
    model are rejected outright.
    """
    records = list(scored)
    for rec in records:
        if graph.model_tag and rec.model_tag and rec.model_tag != graph.model_tag:
            raise ModelTagMismatchError(
                f"record {rec.sentence_id!r} scored with model "
                f"{rec.model_tag!r}, graph uses {graph.model_tag!r}"
            )
    model_tag = graph.model_tag
    if not model_tag and records:
        model_tag = records[0].model_tag
    g = DeerGraph(
        threshold=graph.threshold, model_tag=model_tag, built_at=graph.built_at
    )
    g.nodes = {eid: n.copy() for eid, n in graph.nodes.items()}
    g.edges = {k: e.copy() for k, e in graph.edges.items()}
    g._desc_keys = set(graph._desc_keys)
    report = BuildReport()
    for rec in records:
        g._admit(rec, report)
    g._reindex()
    g.build_report = report
    return g


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    description_count: int
    nodes_per_type: dict[str, int]


def stats(graph: DeerGraph) -> GraphStats:
    return GraphStats(
        node_count=len(graph.nodes),
        edge_count=len(graph.edges),
        description_count=sum(len(e.descriptions) for e in graph.edges.values()),
        nodes_per_type={t: len(ids) for t, ids in sorted(graph.type_index.items())},
    )


def audit(graph: DeerGraph) -> list[str]:
    """Integrity scan; returns human-readable problems (empty = clean)."""
    problems = []
    for (h, t), edge in graph.edges.items():
        if h == t:
            problems.append(f"self-loop on {h}")
        if h not in graph.nodes or t not in graph.nodes:
            problems.append(f"dangling edge {h}->{t}")
        if not edge.descriptions:
            problems.append(f"empty edge {h}->{t}")
        for d in edge.descriptions:
            if d.rds_score <= graph.threshold:
                problems.append(
                    f"description {d.sentence_id} on {h}->{t} below threshold"
                )
        ordered = sorted(edge.descriptions, key=RelationDescription.sort_key)
        if ordered != edge.descriptions:
            problems.append(f"unsorted descriptions on {h}->{t}")
    for h, outs in graph.out_adj.items():
        for t in outs:
            if (h, t) not in graph.edges:
                problems.append(f"stale out-index entry {h}->{t}")
    for t, ins in graph.in_adj.items():
        for h in ins:
            if (h, t) not in graph.edges:
                problems.append(f"stale in-index entry {h}->{t}")
    for ty, ids in graph.type_index.items():
        for eid in ids:
            if eid not in graph.nodes:
                problems.append(f"stale type-index entry {ty}:{eid}")
    return problems


def subgraph_by_types(graph: DeerGraph, keep_types: set[str]) -> DeerGraph:
    """Keep nodes having at least one type in the filter, and edges
    between kept nodes.  Nodes left without edges are dropped."""
    g = DeerGraph(
        threshold=graph.threshold, model_tag=graph.model_tag, built_at=graph.built_at
    )
    kept = {
        eid for eid, node in graph.nodes.items() if node.types & keep_types
    }
    for (h, t), edge in graph.edges.items():
        if h in kept and t in kept:
            g.edges[(h, t)] = edge.copy()
    incident = {h for h, _ in g.edges} | {t for _, t in g.edges}
    g.nodes = {eid: graph.nodes[eid].copy() for eid in incident}
    g._desc_keys = {
        (h, t, d.sentence_id) for (h, t), e in g.edges.items() for d in e.descriptions
    }
    g._reindex()
    return g


# -- persistence -------------------------------------------------------


def _node_obj(n: EntityNode) -> dict:
    return {
        "entity_id": n.entity_id,
        "name_votes": {k: n.name_votes[k] for k in sorted(n.name_votes)},
        "types": sorted(n.types),
        "links": sorted([o, i] for o, i in n.ontology_links),
    }


def _desc_obj(d: RelationDescription) -> dict:
    return {
        "sentence_id": d.sentence_id,
        "doc_id": d.doc_id,
        "text": d.text,
        "head_span": list(d.head_span),
        "tail_span": list(d.tail_span),
        "rds_score": d.rds_score,
        "modifiers": sorted([k, l] for k, l in d.modifiers),
    }


def to_bytes(graph: DeerGraph) -> bytes:
    obj = {
        "format_version": GRAPH_FORMAT_VERSION,
        "threshold": graph.threshold,
        "model_tag": graph.model_tag,
        "built_at": graph.built_at,
        "nodes": [_node_obj(graph.nodes[eid]) for eid in sorted(graph.nodes)],
        "edges": [
            {
                "head": h,
                "tail": t,
                "descriptions": [
                    _desc_obj(d) for d in graph.edges[(h, t)].descriptions
                ],
            }
            for (h, t) in sorted(graph.edges)
        ],
    }
    return (
        json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        + "\n"
    ).encode("utf-8")


def save(graph: DeerGraph, sink: IO[bytes]) -> None:
    sink.write(to_bytes(graph))


def load(source: IO[bytes]) -> DeerGraph:
    try:
        obj = json.loads(source.read().decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise GraphLoadError(f"corrupt graph file: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format_version") != GRAPH_FORMAT_VERSION:
        raise GraphLoadError(
            f"unsupported graph format_version {obj.get('format_version')!r}"
            if isinstance(obj, dict)
            else "corrupt graph file: not an object"
        )
    try:
        g = DeerGraph(
            threshold=obj["threshold"],
            model_tag=obj.get("model_tag", ""),
            built_at=obj.get("built_at", ""),
        )
        for n in obj["nodes"]:
            g.nodes[n["entity_id"]] = EntityNode(
                entity_id=n["entity_id"],
                name_votes=dict(n["name_votes"]),
                types=set(n["types"]),
                ontology_links={(o, i) for o, i in n.get("links", [])},
            )
        for e in obj["edges"]:
            edge = DeerEdge(e["head"], e["tail"])
            for d in e["descriptions"]:
                edge.descriptions.append(
                    RelationDescription(
                        sentence_id=d["sentence_id"],
                        doc_id=d["doc_id"],
                        text=d["text"],
                        head_span=tuple(d["head_span"]),
                        tail_span=tuple(d["tail_span"]),
                        rds_score=d["rds_score"],
                        modifiers=frozenset((k, l) for k, l in d.get("modifiers", [])),
                    )
                )
            g.edges[(e["head"], e["tail"])] = edge
            for d in edge.descriptions:
                g._desc_keys.add((e["head"], e["tail"], d.sentence_id))
    except (KeyError, TypeError) as exc:
        raise GraphLoadError(f"corrupt graph file: missing field {exc}") from exc
    g._reindex()
    return g


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: DeerGraph) -> str:
    """Plain-text DOT export for debugging."""
    lines = ["digraph deer {"]
    for eid in sorted(graph.nodes):
        node = graph.nodes[eid]
        lines.append(f"  {_dot_quote(eid)} [label={_dot_quote(node.name)}];")
    for (h, t) in sorted(graph.edges):
        n = len(graph.edges[(h, t)].descriptions)
        lines.append(
            f"  {_dot_quote(h)} -> {_dot_quote(t)} [label={_dot_quote(str(n))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
