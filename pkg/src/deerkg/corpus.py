"""Annotated-corpus data model, interchange format I/O, and the
subject/object sentence filter.

The interchange format is newline-delimited JSON, one sentence per line:

    {"sentence_id": ..., "doc_id": ..., "text": ...,
     "tokens": [{"i": 0, "text": ..., "lemma": ..., "pos": ...}, ...],
     "deps": [{"head": -1, "dep": 0, "label": "root"}, ...],
     "mentions": [{"start": 0, "end": 1, "entity_id": ...,
                   "entity_name": ..., "types": [...], "links": [[ont, id], ...]}]}

`head = -1` marks the root token.  Records are independent and validated
individually; all types here are frozen after construction.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, IO, Iterable, Iterator, Optional

ROOT = -1


class CorpusError(Exception):
    """A corpus stream could not be read as a whole."""


@dataclass(frozen=True)
class RecordError:
    """One bad line in an interchange stream."""

    line_no: int
    reason: str

    def __str__(self):
        return f"line {self.line_no}: {self.reason}"


class RecordFormatError(CorpusError):
    """Raised for a malformed record when the caller did not ask to skip."""

    def __init__(self, error: RecordError):
        super().__init__(str(error))
        self.error = error


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    lemma: str
    pos: str


@dataclass(frozen=True)
class DependencyEdge:
    head: int  # token index, or ROOT
    dependent: int
    label: str


@dataclass(frozen=True)
class EntityMention:
    start: int  # token span [start, end)
    end: int
    entity_id: str
    entity_name: str
    types: frozenset[str]
    ontology_links: frozenset[tuple[str, str]] = frozenset()

    def span(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence_id: str
    doc_id: str
    text: str
    tokens: tuple[Token, ...]
    dep_edges: tuple[DependencyEdge, ...]
    mentions: tuple[EntityMention, ...]

    # parent[i] = head of token i (ROOT for the root token); built once.
    def head_of(self) -> dict[int, int]:
        return {e.dependent: e.head for e in self.dep_edges}

    def label_of(self) -> dict[int, str]:
        return {e.dependent: e.label for e in self.dep_edges}


class Role(enum.Enum):
    SUBJECT = "subject"
    OBJECT = "object"
    NEITHER = "neither"


@dataclass(frozen=True)
class GrammaticalRoleConfig:
    subject_labels: frozenset[str]
    object_labels: frozenset[str]

    def __post_init__(self):
        if not self.subject_labels or not self.object_labels:
            raise ValueError("subject and object label sets must be non-empty")
        if self.subject_labels & self.object_labels:
            raise ValueError("subject and object label sets must be disjoint")


#: Covers the common dependency schemes emitted by the parser families in use.
DEFAULT_ROLE_CONFIG = GrammaticalRoleConfig(
    subject_labels=frozenset({"nsubj", "nsubj:pass", "nsubjpass", "csubj"}),
    object_labels=frozenset({"obj", "dobj", "iobj", "pobj", "attr", "dative", "oprd"}),
)


def _validate_tree(n_tokens: int, deps: list[DependencyEdge]) -> None:
    """Check that the dependency edges form a single-rooted tree."""
    if len(deps) != n_tokens:
        raise ValueError(f"expected {n_tokens} dependency edges, got {len(deps)}")
    seen = set()
    roots = 0
    for e in deps:
        if not (0 <= e.dependent < n_tokens):
            raise ValueError(f"dependent index {e.dependent} out of range")
        if e.dependent in seen:
            raise ValueError(f"token {e.dependent} has more than one head")
        seen.add(e.dependent)
        if e.head == ROOT:
            roots += 1
        elif not (0 <= e.head < n_tokens):
            raise ValueError(f"head index {e.head} out of range")
        elif e.head == e.dependent:
            raise ValueError(f"token {e.dependent} is its own head")
    if roots != 1:
        raise ValueError(f"expected exactly one root, got {roots}")
    # Cycle check: walk each token to the root.
    parent = {e.dependent: e.head for e in deps}
    for start in range(n_tokens):
        slow = start
        visited = set()
        while slow != ROOT:
            if slow in visited:
                raise ValueError(f"dependency cycle through token {slow}")
            visited.add(slow)
            slow = parent[slow]


def make_sentence(
    sentence_id: str,
    doc_id: str,
    text: str,
    tokens: Iterable[Token],
    dep_edges: Iterable[DependencyEdge],
    mentions: Iterable[EntityMention],
) -> AnnotatedSentence:
    """Construct and validate an AnnotatedSentence."""
    toks = tuple(tokens)
    deps = tuple(dep_edges)
    ments = tuple(mentions)
    if not sentence_id:
        raise ValueError("sentence_id must be non-empty")
    for i, t in enumerate(toks):
        if t.index != i:
            raise ValueError(f"token indices must be contiguous from 0 (got {t.index} at {i})")
        if not t.text:
            raise ValueError(f"token {i} has empty text")
    _validate_tree(len(toks), list(deps))
    for m in ments:
        if not (0 <= m.start < m.end <= len(toks)):
            raise ValueError(f"mention span [{m.start}, {m.end}) out of bounds")
        if not m.entity_id:
            raise ValueError("mention entity_id must be non-empty")
        if not m.types:
            raise ValueError(f"mention {m.entity_id} has no types")
    return AnnotatedSentence(sentence_id, doc_id, text, toks, deps, ments)


def sentence_from_record(obj: dict) -> AnnotatedSentence:
    """Build a sentence from one parsed interchange record."""
    tokens = [
        Token(index=t["i"], text=t["text"], lemma=t["lemma"], pos=t["pos"])
        for t in obj["tokens"]
    ]
    deps = [
        DependencyEdge(head=d["head"], dependent=d["dep"], label=d["label"])
        for d in obj["deps"]
    ]
    mentions = [
        EntityMention(
            start=m["start"],
            end=m["end"],
            entity_id=m["entity_id"],
            entity_name=m["entity_name"],
            types=frozenset(m["types"]),
            ontology_links=frozenset((o, i) for o, i in m.get("links", [])),
        )
        for m in obj["mentions"]
    ]
    return make_sentence(
        obj["sentence_id"], obj["doc_id"], obj["text"], tokens, deps, mentions
    )


def sentence_to_record(s: AnnotatedSentence) -> dict:
    return {
        "sentence_id": s.sentence_id,
        "doc_id": s.doc_id,
        "text": s.text,
        "tokens": [
            {"i": t.index, "text": t.text, "lemma": t.lemma, "pos": t.pos}
            for t in s.tokens
        ],
        "deps": [
            {"head": e.head, "dep": e.dependent, "label": e.label} for e in s.dep_edges
        ],
        "mentions": [
            {
                "start": m.start,
                "end": m.end,
                "entity_id": m.entity_id,
                "entity_name": m.entity_name,
                "types": sorted(m.types),
                "links": sorted([o, i] for o, i in m.ontology_links),
            }
            for m in s.mentions
        ],
    }


def read_corpus(
    source: IO,
    on_error: Optional[Callable[[RecordError], None]] = None,
) -> Iterator[AnnotatedSentence]:
    """Yield validated sentences from an interchange stream.

    Malformed records raise RecordFormatError unless `on_error` is given,
    in which case they are reported and skipped.  Duplicate sentence ids
    are record-level errors too.
    """
    seen_ids: set[str] = set()
    for line_no, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            sent = sentence_from_record(obj)
            if sent.sentence_id in seen_ids:
                raise ValueError(f"duplicate sentence_id {sent.sentence_id!r}")
            seen_ids.add(sent.sentence_id)
        except (ValueError, KeyError, TypeError) as exc:
            err = RecordError(line_no=line_no, reason=str(exc))
            if on_error is None:
                raise RecordFormatError(err) from exc
            on_error(err)
            continue
        yield sent


def write_corpus(sentences: Iterable[AnnotatedSentence], sink: IO) -> None:
    """Serialize sentences in the interchange format, one per line."""
    for s in sentences:
        sink.write(json.dumps(sentence_to_record(s), ensure_ascii=False) + "\n")


def _depth(parent: dict[int, int], i: int) -> int:
    d = 0
    while parent[i] != ROOT:
        i = parent[i]
        d += 1
    return d


def mention_head_token(sentence: AnnotatedSentence, mention: EntityMention) -> int:
    """The mention's syntactic head token index.

    The unique in-span token whose dependency head lies outside the span;
    when several qualify, the one with the shortest path to the sentence
    root, ties broken by lowest index.
    """
    parent = sentence.head_of()
    span = set(mention.span())
    candidates = [i for i in span if parent[i] == ROOT or parent[i] not in span]
    if not candidates:
        # Span is fully internal (cannot happen in a tree, but stay total).
        candidates = sorted(span)
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda i: (_depth(parent, i), i))


def grammatical_role(
    sentence: AnnotatedSentence,
    mention: EntityMention,
    cfg: GrammaticalRoleConfig = DEFAULT_ROLE_CONFIG,
) -> Role:
    """Classify a mention as subject, object, or neither.

    Decided by the incoming dependency label of the mention's syntactic
    head token; subject wins when a label somehow sits in both sets.
    """
    head_tok = mention_head_token(sentence, mention)
    label = sentence.label_of()[head_tok]
    if label in cfg.subject_labels:
        return Role.SUBJECT
    if label in cfg.object_labels:
        return Role.OBJECT
    return Role.NEITHER


def candidate_pairs(
    sentence: AnnotatedSentence,
    cfg: GrammaticalRoleConfig = DEFAULT_ROLE_CONFIG,
) -> list[tuple[EntityMention, EntityMention]]:
    """All (subject mention, object mention) pairs with distinct entities.

    Empty exactly when the sentence fails the subject/object filter.
    Nested mentions participate like any other mention.
    """
    subjects = [m for m in sentence.mentions if grammatical_role(sentence, m, cfg) is Role.SUBJECT]
    objects = [m for m in sentence.mentions if grammatical_role(sentence, m, cfg) is Role.OBJECT]
    return [
        (s, o)
        for s in subjects
        for o in objects
        if s.entity_id != o.entity_id
    ]
