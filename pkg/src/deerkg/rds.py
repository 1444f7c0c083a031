"""Dependency-path signatures, corpus path-frequency statistics, and the
relation description score (RDS).

A sentence is scored for an entity pair by extracting the shortest path
between the two mentions in the dependency tree, rendering it as a
delexicalized signature, and combining how frequent that signature is in
the reference corpus with a length penalty.  Scores live in [0, 1].
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

from .corpus import (
    ROOT,
    AnnotatedSentence,
    DEFAULT_ROLE_CONFIG,
    EntityMention,
    GrammaticalRoleConfig,
    candidate_pairs,
    mention_head_token,
)

HEAD_PLACEHOLDER = "<HEAD>"
TAIL_PLACEHOLDER = "<TAIL>"

MODEL_FORMAT_VERSION = 1

DEFAULT_LENGTH_DECAY = 0.9
DEFAULT_LENGTH_FREE = 4


class DegeneratePathError(ValueError):
    """Both mentions resolve to the same syntactic head token."""


class ModelStateError(RuntimeError):
    """The model is not in the state the operation requires."""


class Direction(enum.Enum):
    UP = "up"  # from a token toward its head
    DOWN = "down"  # from a head toward a dependent


@dataclass(frozen=True)
class PathStep:
    direction: Direction
    label: str
    through_lemma: str  # lemma of the token the step departs from


@dataclass(frozen=True)
class DepPath:
    steps: tuple[PathStep, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def signature(self) -> str:
        """Stable canonical rendering, e.g. "^nsubj vobj(treat) <TAIL>"."""
        parts = []
        for s in self.steps:
            arrow = "^" if s.direction is Direction.UP else "v"
            if s.through_lemma in (HEAD_PLACEHOLDER, TAIL_PLACEHOLDER):
                parts.append(f"{arrow}{s.label}")
            else:
                parts.append(f"{arrow}{s.label}({s.through_lemma})")
        parts.append(TAIL_PLACEHOLDER)
        return " ".join(parts)


def _path_to_root(parent: dict[int, int], i: int) -> list[int]:
    out = [i]
    while parent[i] != ROOT:
        i = parent[i]
        out.append(i)
    return out


def extract_path(
    sentence: AnnotatedSentence,
    head: EntityMention,
    tail: EntityMention,
) -> DepPath:
    """Shortest undirected tree path between the mentions' head tokens.

    Each step records its direction, the traversed dependency label, and
    the lemma of the token it departs from; the two endpoint tokens are
    delexicalized to placeholders.
    """
    u = mention_head_token(sentence, head)
    v = mention_head_token(sentence, tail)
    if u == v:
        raise DegeneratePathError(
            f"mentions {head.entity_id!r} and {tail.entity_id!r} share head token {u}"
        )
    parent = sentence.head_of()
    label = sentence.label_of()
    up_u = _path_to_root(parent, u)
    up_v = _path_to_root(parent, v)
    anc_v = {tok: depth for depth, tok in enumerate(up_v)}
    lca = None
    for tok in up_u:
        if tok in anc_v:
            lca = tok
            break
    assert lca is not None, "tree has a single root, so an LCA always exists"

    lemma = {t.index: t.lemma for t in sentence.tokens}

    def lex(tok: int) -> str:
        if tok == u:
            return HEAD_PLACEHOLDER
        if tok == v:
            return TAIL_PLACEHOLDER
        return lemma[tok]

    steps: list[PathStep] = []
    # Ascend from u to the LCA: each step departs the current token.
    tok = u
    while tok != lca:
        steps.append(PathStep(Direction.UP, label[tok], lex(tok)))
        tok = parent[tok]
    # Descend from the LCA to v: each step departs the parent side.
    down = []
    tok = v
    while tok != lca:
        down.append(PathStep(Direction.DOWN, label[tok], lex(parent[tok])))
        tok = parent[tok]
    steps.extend(reversed(down))
    return DepPath(tuple(steps))


def path_tokens(
    sentence: AnnotatedSentence,
    head: EntityMention,
    tail: EntityMention,
) -> list[int]:
    """Token indices on the dependency path, endpoints included."""
    u = mention_head_token(sentence, head)
    v = mention_head_token(sentence, tail)
    parent = sentence.head_of()
    up_u = _path_to_root(parent, u)
    up_v = _path_to_root(parent, v)
    set_v = set(up_v)
    lca = next(t for t in up_u if t in set_v)
    left = up_u[: up_u.index(lca) + 1]
    right = up_v[: up_v.index(lca)]
    return left + list(reversed(right))


@dataclass
class PathStats:
    """Corpus-wide signature frequency table.

    Shard-mergeable: counts add, so parallel collection over disjoint
    shards is equivalent to a single pass.
    """

    counts: dict[str, int] = field(default_factory=dict)
    total_paths: int = 0
    source_corpus_tag: str = ""
    degenerate_skipped: int = 0  # diagnostics only, not part of total_paths

    def add(self, signature: str, n: int = 1) -> None:
        self.counts[signature] = self.counts.get(signature, 0) + n
        self.total_paths += n

    def merge(self, other: "PathStats") -> None:
        for sig, n in other.counts.items():
            self.counts[sig] = self.counts.get(sig, 0) + n
        self.total_paths += other.total_paths
        self.degenerate_skipped += other.degenerate_skipped


def collect_stats(
    corpus: Iterable[AnnotatedSentence],
    cfg: GrammaticalRoleConfig = DEFAULT_ROLE_CONFIG,
    source_corpus_tag: str = "",
) -> PathStats:
    """Count path signatures over every candidate pair of every sentence."""
    stats = PathStats(source_corpus_tag=source_corpus_tag)
    for sentence in corpus:
        for head, tail in candidate_pairs(sentence, cfg):
            try:
                path = extract_path(sentence, head, tail)
            except DegeneratePathError:
                stats.degenerate_skipped += 1
                continue
            stats.add(path.signature())
    return stats


def nearest_rank_percentile(values: list[int], pct: float) -> int:
    """Nearest-rank percentile: element at rank ceil(pct/100 * n), 1-based."""
    if not values:
        raise ValueError("percentile of empty list")
    ordered = sorted(values)
    rank = math.ceil(pct / 100.0 * len(ordered))
    rank = min(max(rank, 1), len(ordered))
    return ordered[rank - 1]


@dataclass(frozen=True)
class RdsModel:
    """A frozen scoring function backed by a path frequency table."""

    counts: dict[str, int]
    total_paths: int
    f_ref: int
    length_decay: float
    length_free: int
    source_corpus_tag: str = ""
    frozen: bool = True

    def tag(self) -> str:
        """Short content hash identifying this frozen model."""
        return hashlib.sha256(self.to_bytes()).hexdigest()[:16]

    def to_bytes(self) -> bytes:
        obj = {
            "format_version": MODEL_FORMAT_VERSION,
            "counts": self.counts,
            "total_paths": self.total_paths,
            "f_ref": self.f_ref,
            "length_decay": self.length_decay,
            "length_free": self.length_free,
            "source_corpus_tag": self.source_corpus_tag,
        }
        return (
            json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
            + "\n"
        ).encode("utf-8")


def freeze(
    stats: PathStats,
    length_decay: float = DEFAULT_LENGTH_DECAY,
    length_free: int = DEFAULT_LENGTH_FREE,
) -> RdsModel:
    """Freeze statistics into an immutable scoring model.

    The reference frequency is the 95th-percentile frequency over
    distinct signatures (nearest rank, minimum 1).
    """
    if not stats.counts:
        raise ModelStateError("cannot freeze empty path statistics")
    if not (0.0 < length_decay <= 1.0):
        raise ValueError("length_decay must be in (0, 1]")
    if length_free < 0:
        raise ValueError("length_free must be >= 0")
    f_ref = max(1, nearest_rank_percentile(list(stats.counts.values()), 95.0))
    return RdsModel(
        counts=dict(stats.counts),
        total_paths=stats.total_paths,
        f_ref=f_ref,
        length_decay=length_decay,
        length_free=length_free,
        source_corpus_tag=stats.source_corpus_tag,
    )


def score(model: RdsModel, path: DepPath) -> float:
    """Score a path in [0, 1].

    freq term: min(1, ln(1 + f) / ln(1 + f_ref)), f the frozen frequency
    of the path's signature (0 if unseen); length term: decay applied to
    each step beyond the free length.
    """
    if not model.frozen:
        raise ModelStateError("model must be frozen before scoring")
    f = model.counts.get(path.signature(), 0)
    if f <= 0:
        return 0.0
    freq_term = min(1.0, math.log1p(f) / math.log1p(model.f_ref))
    length_term = model.length_decay ** max(0, path.length - model.length_free)
    return freq_term * length_term


def score_sentence_pair(
    model: RdsModel,
    sentence: AnnotatedSentence,
    head: EntityMention,
    tail: EntityMention,
) -> float:
    """Score a sentence for one entity pair; degenerate paths score 0."""
    try:
        path = extract_path(sentence, head, tail)
    except DegeneratePathError:
        return 0.0
    return score(model, path)


def save_stats(stats: PathStats, sink: IO[bytes]) -> None:
    obj = {
        "format_version": MODEL_FORMAT_VERSION,
        "counts": stats.counts,
        "total_paths": stats.total_paths,
        "source_corpus_tag": stats.source_corpus_tag,
        "degenerate_skipped": stats.degenerate_skipped,
    }
    sink.write(
        (
            json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
            + "\n"
        ).encode("utf-8")
    )


def load_stats(source: IO[bytes]) -> PathStats:
    obj = json.loads(source.read().decode("utf-8"))
    if obj.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported stats format_version {obj.get('format_version')}")
    return PathStats(
        counts=dict(obj["counts"]),
        total_paths=obj["total_paths"],
        source_corpus_tag=obj.get("source_corpus_tag", ""),
        degenerate_skipped=obj.get("degenerate_skipped", 0),
    )


def save_model(model: RdsModel, sink: IO[bytes]) -> None:
    sink.write(model.to_bytes())


def load_model(source: IO[bytes]) -> RdsModel:
    obj = json.loads(source.read().decode("utf-8"))
    if obj.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {obj.get('format_version')}")
    return RdsModel(
        counts=dict(obj["counts"]),
        total_paths=obj["total_paths"],
        f_ref=obj["f_ref"],
        length_decay=obj["length_decay"],
        length_free=obj["length_free"],
        source_corpus_tag=obj.get("source_corpus_tag", ""),
    )
