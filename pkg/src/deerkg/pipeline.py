"""End-to-end composition: annotated sentences -> scored records -> graph.

Splitting scoring (here) from graph assembly (graph module) keeps every
stage re-runnable from files, mirroring the batch CLI.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .corpus import AnnotatedSentence, DEFAULT_ROLE_CONFIG, GrammaticalRoleConfig, candidate_pairs
from .graph import DEFAULT_THRESHOLD, DeerGraph, ScoredRecord, build, subgraph_by_types
from .query import extract_modifiers
from .rds import DegeneratePathError, RdsModel, extract_path, score


class MixedDocumentError(ValueError):
    """Article-scoped builds require sentences from a single document."""


def score_corpus(
    model: RdsModel,
    sentences: Iterable[AnnotatedSentence],
    cfg: GrammaticalRoleConfig = DEFAULT_ROLE_CONFIG,
    skipped: Optional[list] = None,
) -> Iterator[ScoredRecord]:
    """Score every candidate pair of every sentence.

    Degenerate pairs (mentions sharing a head token) are not emitted;
    when `skipped` is given they are appended to it as
    (sentence_id, head_id, tail_id) for diagnostics.
    """
    tag = model.tag()
    for sentence in sentences:
        for head, tail in candidate_pairs(sentence, cfg):
            try:
                path = extract_path(sentence, head, tail)
            except DegeneratePathError:
                if skipped is not None:
                    skipped.append((sentence.sentence_id, head.entity_id, tail.entity_id))
                continue
            yield ScoredRecord(
                sentence_id=sentence.sentence_id,
                doc_id=sentence.doc_id,
                text=sentence.text,
                score=score(model, path),
                model_tag=tag,
                head_id=head.entity_id,
                head_name=head.entity_name,
                head_types=head.types,
                head_links=head.ontology_links,
                head_span=(head.start, head.end),
                tail_id=tail.entity_id,
                tail_name=tail.entity_name,
                tail_types=tail.types,
                tail_links=tail.ontology_links,
                tail_span=(tail.start, tail.end),
                modifiers=extract_modifiers(sentence, head, tail),
            )


def build_article_graph(
    sentences: Iterable[AnnotatedSentence],
    model: RdsModel,
    threshold: float = DEFAULT_THRESHOLD,
    type_filter: Optional[set[str]] = None,
    cfg: GrammaticalRoleConfig = DEFAULT_ROLE_CONFIG,
) -> DeerGraph:
    """Build a graph scoped to one document, optionally keeping only
    nodes carrying at least one of the filtered types."""
    sents = list(sentences)
    doc_ids = {s.doc_id for s in sents}
    if len(doc_ids) > 1:
        raise MixedDocumentError(f"sentences span multiple documents: {sorted(doc_ids)}")
    g = build(score_corpus(model, sents, cfg), threshold=threshold, model_tag=model.tag())
    if type_filter is not None:
        g = subgraph_by_types(g, set(type_filter))
    return g
