"""Deterministic annotation engine.

Segments, tokenizes, tags, parses, and entity-links raw text, emitting
interchange records (one dict per sentence).  The engine is rule-based
and fully deterministic: a fixed lexicon drives NER and linking, and the
dependency parse is a shallow heuristic that always yields a single
rooted tree.  It exists so the pipeline runs hermetically; a statistical
parser can be swapped in behind the same `annotate_text` signature.
"""

from __future__ import annotations

import re

from .lexicon import ENTRIES, MAX_ENTRY_LEN

ENGINE_NAME = "rule-engine"
ENGINE_VERSION = "1"

ROOT = -1

_SENT_SPLIT = re.compile(r"(?<=[.!?])\s+(?=[A-Z(])")
_TOKEN = re.compile(r"[A-Za-z0-9][\w\-/+']*|[^\w\s]")

_DET = {"the", "a", "an", "this", "these", "those", "that", "its", "their", "our"}
_ADP = {"of", "in", "by", "with", "for", "to", "on", "at", "from", "into", "as", "than"}
_CCONJ = {"and", "or", "but", "nor"}
_AUX = {"is", "are", "was", "were", "be", "been", "being", "may", "can", "could", "must", "should", "not"}
_PRON = {"it", "we", "they", "which", "who", "what"}

_VERB_LEMMAS = {
    "cause", "treat", "inhibit", "prevent", "induce", "downregulate",
    "upregulate", "regulate", "activate", "alter", "demonstrate",
    "determine", "investigate", "aim", "result", "conclude", "promote",
    "aggravate", "reduce", "modulate", "remain", "show", "present",
    "progress", "enhance", "need", "cultivate", "express",
}

_ADJ_WORDS = {
    "human", "key", "significant", "early", "several", "severe", "safe",
    "effective", "novel", "relevant", "primary", "conjugated", "serum",
    "idiosyncratic", "intrahepatic", "positive", "more", "likely",
    "cytotoxic", "subcytotoxic", "antioxidant", "hepatotoxic",
    "widespread", "available", "leading", "infectious", "increased",
}

_LEMMA_EXCEPTIONS = {
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "has": "have", "had": "have", "caused": "cause",
    "causes": "cause", "causing": "cause", "induced": "induce",
    "altered": "alter", "aims": "aim", "resulted": "result",
    "downregulated": "downregulate", "upregulated": "upregulate",
    "inhibited": "inhibit", "demonstrated": "demonstrate",
    "promoting": "promote", "treated": "treat", "treats": "treat",
    "activates": "activate", "activation": "activation",
    "regulates": "regulate", "genes": "gene", "acids": "acid",
    "patients": "patient", "concentrations": "concentration",
    "levels": "level", "models": "model", "features": "feature",
    "elevations": "elevation", "cells": "cell", "targets": "target",
    "transporters": "transporter", "mechanisms": "mechanism",
    "pathways": "pathway", "methods": "method", "practices": "practice",
    "therapies": "therapy", "advances": "advance", "antibiotics": "antibiotic",
    "vaccines": "vaccine", "infections": "infection",
    "hepatocytes": "hepatocyte",
}


def lemmatize(word: str) -> str:
    w = word.lower()
    if w in _LEMMA_EXCEPTIONS:
        return _LEMMA_EXCEPTIONS[w]
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 4 and w.endswith("ed"):
        stem = w[:-2]
        return stem + "e" if stem + "e" in _VERB_LEMMAS else stem
    if len(w) > 3 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return w


def tokenize(sentence: str) -> list[str]:
    return _TOKEN.findall(sentence)


def split_sentences(text: str) -> list[str]:
    out = []
    for para in text.split("\n"):
        para = para.strip()
        if not para:
            continue
        out.extend(p for p in _SENT_SPLIT.split(para) if p.strip())
    return out


def find_mentions(tokens: list[str]) -> list[dict]:
    """Greedy longest-match lexicon scan; non-overlapping, left to right."""
    lowered = [t.lower() for t in tokens]
    mentions = []
    i = 0
    while i < len(tokens):
        hit = None
        for n in range(min(MAX_ENTRY_LEN, len(tokens) - i), 0, -1):
            entry = ENTRIES.get(tuple(lowered[i : i + n]))
            if entry is not None:
                hit = (n, entry)
                break
        if hit is None:
            i += 1
            continue
        n, entry = hit
        mentions.append(
            {
                "start": i,
                "end": i + n,
                "entity_id": entry.entity_id,
                "entity_name": entry.name,
                "types": list(entry.types),
                "links": [list(l) for l in entry.links],
            }
        )
        i += n
    return mentions


def _tag(tokens: list[str], mention_spans: set[int]) -> list[str]:
    tags = []
    for i, tok in enumerate(tokens):
        w = tok.lower()
        if not re.search(r"\w", tok):
            tags.append("PUNCT")
        elif i in mention_spans:
            tags.append("PROPN")
        elif re.fullmatch(r"[\d.,]+", tok):
            tags.append("NUM")
        elif w in _DET:
            tags.append("DET")
        elif w in _ADP:
            tags.append("ADP")
        elif w in _CCONJ:
            tags.append("CCONJ")
        elif w in _AUX:
            tags.append("AUX")
        elif w in _PRON:
            tags.append("PRON")
        elif lemmatize(w) in _VERB_LEMMAS:
            tags.append("VERB")
        elif w in _ADJ_WORDS or w.endswith(("ic", "ous", "ive", "able", "al")):
            tags.append("ADJ")
        elif w.endswith("ly"):
            tags.append("ADV")
        else:
            tags.append("NOUN")
    return tags


def _parse(tokens: list[str], tags: list[str], mentions: list[dict]) -> list[dict]:
    """Shallow deterministic parse producing one rooted tree.

    The main verb (first VERB, else first non-punctuation token) roots
    the sentence; nominals split into a subject (last nominal before the
    root) and an object chain after it; modifiers hang off the nearest
    following nominal.  Crude, but structurally valid and stable.
    """
    n = len(tokens)
    # multi-token mentions: interior tokens attach forward to the last
    # token of the span, which carries the grammatical role
    span_head = {}
    for m in mentions:
        for i in range(m["start"], m["end"] - 1):
            span_head[i] = m["end"] - 1
    nominal = [
        i
        for i in range(n)
        if tags[i] in ("NOUN", "PROPN") and i not in span_head
    ]
    root = next(
        (i for i in range(n) if tags[i] == "VERB" and i not in span_head),
        next((i for i in range(n) if tags[i] != "PUNCT" and i not in span_head), 0),
    )
    before = [i for i in nominal if i < root]
    after = [i for i in nominal if i > root]
    subject = before[-1] if before else None

    head = {root: ROOT}
    label = {root: "root"}

    def next_nominal(i):
        return next((j for j in nominal if j > i), None)

    for i in range(n):
        if i == root:
            continue
        if i in span_head:
            head[i], label[i] = span_head[i], "compound"
        elif tags[i] == "PUNCT":
            head[i], label[i] = root, "punct"
        elif i == subject:
            head[i], label[i] = root, "nsubj"
        elif i in nominal:
            if i < root:
                # pre-subject nominal: modifier of the subject chain
                head[i], label[i] = (subject if subject is not None else root), "nmod"
                if head[i] == i:
                    head[i] = root
            elif after and i == after[0]:
                head[i], label[i] = root, "obj"
            else:
                prev = max(j for j in nominal if j < i)
                head[i], label[i] = prev, "nmod"
        elif tags[i] in ("DET", "ADJ", "NUM", "ADP", "CCONJ"):
            nxt = next_nominal(i)
            lbl = {"DET": "det", "ADJ": "amod", "NUM": "nummod",
                   "ADP": "case", "CCONJ": "cc"}[tags[i]]
            head[i], label[i] = (nxt if nxt is not None else root), lbl
            if head[i] == i:
                head[i] = root
        elif tags[i] == "AUX":
            head[i], label[i] = root, "aux"
        elif tags[i] == "ADV":
            head[i], label[i] = root, "advmod"
        elif tags[i] == "VERB":
            head[i], label[i] = root, "conj"
        else:
            head[i], label[i] = root, "dep"

    # guard against accidental cycles from the forward-attachment rules:
    # any token that cannot reach the root is reattached to it directly
    for i in range(n):
        seen = set()
        j = i
        while j != ROOT and j not in seen:
            seen.add(j)
            j = head[j]
        if j != ROOT:
            head[i], label[i] = root, "dep"
    return [{"head": head[i], "dep": i, "label": label[i]} for i in range(n)]


class AnnotationError(ValueError):
    pass


def annotate_text(doc_id: str, text: str) -> list[dict]:
    """Raw text -> interchange records, one per sentence."""
    if not doc_id:
        raise AnnotationError("doc_id must be non-empty")
    if not text or not text.strip():
        raise AnnotationError("text must be non-empty")
    records = []
    for idx, sentence in enumerate(split_sentences(text), start=1):
        tokens = tokenize(sentence)
        if not tokens:
            continue
        mentions = find_mentions(tokens)
        covered = {
            i for m in mentions for i in range(m["start"], m["end"])
        }
        tags = _tag(tokens, covered)
        deps = _parse(tokens, tags, mentions)
        records.append(
            {
                "sentence_id": f"{doc_id}-{idx:04d}",
                "doc_id": doc_id,
                "text": sentence,
                "tokens": [
                    {"i": i, "text": t, "lemma": lemmatize(t), "pos": tags[i]}
                    for i, t in enumerate(tokens)
                ],
                "deps": deps,
                "mentions": mentions,
            }
        )
    if not records:
        raise AnnotationError("text contained no sentences")
    return records
