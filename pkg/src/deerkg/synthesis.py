"""Relation-summary synthesis: prompt assembly, training-pair dataset
construction, and generation through a pluggable backend.

Prompt building is byte-deterministic; the extractive fallback guarantees
summarize() never fails while any sentence is available.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional, Protocol, Sequence

from .graph import DeerEdge, DeerGraph, RelationDescription

DEFAULT_CONTEXT_K = 5
TARGET_MIN_SCORE = 0.75
INPUT_MIN_SCORE = 0.7


class SynthesisError(Exception):
    pass


class BackendError(SynthesisError):
    """The generation backend failed to produce a summary."""


@dataclass(frozen=True)
class RelationContext:
    head_name: str
    tail_name: str
    sentences: tuple[RelationDescription, ...]  # score descending

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("a relation context needs at least one sentence")


@dataclass(frozen=True)
class SynthesisRequest:
    target: tuple[str, str]  # entity display names
    contexts: tuple[RelationContext, ...]

    def __post_init__(self):
        if not self.contexts:
            raise ValueError("request needs at least one context")
        for a, b in zip(self.contexts, self.contexts[1:]):
            if a.tail_name != b.head_name:
                raise ValueError(
                    f"contexts do not chain: {a.tail_name!r} != {b.head_name!r}"
                )


class GenerationBackend(Protocol):
    name: str

    def generate(self, prompt: str) -> str: ...


@dataclass
class StubBackend:
    """Fixed-response backend for hermetic tests."""

    response: str = "stub summary"
    name: str = "stub"

    def generate(self, prompt: str) -> str:
        return self.response


class RemoteBackend:
    """Chat-completion client for a hosted LLM.

    Configured via environment variables (overridable per instance):
    DEER_LLM_ENDPOINT, DEER_LLM_MODEL, DEER_LLM_API_KEY,
    DEER_LLM_TIMEOUT (seconds).  Retries are bounded and requests are
    spaced by a minimum interval.
    """

    name = "remote-llm"

    def __init__(
        self,
        endpoint: Optional[str] = None,
        model: Optional[str] = None,
        api_key: Optional[str] = None,
        timeout: Optional[float] = None,
        max_retries: int = 2,
        min_interval: float = 0.0,
    ):
        self.endpoint = endpoint or os.environ.get("DEER_LLM_ENDPOINT", "")
        self.model = model or os.environ.get("DEER_LLM_MODEL", "")
        self.api_key = api_key or os.environ.get("DEER_LLM_API_KEY", "")
        self.timeout = timeout or float(os.environ.get("DEER_LLM_TIMEOUT", "30"))
        self.max_retries = max_retries
        self.min_interval = min_interval
        self._last_request = 0.0

    def generate(self, prompt: str) -> str:
        import httpx

        if not self.endpoint:
            raise BackendError("no remote endpoint configured")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        last_exc: Optional[Exception] = None
        for _ in range(self.max_retries + 1):
            wait = self.min_interval - (time.monotonic() - self._last_request)
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()
            try:
                resp = httpx.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except Exception as exc:  # noqa: BLE001 - retried, then surfaced
                last_exc = exc
        raise BackendError(f"remote backend failed: {last_exc}") from last_exc


def select_context(
    graph: DeerGraph, edge: DeerEdge, k: int = DEFAULT_CONTEXT_K
) -> RelationContext:
    """Top-k descriptions of an edge (score desc, sentence_id asc)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return RelationContext(
        head_name=graph.nodes[edge.head_entity_id].name,
        tail_name=graph.nodes[edge.tail_entity_id].name,
        sentences=tuple(edge.descriptions[:k]),
    )


def request_from_path(
    graph: DeerGraph, path: Sequence[str], k: int = DEFAULT_CONTEXT_K
) -> SynthesisRequest:
    """Build a request from a node-id path of length 2 or 3.

    Each consecutive pair must be connected (either direction); contexts
    are oriented along the path so they chain head-to-tail.
    """
    if len(path) not in (2, 3):
        raise ValueError("path must have 2 or 3 nodes")
    contexts = []
    for a, b in zip(path, path[1:]):
        edge = graph.edges.get((a, b)) or graph.edges.get((b, a))
        if edge is None:
            raise SynthesisError(f"no edge between {a!r} and {b!r}")
        contexts.append(
            RelationContext(
                head_name=graph.nodes[a].name,
                tail_name=graph.nodes[b].name,
                sentences=tuple(edge.descriptions[:k]),
            )
        )
    return SynthesisRequest(
        target=(graph.nodes[path[0]].name, graph.nodes[path[-1]].name),
        contexts=tuple(contexts),
    )


def build_prompt(request: SynthesisRequest) -> str:
    """Deterministic summary prompt.

    Instruction line, blank line, then one block per context: a
    "Relation between X and Y:" header followed by its sentences one per
    line; blocks separated by a blank line.
    """
    e1, e2 = request.target
    lines = [
        f"Given the context below, describe the relation between {e1} and {e2} "
        "in one sentence."
    ]
    blocks = []
    for ctx in request.contexts:
        header = f"Relation between {ctx.head_name} and {ctx.tail_name}:"
        blocks.append("\n".join([header] + [s.text for s in ctx.sentences]))
    return lines[0] + "\n\n" + "\n\n".join(blocks)


@dataclass(frozen=True)
class Summary:
    text: str
    backend_name: str
    prompt: str
    extractive: bool = False


def summarize(request: SynthesisRequest, backend: GenerationBackend) -> Summary:
    """Generate a summary; falls back to the best available sentence.

    The fallback prefers the highest-scored sentence on the direct
    (one-hop) context for the target pair, then the highest-scored
    sentence anywhere in the request.
    """
    prompt = build_prompt(request)
    try:
        text = backend.generate(prompt)
        return Summary(text=text, backend_name=backend.name, prompt=prompt)
    except Exception:
        return extractive_summary(request, prompt)


def extractive_summary(request: SynthesisRequest, prompt: Optional[str] = None) -> Summary:
    if prompt is None:
        prompt = build_prompt(request)
    e1, e2 = request.target
    direct = [
        c
        for c in request.contexts
        if {c.head_name, c.tail_name} == {e1, e2}
    ]
    pool = direct if direct else list(request.contexts)
    best = max(
        (s for c in pool for s in c.sentences),
        key=lambda s: (s.rds_score, s.sentence_id),
    )
    return Summary(
        text=best.text, backend_name="extractive", prompt=prompt, extractive=True
    )


@dataclass(frozen=True)
class TrainingPair:
    inputs: tuple[str, ...]
    target: str
    pair: tuple[str, str]  # entity ids
    target_score: float
    input_scores: tuple[float, ...]


def build_training_pairs(
    graph: DeerGraph,
    max_path_len: int = 2,
    target_min: float = TARGET_MIN_SCORE,
    input_min: float = INPUT_MIN_SCORE,
) -> Iterator[TrainingPair]:
    """Summarization training pairs from the graph.

    For each directed one-hop edge whose best sentence scores over
    `target_min`: that sentence is the target; the inputs take the best
    sentence over `input_min` from each edge of every simple 2-hop path
    between the pair, plus the one-hop edge's remaining sentences over
    `input_min`.  Pairs with no usable inputs are skipped.
    """
    if max_path_len != 2:
        raise ValueError("only 2-hop path enumeration is supported")
    for (a, b) in sorted(graph.edges):
        edge = graph.edges[(a, b)]
        best = edge.descriptions[0]
        if best.rds_score <= target_min:
            continue
        inputs: list[RelationDescription] = []
        for x in sorted(graph.out_adj.get(a, set())):
            if x in (a, b) or (x, b) not in graph.edges:
                continue
            for leg in ((a, x), (x, b)):
                top = graph.edges[leg].descriptions[0]
                if top.rds_score > input_min:
                    inputs.append(top)
        for d in edge.descriptions[1:]:
            if d.rds_score > input_min:
                inputs.append(d)
        if not inputs:
            continue
        yield TrainingPair(
            inputs=tuple(d.text for d in inputs),
            target=best.text,
            pair=(a, b),
            target_score=best.rds_score,
            input_scores=tuple(d.rds_score for d in inputs),
        )


def write_training_pairs(pairs: Iterable[TrainingPair], sink: IO[str]) -> None:
    """Newline-delimited export: {"inputs": [...], "target": ..., "pair": [...]}."""
    for p in pairs:
        sink.write(
            json.dumps(
                {"inputs": list(p.inputs), "target": p.target, "pair": list(p.pair)},
                ensure_ascii=False,
            )
            + "\n"
        )
