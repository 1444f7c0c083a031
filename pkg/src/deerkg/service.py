"""HTTP service exposing graph queries, summarization, entity search,
statistics, and per-article graph construction.

The app holds an immutable graph snapshot; every handler is a pure read
over it, so responses are fully determined by (config, graph, model,
fixtures) and replaying a session reproduces identical bodies when the
stub backend is configured.
"""

from __future__ import annotations

import json
import os
import re
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import graph as graph_mod
from . import query as query_mod
from .corpus import AnnotatedSentence, sentence_from_record
from .pipeline import build_article_graph
from .query import (
    HopSpec,
    NotFoundError,
    QueryDirection,
    QueryResult,
    QuerySpec,
    UnsupportedQueryError,
)
from .rds import RdsModel, load_model
from .synthesis import (
    GenerationBackend,
    StubBackend,
    RemoteBackend,
    SynthesisError,
    request_from_path,
    summarize,
)

DOC_ID_RE = re.compile(r"^(\d+|PMC\d+)$")


class ServiceError(Exception):
    pass


class ArticleNotFound(ServiceError):
    pass


class StageFailure(ServiceError):
    """A pipeline stage behind /article failed."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


# -- article sources ---------------------------------------------------


class DirectoryArticleSource:
    """Fixture-backed source: one {doc_id}.txt per article."""

    def __init__(self, directory: str):
        self.directory = Path(directory)

    def fetch(self, doc_id: str) -> str:
        path = self.directory / f"{doc_id}.txt"
        if not path.exists():
            raise ArticleNotFound(doc_id)
        return path.read_text(encoding="utf-8")


class RemoteArticleSource:
    """Literature-repository client: GET {base_url}/{doc_id} -> text."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def fetch(self, doc_id: str) -> str:
        import httpx

        resp = httpx.get(f"{self.base_url}/{doc_id}", timeout=self.timeout)
        if resp.status_code == 404:
            raise ArticleNotFound(doc_id)
        if resp.status_code != 200:
            raise StageFailure("fetch", f"upstream status {resp.status_code}")
        return resp.text


# -- annotator clients -------------------------------------------------


class DirectoryAnnotator:
    """Recorded-response annotator: one {doc_id}.jsonl of interchange
    records per document, keeping integration tests hermetic."""

    def __init__(self, directory: str):
        self.directory = Path(directory)

    def annotate(self, doc_id: str, text: str) -> list[AnnotatedSentence]:
        path = self.directory / f"{doc_id}.jsonl"
        if not path.exists():
            raise StageFailure("annotate", f"no recorded annotation for {doc_id}")
        out = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(sentence_from_record(json.loads(line)))
        return out


class HttpAnnotator:
    """Client for the external annotation service."""

    def __init__(self, url: str, timeout: float = 120.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def annotate(self, doc_id: str, text: str) -> list[AnnotatedSentence]:
        import httpx

        try:
            resp = httpx.post(
                f"{self.url}/annotate",
                json={"doc_id": doc_id, "text": text},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            records = resp.json()["records"]
        except Exception as exc:
            raise StageFailure("annotate", str(exc)) from exc
        return [sentence_from_record(r) for r in records]


# -- configuration -----------------------------------------------------


@dataclass
class ServiceConfig:
    graph_path: str
    model_path: str = ""
    host: str = "127.0.0.1"
    port: int = 8000
    backend: str = "stub"  # stub | remote
    stub_response: str = "stub summary"
    article_dir: str = ""  # directory ArticleSource
    article_base_url: str = ""  # remote ArticleSource
    annotator_dir: str = ""  # recorded annotator responses
    annotator_url: str = ""  # live annotator service
    max_neighbors: int = 50
    max_descriptions: int = 20
    article_cache_size: int = 16

    def __post_init__(self):
        if self.max_neighbors < 1 or self.max_descriptions < 1:
            raise ValueError("per-request limits must be >= 1")

    @classmethod
    def from_file(cls, path: str) -> "ServiceConfig":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls(**obj)
        # Environment overrides for deploy-time paths.
        cfg.graph_path = os.environ.get("DEER_GRAPH_PATH", cfg.graph_path)
        cfg.model_path = os.environ.get("DEER_MODEL_PATH", cfg.model_path)
        return cfg


# -- payload shaping ---------------------------------------------------


def node_payload(node: graph_mod.EntityNode, g: graph_mod.DeerGraph) -> dict:
    return {
        "entity_id": node.entity_id,
        "name": node.name,
        "types": sorted(node.types),
        "links": sorted([o, i] for o, i in node.ontology_links),
        "out_degree": g.out_degree(node.entity_id),
        "in_degree": g.in_degree(node.entity_id),
    }


def description_payload(d: graph_mod.RelationDescription) -> dict:
    return {
        "sentence_id": d.sentence_id,
        "doc_id": d.doc_id,
        "text": d.text,
        "rds_score": d.rds_score,
        "modifiers": sorted([k, l] for k, l in d.modifiers),
    }


def graph_payload(g: graph_mod.DeerGraph, max_descriptions: Optional[int] = None) -> dict:
    truncated = False
    edges = []
    for (h, t) in sorted(g.edges):
        descs = g.edges[(h, t)].descriptions
        if max_descriptions is not None and len(descs) > max_descriptions:
            descs = descs[:max_descriptions]
            truncated = True
        edges.append(
            {
                "head": h,
                "tail": t,
                "descriptions": [description_payload(d) for d in descs],
            }
        )
    return {
        "nodes": [node_payload(g.nodes[eid], g) for eid in sorted(g.nodes)],
        "edges": edges,
        "truncated": truncated,
    }


def result_payload(result: QueryResult, max_descriptions: Optional[int] = None) -> dict:
    payload = graph_payload(result.subgraph, max_descriptions)
    payload["paths"] = [list(p) for p in result.paths]
    payload["modifier_summary"] = [
        [k, l, c] for k, l, c in result.modifier_summary
    ]
    payload["diagnostics"] = list(result.diagnostics)
    return payload


def error_response(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"error": {"code": code, "message": message}}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


# -- request parsing ---------------------------------------------------


class SpecParseError(ValueError):
    pass


def parse_direction(value) -> QueryDirection:
    try:
        return QueryDirection(value)
    except ValueError:
        raise SpecParseError(f"invalid direction {value!r}")


def parse_query_spec(obj: dict) -> QuerySpec:
    if not isinstance(obj, dict):
        raise SpecParseError("query spec must be an object")
    try:
        start = frozenset(obj["start"])
        hops_raw = obj["hops"]
    except (KeyError, TypeError) as exc:
        raise SpecParseError(f"missing field: {exc}")
    if not isinstance(hops_raw, list) or not hops_raw:
        raise SpecParseError("hops must be a non-empty list")
    if len(hops_raw) > query_mod.MAX_HOPS:
        # Surfaced as 422, not 400: well-formed but unsupported.
        raise UnsupportedQueryError(
            f"{len(hops_raw)} hops requested; at most {query_mod.MAX_HOPS} supported"
        )
    hops = []
    for h in hops_raw:
        if not isinstance(h, dict) or "selector" not in h:
            raise SpecParseError("each hop needs a selector")
        sel = h["selector"]
        try:
            hops.append(
                HopSpec(
                    entities=frozenset(sel.get("entities", [])),
                    types=frozenset(sel.get("types", [])),
                    limit=h.get("limit"),
                    direction=parse_direction(h.get("direction", "both")),
                )
            )
        except (ValueError, AttributeError) as exc:
            if isinstance(exc, SpecParseError):
                raise
            raise SpecParseError(str(exc))
    modifier_filter = frozenset(
        (k, l) for k, l in obj.get("modifier_filter", [])
    )
    try:
        return QuerySpec(start=start, hops=tuple(hops), modifier_filter=modifier_filter)
    except ValueError as exc:
        raise SpecParseError(str(exc))


def _hop_cap_binding(
    g: graph_mod.DeerGraph, requested: QuerySpec, capped: QuerySpec
) -> bool:
    """True when the service-side neighbor cap dropped neighbors the
    requested spec would have kept."""
    frontier = [s for s in sorted(requested.start)]
    for req_hop, cap_hop in zip(requested.hops, capped.hops):
        wanted = req_hop.limit  # None = unlimited
        next_frontier = []
        for frm in frontier:
            uncapped = HopSpec(
                entities=req_hop.entities,
                types=req_hop.types,
                limit=None,
                direction=req_hop.direction,
            )
            matched = query_mod._expand(g, frm, uncapped)
            allowed = len(matched) if wanted is None else min(wanted, len(matched))
            if allowed > cap_hop.limit:
                return True
            next_frontier.extend(matched[: cap_hop.limit])
        frontier = next_frontier
    return False


# -- app ---------------------------------------------------------------


def create_app(
    config: ServiceConfig,
    deer_graph: Optional[graph_mod.DeerGraph] = None,
    model: Optional[RdsModel] = None,
    backend: Optional[GenerationBackend] = None,
    article_source=None,
    annotator=None,
) -> FastAPI:
    """Build the service app; explicit arguments override config-driven
    loading (used by tests to inject fixtures)."""
    if deer_graph is None:
        with open(config.graph_path, "rb") as f:
            deer_graph = graph_mod.load(f)
    if model is None and config.model_path:
        with open(config.model_path, "rb") as f:
            model = load_model(f)
    if backend is None:
        backend = (
            RemoteBackend() if config.backend == "remote" else StubBackend(config.stub_response)
        )
    if article_source is None and config.article_dir:
        article_source = DirectoryArticleSource(config.article_dir)
    if article_source is None and config.article_base_url:
        article_source = RemoteArticleSource(config.article_base_url)
    if annotator is None and config.annotator_dir:
        annotator = DirectoryAnnotator(config.annotator_dir)
    if annotator is None and config.annotator_url:
        annotator = HttpAnnotator(config.annotator_url)

    app = FastAPI(title="deerkg")
    state = app.state
    state.graph = deer_graph
    state.model = model
    state.backend = backend
    state.article_source = article_source
    state.annotator = annotator
    state.config = config
    state.article_cache = OrderedDict()  # (doc_id, model_tag) -> DeerGraph

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/entities")
    def entities(q: str = "", type: str = "", limit: int = 20):
        if not q:
            return error_response(400, "empty_query", "q must be non-empty")
        g: graph_mod.DeerGraph = state.graph
        needle = q.lower()
        matches = []
        for eid in g.nodes:
            node = g.nodes[eid]
            if needle in node.name.lower():
                if type and type not in node.types:
                    continue
                matches.append(node)
        matches.sort(key=lambda n: (-g.degree(n.entity_id), n.entity_id))
        return {
            "entities": [node_payload(n, g) for n in matches[: max(limit, 0)]]
        }

    @app.post("/query")
    async def run_query(request: Request):
        g: graph_mod.DeerGraph = state.graph
        cfg: ServiceConfig = state.config
        try:
            body = await request.json()
        except Exception:
            return error_response(400, "bad_json", "request body is not valid JSON")
        try:
            spec = parse_query_spec(body)
        except SpecParseError as exc:
            return error_response(400, "invalid_spec", str(exc))
        except UnsupportedQueryError as exc:
            return error_response(422, "too_many_hops", str(exc))
        capped_hops = tuple(
            HopSpec(
                entities=h.entities,
                types=h.types,
                limit=min(h.limit or cfg.max_neighbors, cfg.max_neighbors),
                direction=h.direction,
            )
            for h in spec.hops
        )
        capped = QuerySpec(
            start=spec.start, hops=capped_hops, modifier_filter=spec.modifier_filter
        )
        try:
            result = query_mod.multihop(g, capped)
        except NotFoundError as exc:
            return error_response(404, "entity_not_found", str(exc))
        except UnsupportedQueryError as exc:
            return error_response(422, "too_many_hops", str(exc))
        payload = result_payload(result, cfg.max_descriptions)
        if not payload["truncated"]:
            payload["truncated"] = _hop_cap_binding(g, spec, capped)
        return payload

    @app.post("/summary")
    async def summary(request: Request):
        g: graph_mod.DeerGraph = state.graph
        try:
            body = await request.json()
        except Exception:
            return error_response(400, "bad_json", "request body is not valid JSON")
        path = body.get("path") if isinstance(body, dict) else None
        if not isinstance(path, list) or len(path) not in (2, 3):
            return error_response(
                400, "invalid_path", "path must list 2 or 3 node ids"
            )
        missing = [p for p in path if p not in g.nodes]
        if missing:
            return error_response(
                404, "entity_not_found", f"unknown entity id(s): {', '.join(missing)}"
            )
        try:
            req = request_from_path(g, path, k=5)
        except SynthesisError as exc:
            return error_response(404, "edge_not_found", str(exc))
        result = summarize(req, state.backend)
        payload = {
            "summary": result.text,
            "backend": result.backend_name,
            "prompt": result.prompt,
            "extractive": result.extractive,
        }
        if result.extractive and state.backend.name != "extractive":
            return error_response(
                502, "backend_failure", "generation backend failed", **payload
            )
        return payload

    @app.post("/article")
    async def article(request: Request):
        cfg: ServiceConfig = state.config
        try:
            body = await request.json()
        except Exception:
            return error_response(400, "bad_json", "request body is not valid JSON")
        doc_id = body.get("doc_id") if isinstance(body, dict) else None
        if not isinstance(doc_id, str) or not DOC_ID_RE.match(doc_id):
            return error_response(
                400, "bad_doc_id", "doc_id must be a PMID or PMCID"
            )
        types = body.get("types") or []
        if state.article_source is None or state.annotator is None:
            return error_response(
                502, "article_pipeline_unconfigured",
                "article source or annotator not configured",
            )
        if state.model is None:
            return error_response(502, "no_model", "no frozen scoring model loaded")
        cache_key = (doc_id, state.model.tag())
        cached = state.article_cache.get(cache_key)
        if cached is not None:
            state.article_cache.move_to_end(cache_key)
            article_graph = cached
        else:
            try:
                text = state.article_source.fetch(doc_id)
            except ArticleNotFound:
                return error_response(404, "article_not_found", f"unknown id {doc_id}")
            except StageFailure as exc:
                return error_response(
                    502, "stage_failure", str(exc), stage=exc.stage
                )
            except Exception as exc:
                return error_response(502, "stage_failure", str(exc), stage="fetch")
            try:
                sentences = state.annotator.annotate(doc_id, text)
            except StageFailure as exc:
                return error_response(502, "stage_failure", str(exc), stage=exc.stage)
            except Exception as exc:
                return error_response(502, "stage_failure", str(exc), stage="annotate")
            try:
                article_graph = build_article_graph(
                    sentences, state.model, threshold=state.graph.threshold
                )
            except Exception as exc:
                return error_response(502, "stage_failure", str(exc), stage="build")
            state.article_cache[cache_key] = article_graph
            while len(state.article_cache) > cfg.article_cache_size:
                state.article_cache.popitem(last=False)
        available_types = sorted(article_graph.type_index)
        shown = article_graph
        if types:
            shown = graph_mod.subgraph_by_types(article_graph, set(types))
        payload = graph_payload(shown, cfg.max_descriptions)
        payload["types"] = available_types
        return payload

    @app.get("/graph/stats")
    def graph_stats():
        s = graph_mod.stats(state.graph)
        return {
            "node_count": s.node_count,
            "edge_count": s.edge_count,
            "description_count": s.description_count,
            "nodes_per_type": s.nodes_per_type,
        }

    return app


def run(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
