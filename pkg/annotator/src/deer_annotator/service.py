"""HTTP wrapper: POST /annotate with {doc_id, text} returns the records
for the document plus engine identification, so callers can verify which
pinned versions produced an annotation."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .engine import ENGINE_NAME, ENGINE_VERSION, AnnotationError, annotate_text

MAX_TEXT_CHARS = 200_000


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(max_text_chars: int = MAX_TEXT_CHARS) -> FastAPI:
    app = FastAPI(title="deer-annotator")

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "engine": {"name": ENGINE_NAME, "version": ENGINE_VERSION},
        }

    @app.post("/annotate")
    async def annotate(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "bad_json", "request body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "bad_request", "body must be an object")
        doc_id = body.get("doc_id")
        text = body.get("text")
        if not isinstance(doc_id, str) or not doc_id:
            return _error(400, "bad_doc_id", "doc_id must be a non-empty string")
        if not isinstance(text, str) or not text.strip():
            return _error(400, "empty_text", "text must be non-empty")
        if len(text) > max_text_chars:
            return _error(
                413, "text_too_large",
                f"text exceeds {max_text_chars} characters",
            )
        try:
            records = annotate_text(doc_id, text)
        except AnnotationError as exc:
            return _error(400, "annotation_failed", str(exc))
        return {
            "doc_id": doc_id,
            "engine": {
                "name": ENGINE_NAME,
                "version": ENGINE_VERSION,
                "package": __version__,
            },
            "records": records,
        }

    return app
