"""HTTP service exposing the analysis pipeline.

The knowledge base is loaded once at startup and shared immutably across
request handlers; the service holds no per-request state, so restarting it
yields identical responses for identical inputs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .diagram import DiagramParseError
from .engine import analyze
from .kb import KnowledgeBase, OBJECTIVE_TOKENS, parse_objectives
from .reporting import FORMATS, RenderOptions, render
from .stencils import DEFAULT_ANNOTATION_KEY, generate_stencil_library

DEFAULT_MAX_UPLOAD = 10 * 1024 * 1024  # diagrams are small; bounds memory


class ApiError(BaseModel):
    code: str
    message: str
    details: Optional[dict] = None


class AssetSummary(BaseModel):
    id: str
    name: str
    category_id: str
    description: str = ""


class CategorySummary(BaseModel):
    id: str
    display_name: str
    description: str = ""
    asset_count: int


class KbSummary(BaseModel):
    schema_version: str
    provenance: str
    categories: list[CategorySummary]
    assets: list[AssetSummary]
    threat_count: int


class HealthResponse(BaseModel):
    status: str
    version: str
    kb_provenance: str


def _error(status: int, code: str, message: str, details: dict | None = None) -> JSONResponse:
    body = ApiError(code=code, message=message, details=details)
    return JSONResponse(status_code=status, content=body.model_dump())


def create_app(
    kb: KnowledgeBase,
    annotation_key: str = DEFAULT_ANNOTATION_KEY,
    ui_dir: str | Path | None = None,
    max_upload: int = DEFAULT_MAX_UPLOAD,
) -> FastAPI:
    app = FastAPI(title="tfai", version=__version__)
    default_key = annotation_key

    @app.get("/api/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__, kb_provenance=kb.provenance)

    @app.get("/api/kb", response_model=KbSummary)
    def kb_summary():
        return KbSummary(
            schema_version=kb.schema_version,
            provenance=kb.provenance,
            categories=[
                CategorySummary(
                    id=c.id,
                    display_name=c.display_name,
                    description=c.description,
                    asset_count=len(kb.assets_by_category(c.id)),
                )
                for c in kb.categories
            ],
            assets=[
                AssetSummary(
                    id=a.id, name=a.name, category_id=a.category_id, description=a.description
                )
                for a in kb.assets
            ],
            threat_count=len(kb.threats),
        )

    @app.get("/api/stencils")
    def stencils(annotation_key: str = Query(default=default_key)):
        data = generate_stencil_library(kb, annotation_key)
        return Response(content=data, media_type="application/xml")

    @app.post("/api/analyze")
    async def analyze_endpoint(
        request: Request,
        objectives: str = Query(default=""),
        annotation_key: str = Query(default=default_key),
        format: str = Query(default="json"),
    ):
        if format not in FORMATS:
            return _error(
                400,
                "invalid-format",
                f"unknown format {format!r}; valid: {', '.join(FORMATS)}",
            )
        try:
            objective_set = parse_objectives(objectives.split(","))
        except ValueError as exc:
            return _error(
                400,
                "invalid-objectives",
                str(exc),
                {"valid_objectives": list(OBJECTIVE_TOKENS)},
            )

        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("diagram")
            if upload is None:
                return _error(400, "empty-body", "multipart body lacks a 'diagram' file field")
            body = await upload.read() if hasattr(upload, "read") else str(upload).encode()
        else:
            body = await request.body()
        if not body:
            return _error(400, "empty-body", "no diagram supplied")
        if len(body) > max_upload:
            return _error(
                400,
                "payload-too-large",
                f"diagram exceeds upload cap of {max_upload} bytes",
            )

        try:
            report = analyze(body, objective_set, kb, annotation_key)
        except DiagramParseError as exc:
            return _error(400, exc.code, str(exc))

        # analyses that succeed with warnings are flagged but the full report
        # is still the body
        status = 422 if report.warnings else 200
        media = {
            "json": "application/json",
            "markdown": "text/markdown; charset=utf-8",
            "html": "text/html; charset=utf-8",
        }[format]
        return Response(
            content=render(report, RenderOptions(format=format)),
            status_code=status,
            media_type=media,
        )

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
