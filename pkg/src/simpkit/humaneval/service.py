"""HTTP+JSON API over the annotation event store.

Routes (paths are part of the contract):
  GET  /api/items?annotator=<id>&status=pending  items + rubric
  POST /api/ratings    {annotator, item_id, scores, note?}
  GET  /api/agreement  per-criterion exact agreement + disagreement list
  POST /api/consensus  {item_id, scores, resolved_by, as_of?}
  GET  /api/summary    mean consensus scores per system
  GET  /api/export     full event log

Toolkit errors map onto status codes: validation 422, unknown record
404, unassigned annotator 403, stale/conflicting write 409. A static
directory (the annotation UI) can be mounted over the remaining paths.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..errors import (
    AuthorizationError,
    ConflictError,
    InputError,
    NotFoundError,
    SimpkitError,
)
from .rubric import rubric_as_dicts
from .store import EventStore


def _status_code(exc: SimpkitError) -> int:
    if isinstance(exc, ConflictError):
        return 409
    if isinstance(exc, AuthorizationError):
        return 403
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, InputError):
        return 422
    return 500


def _require_str(payload: dict, field: str) -> str:
    value = payload.get(field)
    if not isinstance(value, str) or not value.strip():
        raise InputError(f"body field {field!r} must be a non-empty string")
    return value


def create_app(store: EventStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="simpkit annotation service", version=__version__)

    @app.exception_handler(SimpkitError)
    async def _simpkit_error(request: Request, exc: SimpkitError) -> JSONResponse:
        return JSONResponse(status_code=_status_code(exc), content={"detail": str(exc)})

    @app.get("/api/items")
    def get_items(annotator: str | None = None, status: str | None = None) -> dict:
        return {
            "items": store.items(annotator=annotator, status=status),
            "rubric": rubric_as_dicts(),
            "annotators": sorted(store.annotators()),
        }

    @app.post("/api/ratings")
    def post_rating(payload: dict = Body(...)) -> dict:
        annotator = _require_str(payload, "annotator")
        item_id = _require_str(payload, "item_id")
        note = payload.get("note")
        return store.record_rating(
            annotator=annotator,
            item_id=item_id,
            scores=payload.get("scores"),
            note=note,
        )

    @app.get("/api/agreement")
    def get_agreement() -> dict:
        return store.agreement()

    @app.post("/api/consensus")
    def post_consensus(payload: dict = Body(...)) -> dict:
        item_id = _require_str(payload, "item_id")
        resolved_by = payload.get("resolved_by")
        return store.record_consensus(
            item_id=item_id,
            scores=payload.get("scores"),
            resolved_by=resolved_by,
            as_of=payload.get("as_of"),
        )

    @app.get("/api/summary")
    def get_summary() -> dict:
        return {"systems": store.consensus_summary()}

    @app.get("/api/export")
    def get_export() -> dict:
        return store.export_events()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
