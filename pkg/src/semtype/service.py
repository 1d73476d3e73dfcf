"""HTTP/JSON API over the store.

Tenancy is a request header (``X-Tenant``); there is no auth. Reads work
against immutable state snapshots; feedback writes are serialized per
tenant inside the store.
"""

from __future__ import annotations

from fastapi import FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import (
    ConflictError,
    NotFoundError,
    ParseError,
    SemtypeError,
    StateError,
    ValidationError,
)
from .feedback import event_from_dict
from .store import Store
from .tables import DEFAULT_MAX_ROWS

DEFAULT_TENANT = "default"


def _status_for(exc: SemtypeError) -> int:
    if isinstance(exc, ParseError):
        return 400
    if isinstance(exc, ValidationError):
        return 413 if exc.detail.get("oversize") else 400
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, ConflictError):
        return 409
    if isinstance(exc, StateError) and exc.detail.get("retry"):
        return 409
    return 500


def _error_body(exc: SemtypeError) -> dict:
    return {"code": exc.code, "message": exc.message, "detail": exc.detail}


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="semantic column type service", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SemtypeError)
    async def semtype_error_handler(_req, exc: SemtypeError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    @app.post("/v1/tables")
    async def upload_table(
        request: Request,
        x_tenant: str = Header(DEFAULT_TENANT, alias="X-Tenant"),
        delimiter: str = Query(","),
        has_header: bool = Query(True),
        max_rows: int = Query(DEFAULT_MAX_ROWS),
        name: str = Query(""),
    ):
        data = await request.body()
        table = store.upload_table(
            x_tenant,
            data,
            delimiter=delimiter,
            has_header=has_header,
            max_rows=max_rows,
            name=name,
        )
        return {
            "table_id": table.table_id,
            "name": table.name,
            "headers": table.headers,
            "n_rows": table.n_rows,
            "n_columns": len(table.columns),
        }

    @app.get("/v1/tables/{table_id}/predictions")
    async def get_predictions(
        table_id: str, x_tenant: str = Header(DEFAULT_TENANT, alias="X-Tenant")
    ):
        return store.predict_table(x_tenant, table_id)

    @app.post("/v1/feedback")
    async def post_feedback(
        request: Request, x_tenant: str = Header(DEFAULT_TENANT, alias="X-Tenant")
    ):
        payload = await request.json()
        payload.setdefault("tenant_id", x_tenant)
        try:
            event = event_from_dict(payload)
        except KeyError as exc:
            raise ValidationError(f"feedback event missing field: {exc}")
        report, created = store.post_feedback(x_tenant, event)
        status = 200 if created else 409
        return JSONResponse(status_code=status, content=report)

    @app.get("/v1/state")
    async def get_state(x_tenant: str = Header(DEFAULT_TENANT, alias="X-Tenant")):
        return store.state_summary(x_tenant)

    @app.get("/v1/ontology")
    async def get_ontology(x_tenant: str = Header(DEFAULT_TENANT, alias="X-Tenant")):
        return store.ontology_summary(x_tenant)

    @app.post("/v1/admin/global/reload")
    async def reload_global(request: Request):
        payload = {}
        body = await request.body()
        if body:
            payload = await request.json()
        try:
            revision = store.reload_global(payload.get("path"))
        except SemtypeError as exc:  # bad files keep the old state serving
            raise ValidationError(f"global reload failed: {exc.message}")
        except Exception as exc:
            raise ValidationError(f"global reload failed: {exc}")
        return {"revision": revision}

    return app
