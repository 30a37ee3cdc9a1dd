"""HTTP JSON interface.

Endpoints mirror the shared core one-to-one; the console consumes exactly
this surface. Stale interactions are rejected (409) rather than silently
answered against a moved session.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request

from ..errors import UnknownSession, WhyplanError
from .core import (
    StaleStateVersion,
    ask,
    create_session,
    export_transcript,
    feed_updates,
    inject,
    pop_injection,
)
from .store import SessionStore


def _http_error(err: WhyplanError) -> HTTPException:
    if isinstance(err, UnknownSession):
        return HTTPException(status_code=404, detail=err.payload())
    if isinstance(err, StaleStateVersion):
        return HTTPException(status_code=409, detail=err.payload())
    return HTTPException(status_code=422, detail=err.payload())


def create_app(workspace: Path | str, console: Path | str | None = None) -> FastAPI:
    store = SessionStore(workspace)
    app = FastAPI(title="whyplan", version="0.1.0")

    if console is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console, html=True), name="console")

    def with_session(session_id: str, mutate, persist: bool = True) -> Any:
        with store.lock(session_id):
            state = store.load(session_id)
            result = mutate(state)
            if persist:
                store.save(state)
            return result

    @app.post("/sessions", status_code=201)
    async def post_session(request: Request):
        body = await request.json()
        try:
            state = create_session(
                body["domain"],
                body["problem"],
                search=body.get("search"),
                plan_text=body.get("plan", ""),
            )
            store.save(state)
        except WhyplanError as err:
            raise _http_error(err) from err
        return state.plan_payload()

    @app.get("/sessions/{session_id}/plan")
    async def get_plan(session_id: str):
        try:
            return with_session(session_id, lambda s: s.plan_payload(), persist=False)
        except WhyplanError as err:
            raise _http_error(err) from err

    @app.post("/sessions/{session_id}/ask")
    async def post_ask(session_id: str, request: Request):
        body = await request.json()
        try:
            return with_session(
                session_id,
                lambda s: ask(s, body["question"], state_version=body.get("state_version")),
            )
        except WhyplanError as err:
            raise _http_error(err) from err

    @app.post("/sessions/{session_id}/inject")
    async def post_inject(session_id: str, request: Request):
        body = await request.json()
        try:
            return with_session(
                session_id,
                lambda s: inject(
                    s,
                    int(body["after"]),
                    body["action"],
                    forbid_revisit=bool(body.get("forbid_revisit", True)),
                ),
            )
        except WhyplanError as err:
            raise _http_error(err) from err

    @app.delete("/sessions/{session_id}/inject/top")
    async def delete_top(session_id: str):
        try:
            return with_session(session_id, pop_injection)
        except WhyplanError as err:
            raise _http_error(err) from err

    @app.post("/sessions/{session_id}/updates")
    async def post_updates(session_id: str, request: Request):
        body = await request.json()
        try:
            return with_session(session_id, lambda s: feed_updates(s, body["updates"]))
        except WhyplanError as err:
            raise _http_error(err) from err

    @app.get("/sessions/{session_id}/report")
    async def get_report(session_id: str):
        try:
            return with_session(session_id, export_transcript, persist=False)
        except WhyplanError as err:
            raise _http_error(err) from err

    return app
