"""HTTP/JSON facade over sessions.

One endpoint per action, full-state GET, CSV download, and a chat endpoint
that runs the complete agent pipeline synchronously. All mutating calls
carry an optimistic ``version``; a mismatch is a 409 and leaves state
untouched. Snapshots are written to disk after every applied action, so a
restarted service serves identical state.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .agents import CompletionBackend, build_context, run_pipeline
from .agents.context import AgentContext
from .datapackage import Package
from .errors import (
    BackendTimeout,
    InvalidAction,
    LinkboardError,
    MalformedDocument,
    MissingResource,
    StaleVersion,
    UnknownEntity,
    UnknownField,
    VersionSkew,
)
from .linking import entity_counts
from .session import (
    AdjustFilter,
    AdjustVizField,
    Brush,
    CreateFilter,
    CreateViz,
    DismissViz,
    SessionState,
    download,
    restore,
    snapshot,
    state_document,
)

logger = logging.getLogger(__name__)

_STATUS = {
    UnknownEntity: 404,
    UnknownField: 404,
    MissingResource: 404,
    StaleVersion: 409,
    BackendTimeout: 504,
    VersionSkew: 500,
}
DEFAULT_ERROR_STATUS = 422  # InvalidAction, SchemaViolation, ScriptMiss, ...


def error_status(exc: LinkboardError) -> int:
    for cls, status in _STATUS.items():
        if isinstance(exc, cls):
            return status
    return DEFAULT_ERROR_STATUS


# --------------------------------------------------------------------------
# chat turn
# --------------------------------------------------------------------------

def chat_turn(state: SessionState, text: str, context: AgentContext,
              backend: CompletionBackend, package: Package) -> tuple[list[dict], str]:
    """Run one conversational turn against a session.

    The user entry is appended first; agent failures surface after it, with
    the dashboard untouched by the failing stage. Filters register before
    the visualization so a new chart is born already filtered.
    """
    state.append_user(text)
    out = run_pipeline(text, context, backend, package)
    events: list[dict] = []
    try:
        for cmd in out.filter_commands:
            if cmd.kind == "interval":
                action = CreateFilter(kind="interval", entity=cmd.entity,
                                      fields=(cmd.field,),
                                      intervals={cmd.field: (cmd.min, cmd.max)})
            else:
                action = CreateFilter(kind="point", entity=cmd.entity,
                                      fields=(cmd.field,),
                                      values=tuple((v,) for v in cmd.values or ()))
            events.extend(state.apply(action))
        if out.viz_spec is not None:
            events.extend(state.apply(CreateViz(spec=out.viz_spec)))
    except LinkboardError as exc:
        exc.locus.setdefault("events", events)
        raise
    reply = out.route.reply or _default_reply(events)
    state.append_reply(reply)
    return events, reply


def _default_reply(events: list[dict]) -> str:
    filters = sum(1 for e in events if e["kind"] == "filter_created")
    vizzes = sum(1 for e in events if e["kind"] == "viz_created")
    parts = []
    if filters:
        parts.append(f"added {filters} filter{'s' if filters > 1 else ''}")
    if vizzes:
        parts.append("added a visualization")
    if not parts:
        return "Okay."
    return (" and ".join(parts) + ".").capitalize()


# --------------------------------------------------------------------------
# app
# --------------------------------------------------------------------------

class SessionStore:
    """In-memory sessions with per-action snapshot persistence."""

    def __init__(self, package: Package, snapshot_dir: str | Path | None = None):
        self.package = package
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        self._sessions: dict[str, SessionState] = {}
        self._lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}

    def create(self) -> SessionState:
        state = SessionState(self.package, session_id=uuid.uuid4().hex)
        with self._lock:
            self._sessions[state.id] = state
            self._session_locks[state.id] = threading.Lock()
        self.persist(state)
        return state

    def get(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._sessions.get(session_id)
        if state is not None:
            return state
        state = self._load(session_id)
        if state is None:
            raise UnknownEntity(f"no session {session_id!r}", session=session_id)
        with self._lock:
            self._sessions.setdefault(session_id, state)
            self._session_locks.setdefault(session_id, threading.Lock())
        return state

    def lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def persist(self, state: SessionState) -> None:
        if self.snapshot_dir is None:
            return
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        path = self.snapshot_dir / f"{state.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(snapshot(state), sort_keys=True), "utf-8")
        tmp.replace(path)

    def _load(self, session_id: str) -> SessionState | None:
        if self.snapshot_dir is None:
            return None
        path = self.snapshot_dir / f"{session_id}.json"
        if not path.exists():
            return None
        return restore(json.loads(path.read_text("utf-8")), self.package)


def create_app(package: Package, backend: CompletionBackend,
               snapshot_dir: str | Path | None = None,
               cardinality_threshold: int | None = None,
               context_budget: int | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    """Build the FastAPI app for one package and one backend."""
    context_kwargs: dict[str, Any] = {}
    if cardinality_threshold is not None:
        context_kwargs["cardinality_threshold"] = cardinality_threshold
    if context_budget is not None:
        context_kwargs["budget"] = context_budget
    context = build_context(package, **context_kwargs)
    store = SessionStore(package, snapshot_dir)

    app = FastAPI(title="linkboard", version="0.1.0")
    app.state.store = store

    @app.exception_handler(LinkboardError)
    async def _linkboard_error(_request: Request, exc: LinkboardError) -> JSONResponse:
        return JSONResponse(status_code=error_status(exc), content=exc.to_dict())

    @app.post("/sessions")
    def create_session(body: dict | None = None) -> dict:
        requested = (body or {}).get("package")
        if requested is not None and requested != package.name:
            raise UnknownEntity(f"this service hosts {package.name!r}, "
                                f"not {requested!r}")
        state = store.create()
        return {"id": state.id, "version": state.version,
                "counts": entity_counts(package, state.registry)}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        state = store.get(session_id)
        with store.lock(session_id):
            return state_document(state)

    @app.get("/sessions/{session_id}/counts")
    def get_counts(session_id: str) -> dict:
        state = store.get(session_id)
        with store.lock(session_id):
            return entity_counts(package, state.registry)

    @app.post("/sessions/{session_id}/chat")
    def post_chat(session_id: str, body: dict) -> dict:
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            raise InvalidAction("chat needs a non-empty 'text'")
        state = store.get(session_id)
        with store.lock(session_id):
            _check_version(state, body)
            events, reply = chat_turn(state, text, context, backend, package)
            store.persist(state)
            return {"events": events, "reply": reply, "version": state.version}

    @app.patch("/sessions/{session_id}/filters/{name}")
    def patch_filter(session_id: str, name: str, body: dict) -> dict:
        action = AdjustFilter(
            name=name,
            values=_values(body.get("values")),
            intervals=_intervals(body.get("intervals")),
            entity=body.get("entity"),
            fields=tuple(body["fields"]) if "fields" in body else None,
        )
        return _apply(store, session_id, action, body)

    @app.delete("/sessions/{session_id}/filters/{name}")
    def delete_filter(session_id: str, name: str, version: int | None = None) -> dict:
        state = store.get(session_id)
        with store.lock(session_id):
            sel = state.registry.get(name)
            if sel is None:
                raise InvalidAction(f"no selection named {name!r}")
            if sel.kind == "point":
                from .linking import observed_tuples
                action = AdjustFilter(name=name, values=tuple(
                    observed_tuples(package, sel.entity, sel.fields)))
            else:
                action = AdjustFilter(name=name, intervals={
                    f: (None, None) for f in sel.fields})
            events = state.apply(action, expected_version=version)
            store.persist(state)
            return {"events": events, "version": state.version}

    @app.post("/sessions/{session_id}/viz/{viz_id}/brush")
    def post_brush(session_id: str, viz_id: str, body: dict) -> dict:
        action = Brush(viz_id=viz_id, values=_values(body.get("values")),
                       intervals=_intervals(body.get("intervals")),
                       clear=bool(body.get("clear", False)))
        return _apply(store, session_id, action, body)

    @app.patch("/sessions/{session_id}/viz/{viz_id}/fields")
    def patch_fields(session_id: str, viz_id: str, body: dict) -> dict:
        for key in ("channel", "field"):
            if key not in body:
                raise InvalidAction(f"field adjustment needs {key!r}")
        action = AdjustVizField(viz_id=viz_id, channel=body["channel"],
                                field=body["field"])
        return _apply(store, session_id, action, body)

    @app.delete("/sessions/{session_id}/viz/{viz_id}")
    def delete_viz(session_id: str, viz_id: str, version: int | None = None) -> dict:
        return _apply(store, session_id, DismissViz(viz_id=viz_id),
                      {"version": version})

    @app.get("/sessions/{session_id}/download")
    def get_download(session_id: str, entity: str) -> Response:
        state = store.get(session_id)
        with store.lock(session_id):
            data = download(state, entity)
        return Response(
            content=data, media_type="text/csv",
            headers={"Content-Disposition": f'attachment; filename="{entity}.csv"'})

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _check_version(state: SessionState, body: dict) -> None:
    version = body.get("version")
    if version is not None and version != state.version:
        raise StaleVersion(f"expected version {version}, state is at {state.version}",
                           expected=version, actual=state.version)


def _apply(store: SessionStore, session_id: str, action: Any, body: dict) -> dict:
    state = store.get(session_id)
    with store.lock(session_id):
        events = state.apply(action, expected_version=body.get("version"))
        store.persist(state)
        return {"events": events, "version": state.version}


def _values(raw: Any) -> tuple[tuple[Any, ...], ...] | None:
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise MalformedDocument("'values' must be a list of tuples")
    return tuple(tuple(t) if isinstance(t, (list, tuple)) else (t,) for t in raw)


def _intervals(raw: Any) -> dict[str, tuple[float | None, float | None]] | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise MalformedDocument("'intervals' must map field to [min, max]")
    out = {}
    for f, pair in raw.items():
        if not isinstance(pair, list) or len(pair) != 2:
            raise MalformedDocument(f"interval for {f!r} must be [min, max]")
        out[f] = (pair[0], pair[1])
    return out
