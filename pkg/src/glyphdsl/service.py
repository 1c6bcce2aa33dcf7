"""Session HTTP service: document lifecycle, operation batches, NL turns
with confirm, live SVG preview with ETags, and file-backed persistence.

One directory per session holds doc.gdsl.json and history.json; writes go
through a temp file + rename so a crash never leaves a torn document.
Requests to one session serialize on a per-session lock.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import infer as infer_mod
from . import layout, nlcmd, ops, serialize, svgread
from .errors import GlyphError, GlyphWarning
from .model import GlyphDocument, empty_document
from .nlcmd import LlmBackend, ParseResult, backend_from_env
from .render import SvgConfig, render_svg

PREVIEW_CONFIG = SvgConfig()


@dataclass
class ServiceConfig:
    data_dir: Path = Path("./sessions")
    cors_origin: str = "*"
    ui_dir: Optional[Path] = None
    backend: Optional[LlmBackend] = None


@dataclass
class Session:
    session_id: str
    doc: GlyphDocument
    history: ops.EditHistory = field(default_factory=ops.EditHistory)
    pending_parse: Optional[ParseResult] = None


class SessionStore:
    """Disk-backed sessions; the in-memory map is a cache over the data dir."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _session_dir(self, session_id: str) -> Path:
        return self.data_dir / session_id

    def create(self, doc: GlyphDocument) -> Session:
        session_id = uuid.uuid4().hex
        session = Session(session_id, doc)
        with self._registry_lock:
            self._sessions[session_id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Optional[Session]:
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        sdir = self._session_dir(session_id)
        doc_path = sdir / "doc.gdsl.json"
        if not doc_path.exists():
            return None
        doc = serialize.deserialize(doc_path.read_bytes())
        history = _history_from_data(json.loads((sdir / "history.json").read_text("utf-8")))
        session = Session(session_id, doc, history)
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def persist(self, session: Session) -> None:
        sdir = self._session_dir(session.session_id)
        sdir.mkdir(parents=True, exist_ok=True)
        _atomic_write(sdir / "doc.gdsl.json", serialize.serialize(session.doc))
        payload = json.dumps(_history_to_data(session.history), sort_keys=True).encode("utf-8")
        _atomic_write(sdir / "history.json", payload)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _history_to_data(history: ops.EditHistory) -> list:
    return [{"op": ops.op_to_data(e.op), "versionBefore": e.version_before,
             "versionAfter": e.version_after} for e in history.entries]


def _history_from_data(data: list) -> ops.EditHistory:
    history = ops.EditHistory()
    for entry in data:
        history.entries.append(ops.HistoryEntry(ops.op_from_data(entry["op"]),
                                                entry["versionBefore"],
                                                entry["versionAfter"]))
    return history


def _error_response(status: int, exc: Exception, **extra) -> JSONResponse:
    body = {"error": getattr(exc, "code", type(exc).__name__), "message": str(exc)}
    body.update(extra)
    return JSONResponse(body, status_code=status)


def create_app(config: ServiceConfig = ServiceConfig()) -> FastAPI:
    app = FastAPI(title="glyphdsl session service")
    store = SessionStore(config.data_dir)
    backend = config.backend if config.backend is not None else backend_from_env()
    app.state.store = store

    if config.cors_origin:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=[config.cors_origin],
                           allow_methods=["*"], allow_headers=["*"])

    def _fetch(session_id: str) -> Optional[Session]:
        return store.get(session_id)

    @app.get("/config")
    def get_config():
        return {"service": "glyphdsl", "previewPath": "preview.svg"}

    @app.post("/sessions")
    async def create_session(request: Request):
        raw = await request.body()
        if raw.strip():
            try:
                doc = serialize.deserialize(raw)
            except GlyphError as exc:
                return _error_response(400, exc)
        else:
            doc = empty_document()
        session = store.create(doc)
        return {"sessionId": session.session_id}

    @app.post("/sessions/{session_id}/ops")
    async def post_ops(session_id: str, request: Request):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        try:
            op_list = json.loads(await request.body())
            operations = [ops.op_from_data(d) for d in op_list]
        except (ValueError, KeyError, TypeError) as exc:
            return _error_response(400, exc)
        with store.lock(session_id):
            doc = session.doc
            applied = []
            collected: list[str] = []
            for k, op in enumerate(operations):
                try:
                    with warnings.catch_warnings(record=True) as caught:
                        warnings.simplefilter("always", GlyphWarning)
                        before = doc.version
                        doc = ops.apply(doc, op)
                    collected.extend(str(w.message) for w in caught)
                    applied.append(ops.HistoryEntry(op, before, doc.version))
                except GlyphError as exc:
                    return _error_response(409, exc, index=k)
            session.doc = doc
            session.history.entries.extend(applied)
            store.persist(session)
            return {"version": session.doc.version, "warnings": collected}

    @app.post("/sessions/{session_id}/nl")
    async def post_nl(session_id: str, request: Request):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        try:
            body = json.loads(await request.body())
        except ValueError as exc:
            return _error_response(400, exc)
        text = body.get("text", "")
        selection = body.get("selection")
        with store.lock(session_id):
            result = nlcmd.parse_command(text, session.doc, selection=selection,
                                         backend=backend)
            session.pending_parse = result if result.outcome == "proposal" else None
            return nlcmd.parse_result_to_data(result)

    @app.post("/sessions/{session_id}/nl/confirm")
    async def post_nl_confirm(session_id: str, request: Request):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        raw = await request.body()
        try:
            body = json.loads(raw) if raw.strip() else {}
        except ValueError as exc:
            return _error_response(400, exc)
        with store.lock(session_id):
            if session.pending_parse is None:
                return _error_response(409, GlyphError("no pending proposal"))
            result = session.pending_parse
            try:
                for slot_id, value in (body.get("slotOverrides") or {}).items():
                    result = nlcmd.fill_slot(result, slot_id, value)
            except GlyphError as exc:
                return _error_response(400, exc)
            try:
                before = session.doc.version
                session.doc = ops.apply(session.doc, result.operation)
            except GlyphError as exc:
                return _error_response(409, exc)
            session.history.entries.append(
                ops.HistoryEntry(result.operation, before, session.doc.version))
            session.pending_parse = None
            store.persist(session)
            return {"version": session.doc.version}

    @app.get("/sessions/{session_id}/preview.svg")
    def get_preview(session_id: str, request: Request, annotate: int = 0):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        doc_bytes = serialize.serialize(session.doc)
        etag = '"' + hashlib.sha256(doc_bytes + b"|annotate=%d" % annotate).hexdigest() + '"'
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        cfg = PREVIEW_CONFIG if not annotate else SvgConfig(annotate=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GlyphWarning)
            svg = render_svg(layout.instantiate(session.doc), cfg)
        return Response(svg, media_type="image/svg+xml", headers={"ETag": etag})

    @app.post("/sessions/{session_id}/infer")
    async def post_infer(session_id: str, request: Request):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        raw = await request.body()
        with store.lock(session_id):
            try:
                elements = svgread.parse_svg(raw)
                inferred = infer_mod.infer_structure(
                    elements, existing_ids=tuple(session.doc.containers))
            except GlyphError as exc:
                return _error_response(400, exc)
            doc = session.doc
            added = []
            for cid, container in inferred.containers.items():
                doc = doc.with_container(container)
                added.append(cid)
            if doc.root is None:
                doc = doc.__class__(root=inferred.root, containers=doc.containers,
                                    rng_seed=doc.rng_seed, version=doc.version)
            from dataclasses import replace as dc_replace
            session.doc = dc_replace(doc, version=doc.version + 1)
            store.persist(session)
            return {"addedContainerIds": sorted(added)}

    @app.get("/sessions/{session_id}/document")
    def get_document(session_id: str):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        return Response(serialize.serialize(session.doc), media_type="application/json")

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str):
        session = _fetch(session_id)
        if session is None:
            return Response(status_code=404)
        with store.lock(session_id):
            doc_bytes = serialize.serialize(session.doc)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", GlyphWarning)
                svg = render_svg(layout.instantiate(session.doc), PREVIEW_CONFIG)
            sdir = store.data_dir / session_id
            sdir.mkdir(parents=True, exist_ok=True)
            _atomic_write(sdir / "export.svg", svg)
            _atomic_write(sdir / "export.gdsl.json", doc_bytes)
            return {"svg": svg.decode("utf-8"), "gdsl": json.loads(doc_bytes)}

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
