"""HTTP application exposing the note store, telemetry intake, and models.

Endpoints (all responses carry ``schema_version``):

    POST   /sessions                  register a session for a participant
    POST   /sessions/{id}/events      batch event intake -> accepted/dropped
    POST   /notes                     create a note (author = X-Participant)
    GET    /notes                     list, filters: country, year, mine_only
    GET    /notes/{id}                fetch one note
    PUT    /notes/{id}                update own note
    DELETE /notes/{id}                delete own note
    GET    /notes/{id}/discussion     citation neighborhood, at most 20 notes
    GET    /scent                     note counts per country and per year
    POST   /characterize              feature map -> per-class probabilities
    GET    /recommend                 mode=similar|diverse&k=N note ranking
    GET    /taxonomy                  action vocabulary and its checksum

Authentication is one static bearer token per deployment; the caller's
identity rides in the ``X-Participant`` header. Request bodies are plain
JSON objects; domain validation happens in the domain modules, so the API
layer stays a thin adapter.
"""

from __future__ import annotations

import dataclasses
import time
from typing import Any

import numpy as np
from fastapi import Body, Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..actions import ActionTaxonomy, default_taxonomy
from ..errors import (
    ConfigError,
    InvalidRefError,
    MalformedRecordError,
    NoModelLoadedError,
    UnknownActionError,
    UnknownFeatureError,
    UnknownNoteError,
)
from ..eventlog import HOVER_MIN_MS
from ..events import event_from_json
from ..features import action_registry, reference_features, reference_registry
from ..notes import Note, note_from_json, note_to_json
from ..refs import require_valid
from .store import NoteStore

SERVICE_SCHEMA_VERSION = 1
_RECOMMEND_MODES = ("similar", "diverse")


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _probabilities(model, X: np.ndarray) -> np.ndarray:
    proba = getattr(model, "predict_proba", None)
    if proba is not None:
        return proba(X)
    # margin-based models expose raw scores; map them through a softmax
    scores = model.scores(X)
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _json(payload: dict, status: int = 200) -> JSONResponse:
    return JSONResponse({"schema_version": SERVICE_SCHEMA_VERSION, **payload}, status_code=status)


def create_app(
    store: NoteStore,
    taxonomy: ActionTaxonomy | None = None,
    token: str | None = None,
    model=None,
    model_doc: dict | None = None,
) -> FastAPI:
    tax = taxonomy or default_taxonomy()
    doc = model_doc or {}
    hover_tokens = tax.hover_tokens()
    action_names = action_registry(tax).names
    reference_names = reference_registry().names

    def require_auth(authorization: str | None = Header(None)) -> None:
        if token is not None and authorization != f"Bearer {token}":
            raise ApiError(401, "missing or invalid bearer token")

    app = FastAPI(title="trailnote service", dependencies=[Depends(require_auth)])

    # ---- error mapping ----

    def _error(status: int, message: str) -> JSONResponse:
        return _json({"error": message}, status)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error(exc.status, exc.message)

    @app.exception_handler(UnknownNoteError)
    async def _unknown_note(request: Request, exc: UnknownNoteError):
        return _error(404, str(exc))

    @app.exception_handler(NoModelLoadedError)
    async def _no_model(request: Request, exc: NoModelLoadedError):
        return _error(409, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _invalid_request(request: Request, exc: RequestValidationError):
        return _error(422, f"invalid request: {exc.errors()[:3]}")

    for exc_type in (
        InvalidRefError,
        UnknownFeatureError,
        UnknownActionError,
        MalformedRecordError,
        ConfigError,
        ValueError,
        KeyError,
        TypeError,
    ):

        @app.exception_handler(exc_type)
        async def _unprocessable(request: Request, exc: Exception):
            return _error(422, f"{type(exc).__name__}: {exc}")

    # ---- shared helpers ----

    def participant_of(x_participant: str | None) -> str:
        if not x_participant:
            raise ApiError(422, "missing X-Participant header")
        return x_participant

    def require_model():
        if model is None:
            raise NoModelLoadedError()
        return model

    def note_from_body(body: dict, note_id: str, author: str, created_at: int) -> Note:
        if not isinstance(body.get("text"), str):
            raise ApiError(422, "note body must contain a 'text' string")
        note = note_from_json(
            {
                "id": note_id,
                "author": author,
                "text": body["text"],
                "refs": body.get("refs", []),
                "created_at": created_at,
                "updated_at": body.get("updated_at", created_at),
                "labels": body.get("labels", {}),
            }
        )
        for ref in note.refs:
            require_valid(ref)
        return note

    def owned_note(note_id: str, participant: str) -> Note:
        note = store.get_note(note_id)
        if note.author != participant:
            raise ApiError(403, "only the author may modify a note")
        return note

    # ---- sessions and events ----

    @app.post("/sessions")
    def create_session(
        body: dict = Body(default={}),
        x_participant: str | None = Header(None),
    ):
        pid = participant_of(x_participant)
        sid = body.get("session_id") or f"s-{len(store.sessions) + 1:06d}"
        if not isinstance(sid, str):
            raise ApiError(422, "session_id must be a string")
        store.create_session(sid, pid)
        return _json({"session_id": sid, "participant": pid}, 201)

    @app.post("/sessions/{session_id}/events")
    def append_events(session_id: str, body: dict = Body(...)):
        if session_id not in store.sessions:
            raise ApiError(404, f"unknown session: {session_id!r}")
        pid = store.sessions[session_id]
        records = body.get("events")
        if not isinstance(records, list):
            raise ApiError(422, "body must contain an 'events' list")
        accepted = []
        dropped = 0
        for rec in records:
            if not isinstance(rec, dict):
                dropped += 1
                continue
            rec = dict(rec)
            rec.setdefault("session", session_id)
            rec.setdefault("participant", pid)
            try:
                ev = event_from_json(rec)
            except (KeyError, TypeError, ValueError):
                dropped += 1
                continue
            if ev.action not in tax:
                dropped += 1
                continue
            if ev.action in hover_tokens and (
                ev.duration_ms is None or ev.duration_ms < HOVER_MIN_MS
            ):
                dropped += 1
                continue
            accepted.append(ev)
        store.append_events(accepted)
        return _json({"accepted": len(accepted), "dropped": dropped})

    # ---- notes ----

    @app.post("/notes")
    def create_note(body: dict = Body(...), x_participant: str | None = Header(None)):
        pid = participant_of(x_participant)
        created = body.get("created_at", int(time.time() * 1000))
        if not isinstance(created, int):
            raise ApiError(422, "created_at must be an integer timestamp")
        # validate fully before allocating an id, so rejected requests
        # do not burn identifiers
        probe = note_from_body(body, "note-000000", pid, created)
        note = dataclasses.replace(probe, id=store.new_note_id())
        store.put_note(note)
        return _json({"note": note_to_json(note)}, 201)

    @app.get("/notes")
    def list_notes(
        country: str | None = Query(None),
        year: int | None = Query(None),
        mine_only: bool = Query(False),
        x_participant: str | None = Header(None),
    ):
        author = participant_of(x_participant) if mine_only else None
        notes = store.list_notes(country=country, year=year, author=author)
        return _json({"notes": [note_to_json(n) for n in notes]})

    @app.get("/notes/{note_id}")
    def get_note(note_id: str):
        return _json({"note": note_to_json(store.get_note(note_id))})

    @app.put("/notes/{note_id}")
    def update_note(
        note_id: str,
        body: dict = Body(...),
        x_participant: str | None = Header(None),
    ):
        pid = participant_of(x_participant)
        old = owned_note(note_id, pid)
        merged = note_to_json(old)
        for field in ("text", "refs", "labels"):
            if field in body:
                merged[field] = body[field]
        merged["updated_at"] = body.get("updated_at", int(time.time() * 1000))
        note = note_from_body(merged, note_id, pid, old.created_at)
        store.put_note(note)
        return _json({"note": note_to_json(note)})

    @app.delete("/notes/{note_id}")
    def delete_note(note_id: str, x_participant: str | None = Header(None)):
        pid = participant_of(x_participant)
        owned_note(note_id, pid)
        store.delete_note(note_id)
        return _json({"deleted": note_id})

    @app.get("/notes/{note_id}/discussion")
    def discussion(note_id: str):
        thread, links = store.discussion_thread(note_id)
        return _json(
            {
                "root": note_id,
                "notes": [note_to_json(n) for n in thread],
                "links": [{"from": src, "to": dst} for src, dst in links],
            }
        )

    @app.get("/scent")
    def scent():
        countries, years = store.scent_counts()
        return _json(
            {
                "countries": dict(sorted(countries.items())),
                "years": {str(y): c for y, c in sorted(years.items())},
            }
        )

    # ---- models ----

    @app.post("/characterize")
    def characterize(body: dict = Body(...)):
        m = require_model()
        features = body.get("features")
        if not isinstance(features, dict):
            raise ApiError(422, "body must contain a 'features' object")
        known = set(m.feature_names)
        for name in features:
            if name not in known:
                raise UnknownFeatureError(name)
        x = np.array([[float(features.get(n, 0.0)) for n in m.feature_names]])
        proba = _probabilities(m, x)[0]
        evaluation = doc.get("evaluation") or {}
        return _json(
            {
                "classes": list(m.classes),
                "probabilities": [float(p) for p in proba],
                "predicted": m.predict(x)[0],
                "kappa_band": evaluation.get("kappa_band"),
            }
        )

    def requester_vector(pid: str) -> np.ndarray:
        m = require_model()
        names = tuple(m.feature_names)
        if names == reference_names:
            own = store.notes_by(pid)
            if not own:
                return np.zeros(len(names))
            rows = [reference_features(n).as_array(reference_registry()) for n in own]
            return np.mean(rows, axis=0)
        if names == action_names:
            counts = store.participant_action_counts(pid)
            return np.array([float(counts.get(n, 0)) for n in names])
        raise ApiError(422, "the loaded model's features cannot be accumulated here")

    def note_class(note: Note, aspect: str | None, reference_kind: bool) -> Any:
        if aspect is not None:
            label = note.labels.get(aspect)
            if label is not None:
                return label
        if reference_kind:
            x = reference_features(note).as_array(reference_registry())
            return model.predict(x[None, :])[0]
        return None

    @app.get("/recommend")
    def recommend(
        mode: str = Query("similar"),
        k: int = Query(5, ge=1),
        x_participant: str | None = Header(None),
    ):
        m = require_model()
        pid = participant_of(x_participant)
        if mode not in _RECOMMEND_MODES:
            raise ApiError(422, f"mode must be one of {_RECOMMEND_MODES}")
        x = requester_vector(pid)
        predicted = m.predict(x[None, :])[0]
        aspect = doc.get("label_aspect")
        reference_kind = tuple(m.feature_names) == reference_names

        matches = []
        for note in store.all_notes():
            if note.author == pid:
                continue
            cls = note_class(note, aspect, reference_kind)
            if cls is None:
                continue
            if (cls == predicted) == (mode == "similar"):
                matches.append(note)
        matches.sort(key=lambda n: (-n.created_at, n.id))
        return _json(
            {
                "mode": mode,
                "k": k,
                "predicted": predicted,
                "notes": [note_to_json(n) for n in matches[:k]],
            }
        )

    @app.get("/taxonomy")
    def taxonomy_endpoint():
        return _json(
            {
                "version": tax.version,
                "checksum": tax.checksum(),
                "actions": [
                    {"token": a.id, "group": a.group, "flags": sorted(a.predictor_flags)}
                    for a in tax
                ],
            }
        )

    return app


def serve(app: FastAPI, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Block serving the app over HTTP."""
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")
