"""HTTP backend: durable note store, telemetry intake, model endpoints."""

from .app import SERVICE_SCHEMA_VERSION, create_app, serve
from .store import NoteStore

__all__ = ["NoteStore", "SERVICE_SCHEMA_VERSION", "create_app", "serve"]
