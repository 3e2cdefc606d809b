"""Interaction events and their line-oriented wire format.

One event per line as a compact JSON object with fields ``v, ts, participant,
session, action, target, duration_ms``; optional fields are omitted. The format
is self-delimiting, so concatenating two valid log files yields a valid log.

Targets are entity keys encoded as ``kind:value`` strings, e.g. ``country:FIN``,
``year:1970``, ``note:ab12``, ``chart:map``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, TextIO

from .errors import MalformedRecordError

EVENTS_SCHEMA_VERSION = 1

TARGET_KINDS = ("country", "year", "note", "chart")


@dataclass(frozen=True)
class EntityKey:
    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"bad target kind {self.kind!r}")

    def encode(self) -> str:
        return f"{self.kind}:{self.value}"

    @classmethod
    def decode(cls, raw: str) -> "EntityKey":
        kind, sep, value = raw.partition(":")
        if not sep or not value:
            raise ValueError(f"bad target {raw!r}")
        return cls(kind, value)


def country_key(code: str) -> EntityKey:
    return EntityKey("country", code)


def year_key(year: int) -> EntityKey:
    return EntityKey("year", str(year))


def note_key(note_id: str) -> EntityKey:
    return EntityKey("note", note_id)


@dataclass(frozen=True)
class InteractionEvent:
    session_id: str
    participant_id: str
    timestamp: int
    action: str
    target: EntityKey | None = None
    duration_ms: int | None = None

    def __post_init__(self):
        if self.duration_ms is not None and self.duration_ms < 0:
            raise ValueError("duration_ms must be nonnegative")


def event_to_json(ev: InteractionEvent) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "v": EVENTS_SCHEMA_VERSION,
        "ts": ev.timestamp,
        "participant": ev.participant_id,
        "session": ev.session_id,
        "action": ev.action,
    }
    if ev.target is not None:
        obj["target"] = ev.target.encode()
    if ev.duration_ms is not None:
        obj["duration_ms"] = ev.duration_ms
    return obj


def event_from_json(obj: dict[str, Any]) -> InteractionEvent:
    target = obj.get("target")
    return InteractionEvent(
        session_id=obj["session"],
        participant_id=obj["participant"],
        timestamp=int(obj["ts"]),
        action=obj["action"],
        target=EntityKey.decode(target) if target is not None else None,
        duration_ms=obj.get("duration_ms"),
    )


def write_events(events: Iterable[InteractionEvent], fh: TextIO) -> None:
    for ev in events:
        fh.write(json.dumps(event_to_json(ev), separators=(",", ":"), ensure_ascii=False))
        fh.write("\n")


def read_event_lines(fh: TextIO) -> Iterable[tuple[int, InteractionEvent]]:
    """Yield (line_no, event); malformed lines raise with their line number."""
    for line_no, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(line_no, f"not valid JSON: {exc}") from exc
        try:
            yield line_no, event_from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecordError(line_no, str(exc)) from exc
