"""Notes: free text plus ordered entity references and rater-assigned labels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, TextIO

from .errors import InvalidRefError, MalformedRecordError
from .refs import EntityRef, ref_from_json, ref_to_json, validate_ref

CATEGORIES = ("statement", "comparison", "grouping")
OVERVIEW_DETAIL_VALUES = (0.0, 0.5, 1.0)

NOTES_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NoteLabels:
    """Rater-assigned characteristics; every aspect is optional.

    ``overview_detail`` uses 0 for an overview, 1 for specific values, and
    0.5 for a mix. Raters omit aspects that do not apply (e.g. correctness of
    a note that never touches the data), so classifiers must drop rows lacking
    their target label rather than imputing.
    """

    category: str | None = None
    overview_detail: float | None = None
    prior_knowledge: int | None = None
    correctness: int | None = None
    chart_relevance: int | None = None
    mentioned_countries: int = 0
    mentioned_years: int = 0
    mentioned_values: int = 0

    def __post_init__(self):
        if self.category is not None and self.category not in CATEGORIES:
            raise ValueError(f"bad category {self.category!r}")
        if self.overview_detail is not None and self.overview_detail not in OVERVIEW_DETAIL_VALUES:
            raise ValueError(f"overview_detail must be one of {OVERVIEW_DETAIL_VALUES}")
        for name in ("prior_knowledge", "correctness", "chart_relevance"):
            v = getattr(self, name)
            if v is not None and v not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1")
        for name in ("mentioned_countries", "mentioned_years", "mentioned_values"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def get(self, target: str):
        return getattr(self, target)


EMPTY_LABELS = NoteLabels()


@dataclass(frozen=True)
class Note:
    id: str
    author: str
    text: str
    refs: tuple[EntityRef, ...] = field(default=())
    created_at: int = 0
    updated_at: int = 0
    labels: NoteLabels = EMPTY_LABELS

    def with_labels(self, labels: NoteLabels) -> "Note":
        return replace(self, labels=labels)


def validate_note_refs(note: Note) -> None:
    for ref in note.refs:
        verdict = validate_ref(ref)
        if not verdict:
            raise InvalidRefError(f"note {note.id}: {verdict.rule}")


def _labels_to_json(labels: NoteLabels) -> dict[str, Any]:
    obj: dict[str, Any] = {}
    for name in ("category", "overview_detail", "prior_knowledge", "correctness", "chart_relevance"):
        v = getattr(labels, name)
        if v is not None:
            obj[name] = v
    obj["mentioned"] = {
        "countries": labels.mentioned_countries,
        "years": labels.mentioned_years,
        "values": labels.mentioned_values,
    }
    return obj


def _labels_from_json(obj: dict[str, Any]) -> NoteLabels:
    mentioned = obj.get("mentioned", {})
    return NoteLabels(
        category=obj.get("category"),
        overview_detail=obj.get("overview_detail"),
        prior_knowledge=obj.get("prior_knowledge"),
        correctness=obj.get("correctness"),
        chart_relevance=obj.get("chart_relevance"),
        mentioned_countries=mentioned.get("countries", 0),
        mentioned_years=mentioned.get("years", 0),
        mentioned_values=mentioned.get("values", 0),
    )


def note_to_json(note: Note) -> dict[str, Any]:
    return {
        "v": NOTES_SCHEMA_VERSION,
        "id": note.id,
        "author": note.author,
        "text": note.text,
        "refs": [ref_to_json(r) for r in note.refs],
        "created_at": note.created_at,
        "updated_at": note.updated_at,
        "labels": _labels_to_json(note.labels),
    }


def note_from_json(obj: dict[str, Any]) -> Note:
    return Note(
        id=obj["id"],
        author=obj["author"],
        text=obj["text"],
        refs=tuple(ref_from_json(r) for r in obj.get("refs", [])),
        created_at=obj.get("created_at", 0),
        updated_at=obj.get("updated_at", 0),
        labels=_labels_from_json(obj.get("labels", {})),
    )


def write_notes(notes: Iterable[Note], fh: TextIO) -> None:
    for note in notes:
        fh.write(json.dumps(note_to_json(note), separators=(",", ":"), ensure_ascii=False))
        fh.write("\n")


def read_notes(fh: TextIO) -> list[Note]:
    notes = []
    for line_no, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            notes.append(note_from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedRecordError(line_no, str(exc)) from exc
    return notes
