"""Entity references: the six citation kinds a note can attach.

Each kind carries a fixed payload shape. A map citation names the year the
map displayed; a map point pins one country at one year with its value; a
line names one country's whole series; a vertical reference line names one
year across the currently selected countries; a line chart names the selected
country set; a note citation points at a prior note.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidRefError

YEAR_MIN = 1960
YEAR_MAX = 2013

REF_KINDS = (
    "map",
    "line_chart",
    "map_point",
    "line",
    "vertical_reference_line",
    "note",
)


@dataclass(frozen=True)
class EntityRef:
    kind: str
    year: int | None = None
    countries: tuple[str, ...] = field(default=())
    value: float | None = None
    note_id: str | None = None


@dataclass(frozen=True)
class RefVerdict:
    ok: bool
    rule: str | None = None

    def __bool__(self) -> bool:
        return self.ok


_OK = RefVerdict(True)


def _fail(rule: str) -> RefVerdict:
    return RefVerdict(False, rule)


def validate_ref(ref: EntityRef) -> RefVerdict:
    """Check the kind-specific payload invariant; returns a verdict, never raises."""
    if ref.kind not in REF_KINDS:
        return _fail(f"unknown kind {ref.kind!r}")
    if len(set(ref.countries)) != len(ref.countries):
        return _fail(f"{ref.kind} countries contain duplicates")
    if ref.year is not None and not (YEAR_MIN <= ref.year <= YEAR_MAX):
        return _fail(f"year {ref.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
    if ref.kind != "note" and ref.note_id is not None:
        return _fail(f"{ref.kind} must not carry a note_id")

    if ref.kind == "map":
        if ref.year is None:
            return _fail("map requires a year")
        if ref.countries:
            return _fail("map must not carry countries")
        if ref.value is not None:
            return _fail("map must not carry a value")
    elif ref.kind == "line_chart":
        if len(ref.countries) < 1:
            return _fail("line_chart requires at least one country")
        if ref.year is not None:
            return _fail("line_chart must not carry a year")
        if ref.value is not None:
            return _fail("line_chart must not carry a value")
    elif ref.kind == "map_point":
        if ref.year is None:
            return _fail("map_point requires a year")
        if len(ref.countries) != 1:
            return _fail("map_point requires exactly one country")
        if ref.value is None:
            return _fail("map_point requires a value")
    elif ref.kind == "line":
        if len(ref.countries) != 1:
            return _fail("line requires exactly one country")
        if ref.year is not None:
            return _fail("line must not carry a year")
        if ref.value is not None:
            return _fail("line must not carry a value")
    elif ref.kind == "vertical_reference_line":
        if ref.year is None:
            return _fail("vertical_reference_line requires a year")
        if len(ref.countries) < 1:
            return _fail("vertical_reference_line requires at least one country")
        if ref.value is not None:
            return _fail("vertical_reference_line must not carry a value")
    else:  # note
        if ref.note_id is None:
            return _fail("note requires a note_id")
        if ref.year is not None or ref.countries or ref.value is not None:
            return _fail("note must not carry other payloads")
    return _OK


def require_valid(ref: EntityRef) -> EntityRef:
    verdict = validate_ref(ref)
    if not verdict:
        raise InvalidRefError(verdict.rule or "invalid")
    return ref


def ref_to_json(ref: EntityRef) -> dict[str, Any]:
    """Canonical JSON object; absent payload fields are omitted."""
    obj: dict[str, Any] = {"kind": ref.kind}
    if ref.year is not None:
        obj["year"] = ref.year
    if ref.countries:
        obj["countries"] = list(ref.countries)
    if ref.value is not None:
        obj["value"] = ref.value
    if ref.note_id is not None:
        obj["note_id"] = ref.note_id
    return obj


def ref_from_json(obj: dict[str, Any]) -> EntityRef:
    return EntityRef(
        kind=obj["kind"],
        year=obj.get("year"),
        countries=tuple(obj.get("countries", ())),
        value=obj.get("value"),
        note_id=obj.get("note_id"),
    )


def ref_countries(ref: EntityRef) -> tuple[str, ...]:
    return ref.countries


def ref_years(ref: EntityRef) -> tuple[int, ...]:
    return (ref.year,) if ref.year is not None else ()
