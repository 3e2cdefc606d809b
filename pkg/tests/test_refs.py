"""Per-kind payload rules for entity references."""

import pytest
from hypothesis import given
from hypothesis import strategies as hs

from trailnote.errors import InvalidRefError
from trailnote.refs import (
    REF_KINDS,
    YEAR_MAX,
    YEAR_MIN,
    EntityRef,
    ref_from_json,
    ref_to_json,
    require_valid,
    validate_ref,
)

VALID_EXAMPLES = [
    EntityRef("map", year=2013),
    EntityRef("line_chart", countries=("SWE",)),
    EntityRef("line_chart", countries=("FIN", "SWE", "NOR")),
    EntityRef("map_point", year=2013, countries=("SWE",), value=37.5),
    EntityRef("line", countries=("FIN",)),
    EntityRef("vertical_reference_line", year=1970, countries=("FIN", "SWE")),
    EntityRef("note", note_id="note-000001"),
]

INVALID_EXAMPLES = [
    EntityRef("map"),  # no year
    EntityRef("map", year=2013, countries=("SWE",)),  # stray countries
    EntityRef("map", year=2013, value=1.0),  # stray value
    EntityRef("line_chart", countries=()),  # empty selection
    EntityRef("line_chart", countries=("SWE",), year=2000),  # stray year
    EntityRef("map_point", year=2013, countries=("SWE",)),  # no value
    EntityRef("map_point", year=2013, countries=("SWE", "FIN"), value=1.0),
    EntityRef("map_point", countries=("SWE",), value=1.0),  # no year
    EntityRef("line", countries=("SWE", "FIN")),  # too many
    EntityRef("line", countries=()),  # too few
    EntityRef("line", countries=("SWE",), year=1999),  # stray year
    EntityRef("vertical_reference_line", year=1970),  # no countries
    EntityRef("vertical_reference_line", countries=("FIN",)),  # no year
    EntityRef("note"),  # no note id
    EntityRef("note", note_id="note-000001", year=2000),  # stray payload
    EntityRef("map", year=1959),  # below range
    EntityRef("map", year=2014),  # above range
    EntityRef("line_chart", countries=("SWE", "SWE")),  # duplicates
    EntityRef("hologram", year=2000),  # unknown kind
    EntityRef("line", countries=("SWE",), note_id="note-000001"),  # stray note id
]


def test_ref_kind_order_is_stable():
    assert REF_KINDS == (
        "map",
        "line_chart",
        "map_point",
        "line",
        "vertical_reference_line",
        "note",
    )


@pytest.mark.parametrize("ref", VALID_EXAMPLES, ids=lambda r: r.kind)
def test_valid_payloads_pass(ref):
    verdict = validate_ref(ref)
    assert verdict.ok and verdict.rule is None
    assert require_valid(ref) is ref


@pytest.mark.parametrize("ref", INVALID_EXAMPLES, ids=range(len(INVALID_EXAMPLES)))
def test_invalid_payloads_fail(ref):
    verdict = validate_ref(ref)
    assert not verdict.ok
    assert verdict.rule
    with pytest.raises(InvalidRefError):
        require_valid(ref)


def test_year_range_boundaries():
    assert validate_ref(EntityRef("map", year=YEAR_MIN)).ok
    assert validate_ref(EntityRef("map", year=YEAR_MAX)).ok
    assert not validate_ref(EntityRef("map", year=YEAR_MIN - 1)).ok
    assert not validate_ref(EntityRef("map", year=YEAR_MAX + 1)).ok


@pytest.mark.parametrize("ref", VALID_EXAMPLES, ids=lambda r: r.kind)
def test_json_round_trip(ref):
    assert ref_from_json(ref_to_json(ref)) == ref


def test_json_omits_absent_fields():
    obj = ref_to_json(EntityRef("map", year=2013))
    assert obj == {"kind": "map", "year": 2013}
    obj = ref_to_json(EntityRef("note", note_id="note-000007"))
    assert obj == {"kind": "note", "note_id": "note-000007"}


@given(
    kind=hs.sampled_from(REF_KINDS),
    year=hs.one_of(hs.none(), hs.integers(min_value=1900, max_value=2100)),
    countries=hs.lists(hs.sampled_from(["SWE", "FIN", "NOR", "DNK"]), max_size=4).map(tuple),
    value=hs.one_of(hs.none(), hs.floats(allow_nan=False, allow_infinity=False)),
    note_id=hs.one_of(hs.none(), hs.just("note-000001")),
)
def test_round_trip_preserves_any_valid_ref(kind, year, countries, value, note_id):
    ref = EntityRef(kind, year=year, countries=countries, value=value, note_id=note_id)
    if validate_ref(ref).ok:
        assert ref_from_json(ref_to_json(ref)) == ref
