"""Note feature vectors, participant aggregates, and the CSV table format."""

import io

import numpy as np
import pytest

from trailnote.errors import (
    ConfigError,
    InvalidRefError,
    MissingSaveEventError,
    UnknownFeatureError,
)
from trailnote.eventlog import ingest
from trailnote.events import country_key, note_key, year_key
from trailnote.features import (
    FeatureMatrix,
    FeatureVector,
    action_features,
    action_registry,
    build_matrix,
    note_window,
    participant_aggregates,
    pattern_features,
    pattern_registry,
    read_matrix,
    reference_features,
    reference_registry,
    write_matrix,
)
from trailnote.mining import Trail, mine_patterns
from trailnote.notes import Note, NoteLabels
from trailnote.refs import EntityRef

from conftest import make_event


def note(note_id, author="p01", refs=(), labels=None, created_at=0):
    return Note(
        id=note_id,
        author=author,
        text="some text",
        refs=tuple(refs),
        created_at=created_at,
        updated_at=created_at,
        labels=labels or NoteLabels(),
    )


def session_with_two_notes():
    events = [
        make_event("select_country", 0, target=country_key("FIN")),
        make_event("show_notes", 1),
        make_event("select_country", 2, target=country_key("SWE")),
        make_event("save_note", 3, target=note_key("n1")),
        make_event("show_notes", 4),
        make_event("show_notes", 5),
        make_event("save_note", 6, target=note_key("n2")),
    ]
    return ingest(events)["p01"]


# ---- windows ----


def test_window_is_cumulative_and_inclusive():
    log = session_with_two_notes()
    w1 = note_window(note("n1"), log)
    w2 = note_window(note("n2"), log)
    assert [ev.timestamp for ev in w1] == [0, 1, 2, 3]
    assert [ev.timestamp for ev in w2] == [0, 1, 2, 3, 4, 5, 6]


def test_window_extends_to_last_update():
    events = [
        make_event("save_note", 0, target=note_key("n1")),
        make_event("show_notes", 1),
        make_event("update_note", 2, target=note_key("n1")),
    ]
    log = ingest(events)["p01"]
    w = note_window(note("n1"), log)
    assert [ev.timestamp for ev in w] == [0, 1, 2]


def test_window_requires_save_event():
    log = session_with_two_notes()
    with pytest.raises(MissingSaveEventError):
        note_window(note("n3"), log)


def test_window_policy_must_be_known():
    log = session_with_two_notes()
    with pytest.raises(ConfigError):
        note_window(note("n1"), log, policy="whole_session")


def test_declared_policy_not_implemented():
    log = session_with_two_notes()
    with pytest.raises(ConfigError):
        note_window(note("n1"), log, policy="since_previous_note")


# ---- action counts ----


def test_action_counts_two_windows():
    log = session_with_two_notes()
    v1 = action_features(note("n1"), log)
    v2 = action_features(note("n2"), log)
    assert v1.values["select_country"] == 2.0
    assert v1.values["show_notes"] == 1.0
    assert v2.values["select_country"] == 2.0
    assert v2.values["show_notes"] == 3.0


def test_action_counts_skip_non_predictor_tokens():
    # save_note is logged but is not one of the 35 predictors.
    log = session_with_two_notes()
    v = action_features(note("n2"), log)
    assert "save_note" not in v.values
    assert sum(v.values.values()) == 5.0


def test_action_registry_size(taxonomy):
    assert len(action_registry(taxonomy)) == 35


# ---- reference counts ----


def test_reference_counts_frozen_example():
    refs = [
        EntityRef("map", year=2013),
        EntityRef("vertical_reference_line", year=1970, countries=("FIN", "SWE")),
    ]
    v = reference_features(note("n1", refs=refs))
    assert v.values["ref_map"] == 1.0
    assert v.values["ref_vertical_reference_line"] == 1.0
    assert v.values["ref_line"] == 0.0
    assert v.values["unique_countries"] == 2.0
    assert v.values["unique_years"] == 2.0


def test_reference_counts_deduplicate_entities():
    refs = [
        EntityRef("line", countries=("FIN",)),
        EntityRef("line_chart", countries=("FIN", "SWE")),
        EntityRef("map_point", year=2000, countries=("FIN",), value=1.5),
        EntityRef("map", year=2000),
    ]
    v = reference_features(note("n1", refs=refs))
    assert v.values["unique_countries"] == 2.0
    assert v.values["unique_years"] == 1.0


def test_reference_counts_validate_refs():
    with pytest.raises(InvalidRefError):
        reference_features(note("n1", refs=[EntityRef("map")]))


def test_reference_registry_names():
    assert reference_registry().names == (
        "ref_map",
        "ref_line_chart",
        "ref_map_point",
        "ref_line",
        "ref_vertical_reference_line",
        "ref_note",
        "unique_countries",
        "unique_years",
    )


# ---- pattern counts ----


def test_pattern_counts_over_window():
    trails = [
        Trail("q1", ("select_country", "show_notes") * 3),
        Trail("q2", ("select_country", "show_notes")),
    ]
    ps = mine_patterns(trails, t1_fraction=0.5, t2_fraction=0.5)
    names = pattern_registry(ps).names
    assert "select_country>show_notes" in names

    log = session_with_two_notes()
    v = pattern_features(note("n2"), log, ps)
    # n2's normalized window is select, show, select, save, show, save: the
    # two trailing show events collapse, leaving one select>show match.
    assert v.values["select_country>show_notes"] == 1.0

    events = [
        make_event("select_country", 0, target=country_key("FIN")),
        make_event("show_notes", 1),
        make_event("select_country", 2, target=country_key("SWE")),
        make_event("show_notes", 3),
        make_event("save_note", 4, target=note_key("n9")),
    ]
    log2 = ingest(events)["p01"]
    v2 = pattern_features(note("n9"), log2, ps)
    assert v2.values["select_country>show_notes"] == 2.0


def test_vector_rejects_unknown_names():
    reg = reference_registry()
    v = FeatureVector("n1", "p01", "reference_counts", {"made_up": 1.0})
    with pytest.raises(UnknownFeatureError):
        v.as_array(reg)


def test_vector_rejects_negative_values():
    with pytest.raises(ValueError):
        FeatureVector("n1", "p01", "action_counts", {"show_notes": -1.0})


# ---- participant aggregates ----


def test_aggregate_label_means():
    logs = ingest(
        [
            make_event("save_note", 0, participant="p01", target=note_key("n1")),
            make_event("save_note", 0, participant="p02", target=note_key("n2")),
        ]
    )
    notes = [
        note("n1", author="p01", labels=NoteLabels(overview_detail=0.0)),
        note("n1b", author="p01", labels=NoteLabels(overview_detail=1.0)),
        note("n2", author="p02", labels=NoteLabels(overview_detail=0.0)),
        note("n2b", author="p02", labels=NoteLabels(overview_detail=0.5)),
        note("n2c", author="p02", labels=NoteLabels()),  # omitted label skipped
    ]
    aggs = {a.participant_id: a for a in participant_aggregates(notes, logs)}
    assert aggs["p01"].mean_overview_detail == 0.5
    assert aggs["p02"].mean_overview_detail == 0.25
    assert aggs["p01"].n_notes == 2
    assert aggs["p02"].n_notes == 3


def test_aggregate_without_labels_is_none():
    logs = ingest([make_event("save_note", 0, target=note_key("n1"))])
    aggs = participant_aggregates([note("n1")], logs)
    assert aggs[0].mean_overview_detail is None
    assert aggs[0].mean_prior_knowledge is None


def test_aggregate_counts_groups_and_categories():
    logs = ingest(
        [
            make_event("select_country", 0, target=country_key("FIN")),
            make_event("show_notes", 1),
            make_event("save_note", 2, target=note_key("n1")),
            make_event("start_session", 3),
        ]
    )
    notes = [
        note("n1", labels=NoteLabels(category="comparison")),
        note("n1b", labels=NoteLabels(category="comparison")),
        note("n1c", labels=NoteLabels(category="statement")),
    ]
    agg = participant_aggregates(notes, logs)[0]
    assert agg.category_counts == {"statement": 1, "comparison": 2, "grouping": 0}
    assert agg.action_group_counts == {
        "data-exploration": 1,
        "note-exploration": 1,
        "edit": 1,
    }
    assert agg.reference_type_means["map"] == 0.0


def test_aggregate_reference_means():
    logs = ingest([make_event("save_note", 0, target=note_key("n1"))])
    notes = [
        note("n1", refs=[EntityRef("map", year=2000), EntityRef("map", year=2001)]),
        note("n1b", refs=[]),
    ]
    agg = participant_aggregates(notes, logs)[0]
    assert agg.reference_type_means["map"] == 1.0


# ---- matrices ----


def matrix_fixture():
    log = session_with_two_notes()
    notes = [
        note("n2", refs=[EntityRef("map", year=2013)], labels=NoteLabels(category="statement")),
        note(
            "n1",
            refs=[EntityRef("line_chart", countries=("FIN", "SWE"))],
            labels=NoteLabels(category="comparison", overview_detail=0.5),
        ),
    ]
    return notes, {"p01": log}


def test_build_matrix_row_order_is_save_time():
    notes, logs = matrix_fixture()
    m = build_matrix(notes, logs, kinds=("reference_counts",), label_aspect="category")
    assert m.note_ids == ("n1", "n2")
    assert m.labels == ("comparison", "statement")
    assert m.X.shape == (2, 8)


def test_build_matrix_combined_kinds():
    notes, logs = matrix_fixture()
    m = build_matrix(notes, logs, kinds=("action_counts", "reference_counts"))
    assert m.X.shape == (2, 43)
    assert m.feature_names[:2] != ("ref_map", "ref_line_chart")
    assert "unique_years" in m.feature_names


def test_build_matrix_drop_unlabeled():
    notes, logs = matrix_fixture()
    m = build_matrix(
        notes, logs, kinds=("reference_counts",), label_aspect="overview_detail",
        drop_unlabeled=True,
    )
    assert m.note_ids == ("n1",)
    assert m.labels == (0.5,)


def test_build_matrix_rejects_unknown_kind():
    notes, logs = matrix_fixture()
    with pytest.raises(ConfigError):
        build_matrix(notes, logs, kinds=("vibes",))


def test_build_matrix_pattern_kind_needs_patterns():
    notes, logs = matrix_fixture()
    with pytest.raises(ConfigError):
        build_matrix(notes, logs, kinds=("pattern_counts",))


def test_matrix_csv_round_trip_bit_exact():
    names = ("alpha", "beta")
    X = np.array([[0.1, 1 / 3], [1e-17, 123456.789012345]])
    m = FeatureMatrix(
        note_ids=("n1", "n2"),
        participant_ids=("p01", "p02"),
        feature_names=names,
        X=X,
        labels=("statement", None),
        label_aspect="category",
    )
    buf = io.StringIO()
    write_matrix(m, buf)
    buf.seek(0)
    again = read_matrix(buf, label_aspect="category")
    assert again.note_ids == m.note_ids
    assert again.participant_ids == m.participant_ids
    assert again.feature_names == m.feature_names
    assert again.labels == m.labels
    assert again.X.tobytes() == m.X.tobytes()


def test_matrix_csv_numeric_labels_round_trip():
    m = FeatureMatrix(
        note_ids=("n1", "n2", "n3"),
        participant_ids=("p01", "p01", "p01"),
        feature_names=("alpha",),
        X=np.array([[1.0], [2.0], [3.0]]),
        labels=(0.5, 3, None),
    )
    buf = io.StringIO()
    write_matrix(m, buf)
    buf.seek(0)
    again = read_matrix(buf)
    assert again.labels == (0.5, 3, None)
    assert isinstance(again.labels[0], float) and isinstance(again.labels[1], int)


def test_read_matrix_rejects_bad_header():
    with pytest.raises(ConfigError):
        read_matrix(io.StringIO("a,b,c\n"))


def test_read_matrix_rejects_ragged_rows():
    text = "note_id,participant_id,alpha,label\nn1,p01,1.0\n"
    with pytest.raises(ConfigError):
        read_matrix(io.StringIO(text))


def test_matrix_shape_validation():
    with pytest.raises(ValueError):
        FeatureMatrix(
            note_ids=("n1",),
            participant_ids=("p01", "p02"),
            feature_names=("alpha",),
            X=np.zeros((2, 1)),
            labels=(None, None),
        )
