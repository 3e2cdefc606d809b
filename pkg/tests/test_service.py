"""Note store durability and HTTP service behavior."""

import json
import random

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import make_event
from trailnote.actions import default_taxonomy
from trailnote.errors import MalformedRecordError, UnknownNoteError
from trailnote.features import reference_registry
from trailnote.learn.forest import train_forest
from trailnote.notes import Note, NoteLabels, note_from_json
from trailnote.refs import EntityRef
from trailnote.service.app import create_app
from trailnote.service.store import NoteStore


def note(nid, author, refs=(), created=0, labels=None, text="t"):
    return Note(
        id=nid,
        author=author,
        text=text,
        refs=tuple(refs),
        created_at=created,
        updated_at=created,
        labels=labels or NoteLabels(),
    )


# ---- store ----


def test_store_crud_and_listing(tmp_path):
    store = NoteStore(tmp_path)
    assert store.new_note_id() == "note-000001"
    a = note("note-000001", "p1", [EntityRef("map", year=2000)], created=5)
    b = note("note-000002", "p2", [EntityRef("line", countries=("FIN",))], created=9)
    store.put_note(a)
    store.put_note(b)
    assert store.get_note("note-000001") == a
    assert store.list_notes() == [b, a]  # newest first
    assert store.list_notes(author="p1") == [a]
    assert store.list_notes(country="FIN") == [b]
    assert store.list_notes(year=2000) == [a]
    assert store.list_notes(country="FIN", year=2000) == []
    store.delete_note("note-000001")
    with pytest.raises(UnknownNoteError):
        store.get_note("note-000001")
    with pytest.raises(UnknownNoteError):
        store.delete_note("nope")
    store.close()


def test_listing_breaks_created_at_ties_by_id(tmp_path):
    store = NoteStore(tmp_path)
    for nid in ("note-000002", "note-000001", "note-000003"):
        store.put_note(note(nid, "p1", created=7))
    assert [n.id for n in store.list_notes()] == [
        "note-000001",
        "note-000002",
        "note-000003",
    ]
    store.close()


def test_note_ids_continue_after_restart(tmp_path):
    store = NoteStore(tmp_path)
    store.put_note(note(store.new_note_id(), "p1"))
    store.put_note(note(store.new_note_id(), "p1"))
    store.close()
    again = NoteStore(tmp_path)
    assert again.new_note_id() == "note-000003"
    again.close()


def test_scent_index_matches_rebuild_under_fuzz(tmp_path):
    store = NoteStore(tmp_path)
    rng = random.Random(42)
    countries = ["FIN", "SWE", "NOR", "DNK", "ISL"]
    alive = []
    for step in range(120):
        op = rng.random()
        if op < 0.6 or not alive:
            refs = []
            if rng.random() < 0.8:
                refs.append(
                    EntityRef(
                        "line_chart",
                        countries=tuple(
                            sorted(rng.sample(countries, rng.randint(1, 3)))
                        ),
                    )
                )
            if rng.random() < 0.6:
                refs.append(EntityRef("map", year=rng.randint(1960, 2013)))
            nid = store.new_note_id()
            store.put_note(note(nid, "p1", refs, created=step))
            alive.append(nid)
        elif op < 0.8:
            nid = rng.choice(alive)
            store.put_note(
                note(nid, "p1", [EntityRef("map", year=rng.randint(1960, 2013))])
            )
        else:
            nid = alive.pop(rng.randrange(len(alive)))
            store.delete_note(nid)
        assert store.scent_counts() == store.rebuild_scent()
    store.close()


def test_durability_without_snapshot(tmp_path):
    store = NoteStore(tmp_path)
    store.create_session("s1", "p1")
    store.append_events([make_event("select_country", 1000), make_event("show_notes", 2000)])
    a = note("note-000001", "p1", [EntityRef("map", year=1999)], created=1)
    b = note("note-000002", "p2", created=2)
    store.put_note(a)
    store.put_note(b)
    store.delete_note("note-000002")
    store.close()

    again = NoteStore(tmp_path)
    assert again.all_notes() == [a]
    assert again.sessions == {"s1": "p1"}
    assert len(again.all_events()) == 2
    assert again.participant_action_counts("p01")["select_country"] == 1
    assert again.scent_counts() == again.rebuild_scent()
    again.close()


def test_durability_with_snapshot(tmp_path):
    store = NoteStore(tmp_path, snapshot_every=3)
    for i in range(8):
        store.put_note(note(store.new_note_id(), "p1", created=i))
    assert store.snapshot_path.exists()
    expected = store.all_notes()
    store.close()

    again = NoteStore(tmp_path, snapshot_every=3)
    assert again.all_notes() == expected
    assert again.new_note_id() == "note-000009"
    again.close()


def test_snapshot_plus_tail_replay(tmp_path):
    # Ops after the last snapshot live only in the log and must replay on top.
    store = NoteStore(tmp_path, snapshot_every=100)
    store.put_note(note("note-000001", "p1", created=1))
    store.snapshot()
    store.put_note(note("note-000002", "p1", created=2))
    store.delete_note("note-000001")
    store.close()

    again = NoteStore(tmp_path)
    assert [n.id for n in again.all_notes()] == ["note-000002"]
    again.close()


def test_torn_final_log_line_is_tolerated(tmp_path):
    store = NoteStore(tmp_path)
    keep = note("note-000001", "p1", created=1)
    store.put_note(keep)
    store.close()
    with open(tmp_path / "wal.jsonl", "a", encoding="utf-8") as fh:
        fh.write('{"op":"put_note","note":{"id":"note-0000')  # crash mid-write

    again = NoteStore(tmp_path)
    assert again.all_notes() == [keep]
    again.put_note(note("note-000002", "p1", created=2))  # still writable
    again.close()
    final = NoteStore(tmp_path)
    assert [n.id for n in final.all_notes()] == ["note-000001", "note-000002"]
    final.close()


def test_interior_log_corruption_raises(tmp_path):
    store = NoteStore(tmp_path)
    store.put_note(note("note-000001", "p1"))
    store.put_note(note("note-000002", "p1"))
    store.close()
    lines = (tmp_path / "wal.jsonl").read_text(encoding="utf-8").splitlines()
    lines[0] = "garbage{{{"
    (tmp_path / "wal.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(MalformedRecordError) as err:
        NoteStore(tmp_path)
    assert err.value.line_no == 1


def test_discussion_thread_chain(tmp_path):
    store = NoteStore(tmp_path)
    a = note("note-000001", "p1", created=1)
    b = note("note-000002", "p2", [EntityRef("note", note_id="note-000001")], created=2)
    c = note("note-000003", "p3", [EntityRef("note", note_id="note-000002")], created=3)
    lone = note("note-000009", "p4", created=4)
    for n in (a, b, c, lone):
        store.put_note(n)

    thread, links = store.discussion_thread("note-000001")
    assert [n.id for n in thread] == ["note-000001", "note-000002", "note-000003"]
    assert links == [
        ("note-000002", "note-000001"),
        ("note-000003", "note-000002"),
    ]
    # same neighborhood from the middle of the chain
    thread_b, links_b = store.discussion_thread("note-000002")
    assert [n.id for n in thread_b] == [n.id for n in thread]
    assert links_b == links

    thread_lone, links_lone = store.discussion_thread("note-000009")
    assert [n.id for n in thread_lone] == ["note-000009"]
    assert links_lone == []

    with pytest.raises(UnknownNoteError):
        store.discussion_thread("missing")
    store.close()


def test_discussion_thread_caps_at_twenty(tmp_path):
    store = NoteStore(tmp_path)
    prev = None
    for i in range(25):
        nid = f"note-{i + 1:06d}"
        refs = [EntityRef("note", note_id=prev)] if prev else []
        store.put_note(note(nid, "p1", refs, created=i))
        prev = nid
    thread, links = store.discussion_thread("note-000001")
    assert len(thread) == 20
    # nearest-first growth keeps the chain head and drops the far tail
    assert [n.id for n in thread] == [f"note-{i + 1:06d}" for i in range(20)]
    assert len(links) == 19
    store.close()


# ---- HTTP app ----


@pytest.fixture()
def client(tmp_path):
    store = NoteStore(tmp_path / "svc")
    app = create_app(store, taxonomy=default_taxonomy())
    with TestClient(app, raise_server_exceptions=False) as c:
        c.store = store
        yield c
    store.close()


HDR = {"X-Participant": "alice"}


def test_auth_required_when_token_set(tmp_path):
    store = NoteStore(tmp_path / "auth")
    app = create_app(store, token="sekrit")
    with TestClient(app, raise_server_exceptions=False) as c:
        assert c.get("/taxonomy").status_code == 401
        assert c.get("/taxonomy", headers={"Authorization": "Bearer wrong"}).status_code == 401
        ok = c.get("/taxonomy", headers={"Authorization": "Bearer sekrit"})
        assert ok.status_code == 200
    store.close()


def test_taxonomy_endpoint(client):
    body = client.get("/taxonomy").json()
    assert body["schema_version"] == 1
    assert body["version"] == 1
    assert len(body["actions"]) == 55
    assert body["checksum"] == default_taxonomy().checksum()


def test_note_crud_over_http(client):
    created = client.post(
        "/notes",
        json={"text": "first", "refs": [{"kind": "map", "year": 2000}], "created_at": 10},
        headers=HDR,
    )
    assert created.status_code == 201
    nid = created.json()["note"]["id"]
    assert nid == "note-000001"

    got = client.get(f"/notes/{nid}")
    assert got.status_code == 200
    assert got.json()["note"]["text"] == "first"
    assert got.json()["note"]["author"] == "alice"

    updated = client.put(f"/notes/{nid}", json={"text": "second"}, headers=HDR)
    assert updated.status_code == 200
    assert updated.json()["note"]["text"] == "second"
    assert updated.json()["note"]["refs"] == [{"kind": "map", "year": 2000}]

    deleted = client.delete(f"/notes/{nid}", headers=HDR)
    assert deleted.status_code == 200
    assert client.get(f"/notes/{nid}").status_code == 404


def test_note_rejections(client):
    assert client.post("/notes", json={"text": "x"}).status_code == 422  # no header
    assert client.post("/notes", json={}, headers=HDR).status_code == 422  # no text
    bad_ref = client.post(
        "/notes",
        json={"text": "x", "refs": [{"kind": "map", "year": 1900}]},
        headers=HDR,
    )
    assert bad_ref.status_code == 422
    assert client.get("/notes/missing").status_code == 404

    client.post("/notes", json={"text": "mine", "created_at": 1}, headers=HDR)
    other = {"X-Participant": "bob"}
    assert (
        client.put("/notes/note-000001", json={"text": "hijack"}, headers=other).status_code
        == 403
    )
    assert client.delete("/notes/note-000001", headers=other).status_code == 403


def test_note_listing_filters(client):
    client.post(
        "/notes",
        json={"text": "a", "refs": [{"kind": "map", "year": 2000}], "created_at": 1},
        headers=HDR,
    )
    client.post(
        "/notes",
        json={
            "text": "b",
            "refs": [{"kind": "line", "countries": ["FIN"]}],
            "created_at": 2,
        },
        headers={"X-Participant": "bob"},
    )
    everything = client.get("/notes").json()["notes"]
    assert [n["text"] for n in everything] == ["b", "a"]
    assert [n["text"] for n in client.get("/notes", params={"year": 2000}).json()["notes"]] == ["a"]
    assert [
        n["text"] for n in client.get("/notes", params={"country": "FIN"}).json()["notes"]
    ] == ["b"]
    mine = client.get("/notes", params={"mine_only": True}, headers=HDR).json()["notes"]
    assert [n["text"] for n in mine] == ["a"]


def test_scent_endpoint(client):
    client.post(
        "/notes",
        json={
            "text": "a",
            "refs": [
                {"kind": "vertical_reference_line", "year": 1970, "countries": ["FIN", "SWE"]}
            ],
            "created_at": 1,
        },
        headers=HDR,
    )
    body = client.get("/scent").json()
    assert body["countries"] == {"FIN": 1, "SWE": 1}
    assert body["years"] == {"1970": 1}


def test_session_and_event_ingestion(client):
    made = client.post("/sessions", json={"session_id": "s1"}, headers=HDR)
    assert made.status_code == 201
    assert made.json()["session_id"] == "s1"

    res = client.post(
        "/sessions/s1/events",
        json={
            "events": [
                {"v": 1, "ts": 1000, "action": "select_country", "target": "country:FIN"},
                {"v": 1, "ts": 2000, "action": "hover_country", "duration_ms": 2999},
                {"v": 1, "ts": 3000, "action": "hover_country", "duration_ms": 3000},
                {"v": 1, "ts": 4000, "action": "not_an_action"},
                "not an object",
            ]
        },
    )
    assert res.status_code == 200
    assert res.json() == {"schema_version": 1, "accepted": 2, "dropped": 3}
    counts = client.store.participant_action_counts("alice")
    assert counts["select_country"] == 1
    assert counts["hover_country"] == 1

    assert client.post("/sessions/nope/events", json={"events": []}).status_code == 404
    assert client.post("/sessions/s1/events", json={}).status_code == 422


def test_discussion_endpoint(client):
    client.post("/notes", json={"text": "root", "created_at": 1}, headers=HDR)
    client.post(
        "/notes",
        json={
            "text": "reply",
            "refs": [{"kind": "note", "note_id": "note-000001"}],
            "created_at": 2,
        },
        headers={"X-Participant": "bob"},
    )
    body = client.get("/notes/note-000001/discussion").json()
    assert body["root"] == "note-000001"
    assert [n["id"] for n in body["notes"]] == ["note-000001", "note-000002"]
    assert body["links"] == [{"from": "note-000002", "to": "note-000001"}]


# ---- model-backed endpoints ----


def reference_model():
    """Forest over the reference features: single country reads as a statement."""
    names = reference_registry().names
    rng = np.random.default_rng(0)
    X = np.zeros((60, len(names)))
    y = []
    for i in range(60):
        many = i % 2 == 1
        X[i, names.index("ref_line_chart" if many else "ref_line")] = 1.0
        X[i, names.index("unique_countries")] = rng.integers(2, 5) if many else 1
        y.append("comparison" if many else "statement")
    return train_forest(X, y, names, n_trees=12, seed=3)


@pytest.fixture()
def model_client(tmp_path):
    store = NoteStore(tmp_path / "svc-model")
    model = reference_model()
    doc = {"label_aspect": "category", "evaluation": {"kappa_band": "substantial"}}
    app = create_app(store, model=model, model_doc=doc)
    with TestClient(app, raise_server_exceptions=False) as c:
        c.store = store
        yield c
    store.close()


def test_characterize_requires_model(client):
    res = client.post("/characterize", json={"features": {}})
    assert res.status_code == 409
    assert client.get("/recommend", headers=HDR).status_code == 409


def test_characterize(model_client):
    res = model_client.post(
        "/characterize",
        json={"features": {"ref_line": 1.0, "unique_countries": 1.0}},
    )
    assert res.status_code == 200
    body = res.json()
    assert body["classes"] == ["comparison", "statement"]
    assert body["predicted"] == "statement"
    assert len(body["probabilities"]) == 2
    assert abs(sum(body["probabilities"]) - 1.0) < 1e-9
    probs = dict(zip(body["classes"], body["probabilities"]))
    assert probs["statement"] > probs["comparison"]
    assert body["kappa_band"] == "substantial"

    assert (
        model_client.post(
            "/characterize", json={"features": {"no_such_feature": 1.0}}
        ).status_code
        == 422
    )
    assert model_client.post("/characterize", json={}).status_code == 422


def test_recommend_similar_and_diverse(model_client):
    notes = [
        # requester's own note: one country, reads as a statement
        {
            "id": "note-000001",
            "author": "alice",
            "text": "mine",
            "refs": [{"kind": "line", "countries": ["FIN"]}],
            "created_at": 1,
            "updated_at": 1,
            "labels": {"mentioned_countries": 1},
        },
        {
            "id": "note-000002",
            "author": "bob",
            "text": "also a statement",
            "refs": [],
            "created_at": 2,
            "updated_at": 2,
            "labels": {"category": "statement"},
        },
        {
            "id": "note-000003",
            "author": "carol",
            "text": "labelled comparison",
            "refs": [],
            "created_at": 3,
            "updated_at": 3,
            "labels": {"category": "comparison"},
        },
        {
            "id": "note-000004",
            "author": "dave",
            "text": "unlabelled, classified from its references",
            "refs": [{"kind": "line_chart", "countries": ["FIN", "SWE", "NOR"]}],
            "created_at": 4,
            "updated_at": 4,
            "labels": {"mentioned_countries": 3},
        },
    ]
    for obj in notes:
        model_client.store.put_note(note_from_json(obj))

    similar = model_client.get("/recommend", params={"mode": "similar"}, headers=HDR)
    assert similar.status_code == 200
    body = similar.json()
    assert body["predicted"] == "statement"
    assert [n["id"] for n in body["notes"]] == ["note-000002"]

    diverse = model_client.get("/recommend", params={"mode": "diverse"}, headers=HDR).json()
    assert [n["id"] for n in diverse["notes"]] == ["note-000004", "note-000003"]

    top1 = model_client.get(
        "/recommend", params={"mode": "diverse", "k": 1}, headers=HDR
    ).json()
    assert [n["id"] for n in top1["notes"]] == ["note-000004"]

    assert (
        model_client.get("/recommend", params={"mode": "odd"}, headers=HDR).status_code
        == 422
    )
    assert model_client.get("/recommend").status_code == 422  # no participant header


def test_error_payload_shape(client):
    res = client.get("/notes/absent")
    assert res.status_code == 404
    body = res.json()
    assert body["schema_version"] == 1
    assert "error" in body
