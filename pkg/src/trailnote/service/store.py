"""Durable note and event store: append-only log plus periodic snapshots.

Every mutation is one JSON line in the write-ahead log, fsynced before the
call returns, so an acknowledged write survives a crash. Snapshots bound
recovery time: they capture the full state and the log sequence they cover,
and recovery loads the latest snapshot then replays only the log tail. A
torn final line (a crash mid-write) is tolerated; corruption anywhere else
is an error, not a silent skip.

The scent index (how many notes cite each country and year) is maintained
incrementally on every note change and must always equal a from-scratch
rebuild; the test suite fuzzes that equality.
"""

from __future__ import annotations

import json
import os
import re
import threading
from collections import Counter, deque
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import MalformedRecordError, UnknownNoteError
from ..events import InteractionEvent, event_from_json, event_to_json
from ..notes import Note, note_from_json, note_to_json
from ..refs import ref_countries, ref_years

STORE_SCHEMA_VERSION = 1
SNAPSHOT_EVERY = 200
DISCUSSION_CAP = 20

_NOTE_ID = re.compile(r"^note-(\d+)$")


class NoteStore:
    def __init__(self, data_dir: str | Path, snapshot_every: int = SNAPSHOT_EVERY):
        self.dir = Path(data_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.wal_path = self.dir / "wal.jsonl"
        self.snapshot_path = self.dir / "snapshot.json"
        self.snapshot_every = snapshot_every
        self._lock = threading.RLock()

        self.notes: dict[str, Note] = {}
        self.sessions: dict[str, str] = {}  # session id -> participant id
        self.events: list[InteractionEvent] = []
        self.action_counts: dict[str, Counter] = {}  # participant -> action tallies
        self._scent_countries: Counter = Counter()
        self._scent_years: Counter = Counter()
        self._seq = 0
        self._note_counter = 1
        self._ops_since_snapshot = 0

        self._recover()
        self._wal_fh = open(self.wal_path, "a", encoding="utf-8")

    # ---- recovery ----

    def _recover(self) -> None:
        start_seq = 0
        if self.snapshot_path.exists():
            with open(self.snapshot_path, encoding="utf-8") as fh:
                snap = json.load(fh)
            start_seq = snap["wal_seq"]
            self._note_counter = snap["note_counter"]
            self.sessions = dict(snap["sessions"])
            for obj in snap["notes"]:
                note = note_from_json(obj)
                self.notes[note.id] = note
                self._scent_add(note)
            for obj in snap["events"]:
                self._track_event(event_from_json(obj))
        self._seq = start_seq

        if not self.wal_path.exists():
            return
        with open(self.wal_path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        torn = False
        for i, line in enumerate(lines):
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    torn = True  # crash mid-write; the op was never acked
                    break
                raise MalformedRecordError(i + 1, "corrupt log entry") from None
            if rec["seq"] < start_seq:
                continue
            self._apply(rec)
            self._seq = rec["seq"] + 1
        if torn:
            # Drop the partial line, otherwise the next append would fuse
            # with it and corrupt an acknowledged record.
            kept = "\n".join(lines[:-1])
            if kept:
                kept += "\n"
            with open(self.wal_path, "r+b") as fh:
                fh.truncate(len(kept.encode("utf-8")))
                fh.flush()
                os.fsync(fh.fileno())

    # ---- write-ahead log ----

    def _append(self, rec: dict) -> None:
        rec["seq"] = self._seq
        self._wal_fh.write(json.dumps(rec, separators=(",", ":"), sort_keys=True) + "\n")
        self._wal_fh.flush()
        os.fsync(self._wal_fh.fileno())
        self._apply(rec)
        self._seq += 1
        self._ops_since_snapshot += 1
        if self._ops_since_snapshot >= self.snapshot_every:
            self.snapshot()

    def _apply(self, rec: dict) -> None:
        op = rec["op"]
        if op == "put_note":
            note = note_from_json(rec["note"])
            old = self.notes.get(note.id)
            if old is not None:
                self._scent_remove(old)
            self.notes[note.id] = note
            self._scent_add(note)
            m = _NOTE_ID.match(note.id)
            if m:
                self._note_counter = max(self._note_counter, int(m.group(1)) + 1)
        elif op == "delete_note":
            old = self.notes.pop(rec["id"], None)
            if old is not None:
                self._scent_remove(old)
        elif op == "session":
            self.sessions[rec["id"]] = rec["participant"]
        elif op == "events":
            for obj in rec["events"]:
                self._track_event(event_from_json(obj))
        else:
            raise MalformedRecordError(rec.get("seq", -1), f"unknown op {op!r}")

    def _track_event(self, ev: InteractionEvent) -> None:
        self.events.append(ev)
        self.action_counts.setdefault(ev.participant_id, Counter())[ev.action] += 1

    def snapshot(self) -> None:
        with self._lock:
            doc = {
                "schema_version": STORE_SCHEMA_VERSION,
                "wal_seq": self._seq,
                "note_counter": self._note_counter,
                "sessions": self.sessions,
                "notes": [note_to_json(n) for _, n in sorted(self.notes.items())],
                "events": [event_to_json(e) for e in self.events],
            }
            tmp = self.snapshot_path.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.snapshot_path)
            self._ops_since_snapshot = 0

    def close(self) -> None:
        with self._lock:
            self._wal_fh.close()

    # ---- scent index ----

    def _note_scent_keys(self, note: Note) -> tuple[set[str], set[int]]:
        countries: set[str] = set()
        years: set[int] = set()
        for ref in note.refs:
            countries.update(ref_countries(ref))
            years.update(ref_years(ref))
        return countries, years

    def _scent_add(self, note: Note) -> None:
        countries, years = self._note_scent_keys(note)
        for c in countries:
            self._scent_countries[c] += 1
        for y in years:
            self._scent_years[y] += 1

    def _scent_remove(self, note: Note) -> None:
        countries, years = self._note_scent_keys(note)
        for c in countries:
            self._scent_countries[c] -= 1
            if self._scent_countries[c] == 0:
                del self._scent_countries[c]
        for y in years:
            self._scent_years[y] -= 1
            if self._scent_years[y] == 0:
                del self._scent_years[y]

    def scent_counts(self) -> tuple[dict[str, int], dict[int, int]]:
        with self._lock:
            return dict(self._scent_countries), dict(self._scent_years)

    def rebuild_scent(self) -> tuple[dict[str, int], dict[int, int]]:
        """From-scratch recomputation; must equal the incremental index."""
        with self._lock:
            countries: Counter = Counter()
            years: Counter = Counter()
            for note in self.notes.values():
                cs, ys = self._note_scent_keys(note)
                countries.update(cs)
                years.update(ys)
            return dict(countries), dict(years)

    # ---- sessions and events ----

    def create_session(self, session_id: str, participant_id: str) -> None:
        with self._lock:
            self._append({"op": "session", "id": session_id, "participant": participant_id})

    def append_events(self, events: Sequence[InteractionEvent]) -> None:
        if not events:
            return
        with self._lock:
            self._append({"op": "events", "events": [event_to_json(e) for e in events]})

    # ---- notes ----

    def new_note_id(self) -> str:
        with self._lock:
            nid = f"note-{self._note_counter:06d}"
            self._note_counter += 1
            return nid

    def put_note(self, note: Note) -> None:
        with self._lock:
            self._append({"op": "put_note", "note": note_to_json(note)})

    def delete_note(self, note_id: str) -> None:
        with self._lock:
            if note_id not in self.notes:
                raise UnknownNoteError(note_id)
            self._append({"op": "delete_note", "id": note_id})

    def get_note(self, note_id: str) -> Note:
        with self._lock:
            note = self.notes.get(note_id)
            if note is None:
                raise UnknownNoteError(note_id)
            return note

    def list_notes(
        self,
        country: str | None = None,
        year: int | None = None,
        author: str | None = None,
    ) -> list[Note]:
        """Filtered listing, newest first (created_at desc, then id desc)."""
        with self._lock:
            out = []
            for note in self.notes.values():
                if author is not None and note.author != author:
                    continue
                if country is not None or year is not None:
                    countries, years = self._note_scent_keys(note)
                    if country is not None and country not in countries:
                        continue
                    if year is not None and year not in years:
                        continue
                out.append(note)
            out.sort(key=lambda n: (-n.created_at, n.id))
            return out

    # ---- discussion ----

    def discussion_thread(self, note_id: str, cap: int = DISCUSSION_CAP):
        """Citation neighborhood around a note, at most ``cap`` notes.

        Traversal is breadth-first over citation links in both directions,
        preferring closer notes, then older ones. Returns (notes in
        chronological order, directed links citing->cited among them).
        """
        with self._lock:
            if note_id not in self.notes:
                raise UnknownNoteError(note_id)
            cites: dict[str, set[str]] = {}
            cited_by: dict[str, set[str]] = {}
            for note in self.notes.values():
                for ref in note.refs:
                    if ref.kind == "note" and ref.note_id in self.notes:
                        cites.setdefault(note.id, set()).add(ref.note_id)
                        cited_by.setdefault(ref.note_id, set()).add(note.id)

            chosen: set[str] = set()
            frontier = deque([(0, self.notes[note_id].created_at, note_id)])
            seen = {note_id}
            ordered: list[tuple[int, int, str]] = []
            while frontier and len(chosen) < cap:
                batch = sorted(frontier)
                frontier.clear()
                for dist, created, nid in batch:
                    if len(chosen) >= cap:
                        break
                    chosen.add(nid)
                    ordered.append((dist, created, nid))
                    for nxt in sorted(cites.get(nid, set()) | cited_by.get(nid, set())):
                        if nxt not in seen:
                            seen.add(nxt)
                            frontier.append((dist + 1, self.notes[nxt].created_at, nxt))

            thread = sorted((self.notes[n] for n in chosen), key=lambda n: (n.created_at, n.id))
            links = [
                (src, dst)
                for src in sorted(chosen)
                for dst in sorted(cites.get(src, ()))
                if dst in chosen
            ]
            return thread, links

    # ---- feature accumulation for recommendations ----

    def participant_action_counts(self, participant_id: str) -> Counter:
        with self._lock:
            return Counter(self.action_counts.get(participant_id, Counter()))

    def notes_by(self, participant_id: str) -> list[Note]:
        with self._lock:
            return [n for n in self.notes.values() if n.author == participant_id]

    def all_notes(self) -> list[Note]:
        with self._lock:
            return sorted(self.notes.values(), key=lambda n: n.id)

    def all_events(self) -> list[InteractionEvent]:
        with self._lock:
            return list(self.events)


def load_notes_into(store: NoteStore, notes: Iterable[Note]) -> int:
    count = 0
    for note in notes:
        store.put_note(note)
        count += 1
    return count
