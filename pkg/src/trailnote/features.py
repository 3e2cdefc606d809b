"""Predictor vectors for notes, plus per-participant aggregates.

Three feature families describe a note:

* action counts: how often each of the 35 characterization actions occurred
  from the start of the session up to and including the save or update event
  of the note (the latest such event wins when a note was edited);
* reference counts: how many citations of each entity kind the note carries,
  plus the number of unique countries and unique years across all of them;
* pattern counts: how often each mined sequence pattern matches the same
  event prefix, using the miner's greedy scan.

Feature registries are closed vocabularies. A vector mentioning a name its
registry does not define is a hard error, never a silent zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .actions import SAVE_NOTE, UPDATE_NOTE, ActionTaxonomy, default_taxonomy
from .errors import ConfigError, MissingSaveEventError, UnknownFeatureError
from .eventlog import SessionLog
from .events import InteractionEvent, note_key
from .mining import PatternSet, greedy_match, normalize_trail, pattern_name
from .notes import CATEGORIES, Note
from .refs import REF_KINDS, ref_countries, ref_years, require_valid

ACTION_COUNTS = "action_counts"
REFERENCE_COUNTS = "reference_counts"
PATTERN_COUNTS = "pattern_counts"
FEATURE_KINDS = (ACTION_COUNTS, REFERENCE_COUNTS, PATTERN_COUNTS)

# The note window is measured from the beginning of the task. That admits
# interactions unrelated to the note, but resetting at the previous note is
# not what the logs justify either, so the policy is an enum with a single
# shipped value and room for alternatives.
WINDOW_CUMULATIVE = "cumulative"
WINDOW_SINCE_PREVIOUS = "since_previous_note"
WINDOW_POLICIES = (WINDOW_CUMULATIVE, WINDOW_SINCE_PREVIOUS)

UNIQUE_COUNTRIES = "unique_countries"
UNIQUE_YEARS = "unique_years"


@dataclass(frozen=True)
class FeatureRegistry:
    """Ordered, closed set of feature names for one vector kind."""

    kind: str
    names: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ConfigError(f"unknown feature kind {self.kind!r}")
        if len(set(self.names)) != len(self.names):
            raise ConfigError("duplicate feature names in registry")

    def __len__(self) -> int:
        return len(self.names)

    def check(self, names: Iterable[str]) -> None:
        known = set(self.names)
        for name in names:
            if name not in known:
                raise UnknownFeatureError(name)


@dataclass(frozen=True)
class FeatureVector:
    note_id: str
    participant_id: str
    kind: str
    values: Mapping[str, float]
    label: object | None = None

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ConfigError(f"unknown feature kind {self.kind!r}")
        for name, v in self.values.items():
            if v < 0:
                raise ValueError(f"feature {name!r} is negative")

    def as_array(self, registry: FeatureRegistry) -> np.ndarray:
        registry.check(self.values)
        return np.array([float(self.values.get(n, 0.0)) for n in registry.names])


def action_registry(taxonomy: ActionTaxonomy | None = None) -> FeatureRegistry:
    tax = taxonomy or default_taxonomy()
    return FeatureRegistry(ACTION_COUNTS, tax.characterization_tokens())


def reference_registry() -> FeatureRegistry:
    names = tuple(f"ref_{kind}" for kind in REF_KINDS) + (UNIQUE_COUNTRIES, UNIQUE_YEARS)
    return FeatureRegistry(REFERENCE_COUNTS, names)


def pattern_registry(patterns: PatternSet) -> FeatureRegistry:
    return FeatureRegistry(
        PATTERN_COUNTS, tuple(pattern_name(fp.tokens) for fp in patterns.final_patterns)
    )


def note_window(
    note: Note, log: SessionLog, policy: str = WINDOW_CUMULATIVE
) -> tuple[InteractionEvent, ...]:
    """Events from session start through the note's last save/update event."""
    if policy not in WINDOW_POLICIES:
        raise ConfigError(f"unknown window policy {policy!r}")
    if policy != WINDOW_CUMULATIVE:
        raise ConfigError(f"window policy {policy!r} is declared but not implemented")
    key = note_key(note.id)
    end = None
    for i, ev in enumerate(log.events):
        if ev.action in (SAVE_NOTE, UPDATE_NOTE) and ev.target == key:
            end = i
    if end is None:
        raise MissingSaveEventError(note.id)
    return log.events[: end + 1]


def action_features(
    note: Note,
    log: SessionLog,
    registry: FeatureRegistry | None = None,
    policy: str = WINDOW_CUMULATIVE,
) -> FeatureVector:
    """Counts of each registry action within the note's event window."""
    reg = registry or action_registry()
    window = note_window(note, log, policy)
    counts = dict.fromkeys(reg.names, 0.0)
    for ev in window:
        if ev.action in counts:
            counts[ev.action] += 1.0
    return FeatureVector(note.id, log.participant_id, ACTION_COUNTS, counts)


def reference_features(note: Note, registry: FeatureRegistry | None = None) -> FeatureVector:
    """Citation counts per entity kind plus unique-country/year tallies."""
    reg = registry or reference_registry()
    counts = dict.fromkeys(reg.names, 0.0)
    countries: set[str] = set()
    years: set[int] = set()
    for ref in note.refs:
        require_valid(ref)
        counts[f"ref_{ref.kind}"] += 1.0
        countries.update(ref_countries(ref))
        years.update(ref_years(ref))
    counts[UNIQUE_COUNTRIES] = float(len(countries))
    counts[UNIQUE_YEARS] = float(len(years))
    return FeatureVector(note.id, note.author, REFERENCE_COUNTS, counts)


def pattern_features(
    note: Note,
    log: SessionLog,
    patterns: PatternSet,
    registry: FeatureRegistry | None = None,
    policy: str = WINDOW_CUMULATIVE,
) -> FeatureVector:
    """Greedy-match counts of the final patterns over the note's window."""
    reg = registry or pattern_registry(patterns)
    window = note_window(note, log, policy)
    trail = normalize_trail(log.participant_id, [ev.action for ev in window])
    finals = {fp.tokens: fp.support for fp in patterns.final_patterns}
    counts = dict.fromkeys(reg.names, 0.0)
    for seq, _pos in greedy_match(trail, finals):
        counts[pattern_name(seq)] += 1.0
    return FeatureVector(note.id, log.participant_id, PATTERN_COUNTS, counts)


@dataclass(frozen=True)
class ParticipantAggregate:
    """Per-participant summary used by the correlation analyses."""

    participant_id: str
    n_notes: int
    mean_overview_detail: float | None
    mean_prior_knowledge: float | None
    category_counts: Mapping[str, int]
    action_group_counts: Mapping[str, int]
    reference_type_means: Mapping[str, float]


def _mean_or_none(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def participant_aggregates(
    notes: Sequence[Note],
    logs: Mapping[str, SessionLog],
    taxonomy: ActionTaxonomy | None = None,
) -> list[ParticipantAggregate]:
    """One aggregate per logged participant; label means skip omitted labels."""
    tax = taxonomy or default_taxonomy()
    by_author: dict[str, list[Note]] = {}
    for note in notes:
        by_author.setdefault(note.author, []).append(note)

    out: list[ParticipantAggregate] = []
    for pid in sorted(logs):
        log = logs[pid]
        mine = by_author.get(pid, [])
        od = [n.labels.overview_detail for n in mine if n.labels.overview_detail is not None]
        pk = [float(n.labels.prior_knowledge) for n in mine if n.labels.prior_knowledge is not None]
        cats = dict.fromkeys(CATEGORIES, 0)
        for n in mine:
            if n.labels.category is not None:
                cats[n.labels.category] += 1
        groups = {"data-exploration": 0, "note-exploration": 0, "edit": 0}
        for ev in log.events:
            g = tax.group_of(ev.action)
            if g in groups:
                groups[g] += 1
        ref_means = {}
        for kind in REF_KINDS:
            per_note = [sum(1 for r in n.refs if r.kind == kind) for n in mine]
            ref_means[kind] = sum(per_note) / len(per_note) if per_note else 0.0
        out.append(
            ParticipantAggregate(
                participant_id=pid,
                n_notes=len(mine),
                mean_overview_detail=_mean_or_none(od),
                mean_prior_knowledge=_mean_or_none(pk),
                category_counts=cats,
                action_group_counts=groups,
                reference_type_means=ref_means,
            )
        )
    return out


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-note design matrix with ids, names, and optional labels."""

    note_ids: tuple[str, ...]
    participant_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    X: np.ndarray
    labels: tuple[object, ...]  # entries may be None when a note is unlabeled
    label_aspect: str | None = None

    def __post_init__(self):
        n, d = self.X.shape
        if not (len(self.note_ids) == len(self.participant_ids) == len(self.labels) == n):
            raise ValueError("row metadata out of step with matrix")
        if len(self.feature_names) != d:
            raise ValueError("feature names out of step with matrix")


def _window_end_ts(note: Note, log: SessionLog) -> int:
    key = note_key(note.id)
    ts = None
    for ev in log.events:
        if ev.action in (SAVE_NOTE, UPDATE_NOTE) and ev.target == key:
            ts = ev.timestamp
    if ts is None:
        raise MissingSaveEventError(note.id)
    return ts


def build_matrix(
    notes: Sequence[Note],
    logs: Mapping[str, SessionLog],
    kinds: Sequence[str] = (ACTION_COUNTS,),
    label_aspect: str | None = None,
    patterns: PatternSet | None = None,
    taxonomy: ActionTaxonomy | None = None,
    policy: str = WINDOW_CUMULATIVE,
    drop_unlabeled: bool = False,
) -> FeatureMatrix:
    """Assemble one matrix over the requested feature kinds.

    Rows are ordered by (participant, note save time, note id) so repeated
    builds agree regardless of input order.
    """
    for kind in kinds:
        if kind not in FEATURE_KINDS:
            raise ConfigError(f"unknown feature kind {kind!r}")
    if PATTERN_COUNTS in kinds and patterns is None:
        raise ConfigError("pattern features need a mined pattern set")

    registries: list[FeatureRegistry] = []
    for kind in kinds:
        if kind == ACTION_COUNTS:
            registries.append(action_registry(taxonomy))
        elif kind == REFERENCE_COUNTS:
            registries.append(reference_registry())
        else:
            registries.append(pattern_registry(patterns))

    ordered = sorted(
        notes, key=lambda n: (n.author, _window_end_ts(n, logs[n.author]), n.id)
    )
    rows: list[np.ndarray] = []
    note_ids: list[str] = []
    pids: list[str] = []
    labels: list[object] = []
    for note in ordered:
        label = note.labels.get(label_aspect) if label_aspect else None
        if drop_unlabeled and label_aspect and label is None:
            continue
        log = logs[note.author]
        parts: list[np.ndarray] = []
        for kind, reg in zip(kinds, registries):
            if kind == ACTION_COUNTS:
                vec = action_features(note, log, reg, policy)
            elif kind == REFERENCE_COUNTS:
                vec = reference_features(note, reg)
            else:
                vec = pattern_features(note, log, patterns, reg, policy)
            parts.append(vec.as_array(reg))
        rows.append(np.concatenate(parts) if parts else np.zeros(0))
        note_ids.append(note.id)
        pids.append(note.author)
        labels.append(label)

    names = tuple(name for reg in registries for name in reg.names)
    X = np.array(rows) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(
        note_ids=tuple(note_ids),
        participant_ids=tuple(pids),
        feature_names=names,
        X=X.astype(float),
        labels=tuple(labels),
        label_aspect=label_aspect,
    )


def write_matrix(matrix: FeatureMatrix, fh: IO[str]) -> None:
    """Plain delimited export; floats use shortest round-trip form."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["note_id", "participant_id", *matrix.feature_names, "label"])
    for i in range(matrix.X.shape[0]):
        label = matrix.labels[i]
        label_s = "" if label is None else (repr(label) if isinstance(label, float) else str(label))
        writer.writerow(
            [
                matrix.note_ids[i],
                matrix.participant_ids[i],
                *[repr(float(v)) for v in matrix.X[i]],
                label_s,
            ]
        )


def _parse_label(text: str) -> object:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_matrix(fh: IO[str], label_aspect: str | None = None) -> FeatureMatrix:
    reader = csv.reader(fh)
    header = next(reader, None)
    if not header or header[0] != "note_id" or header[-1] != "label":
        raise ConfigError("feature table must have a header starting note_id, ending label")
    if header[1] != "participant_id":
        raise ConfigError("feature table must carry participant_id as its second column")
    names = tuple(header[2:-1])
    note_ids: list[str] = []
    pids: list[str] = []
    rows: list[list[float]] = []
    labels: list[object] = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise ConfigError(f"row width {len(row)} does not match header {len(header)}")
        note_ids.append(row[0])
        pids.append(row[1])
        rows.append([float(v) for v in row[2:-1]])
        labels.append(_parse_label(row[-1]))
    X = np.array(rows) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(
        note_ids=tuple(note_ids),
        participant_ids=tuple(pids),
        feature_names=names,
        X=X.astype(float),
        labels=tuple(labels),
        label_aspect=label_aspect,
    )
