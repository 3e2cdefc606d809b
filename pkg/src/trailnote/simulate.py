"""Synthetic cohorts with planted behavior-to-label dependencies.

Each participant draws a behavior profile that controls action rates, how
many countries a note's citations span, and which citation kinds the
participant leans on. Labels are then derived from the realized citations by
fixed rules, so the dependency a classifier should recover is genuinely in
the features:

* category: unique cited countries (at most ``statement_max`` country makes
  a statement, up to ``comparison_max`` a comparison, more a grouping);
* overview vs detail: point-level citations (single values, single series)
  against whole-chart citations, mixed use landing in the middle;
* prior knowledge: whether the note cites an earlier note.

Each label is flipped with the profile's noise probability afterwards.
Calibration constants live in ``data/profiles.json``, not in code. All
randomness is drawn from per-participant generators derived from
(seed, participant index), so cohorts are reproducible and participants can
be generated in parallel without changing the result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .actions import ActionTaxonomy, default_taxonomy
from .dataset import EmissionDataset, load_dataset
from .errors import InvalidProfileError
from .eventlog import SessionLog, ingest
from .events import EntityKey, InteractionEvent, country_key, note_key, year_key
from .notes import CATEGORIES, Note, NoteLabels
from .refs import REF_KINDS, YEAR_MAX, YEAR_MIN, EntityRef, ref_countries, require_valid

RULE_CATEGORY = "category_by_unique_countries"

_COUNTRY_KINDS = ("line_chart", "map_point", "line", "vertical_reference_line")
_MULTI_KINDS = ("line_chart", "vertical_reference_line")

# event target kind per action; unlisted actions carry no target
_TARGETS: dict[str, str] = {
    "select_country": "country",
    "deselect_country": "country",
    "hover_country": "country",
    "view_notes_of_country": "country",
    "hover_referred_entity": "country",
    "add_entity": "country",
    "add_entity_repeatedly": "country",
    "remove_entity": "country",
    "remove_country_from_vline_ref": "country",
    "remove_country_from_line_chart_ref": "country",
    "hover_map_point": "country",
    "hover_line": "country",
    "note_hover_map_point": "country",
    "note_hover_line": "country",
    "select_year": "year",
    "hover_year": "year",
    "hover_year_area": "year",
    "hover_vertical_line": "year",
    "note_select_year": "year",
    "note_hover_year": "year",
    "note_hover_year_area": "year",
    "note_hover_vertical_line": "year",
    "view_notes_of_year": "year",
    "hover_note_text": "note",
    "hover_referred_note": "note",
    "scroll_note_into_view": "note",
    "drag_node": "note",
    "hover_node": "note",
    "view_discussions": "note",
    "reply_to_note": "note",
    "open_note_editing": "note",
    "delete_note": "note",
}


@dataclass(frozen=True)
class BehaviorProfile:
    name: str
    weight: float
    action_rates: Mapping[str, float]
    reference_tendencies: Mapping[str, float]
    label_rule: str
    noise: float
    country_scope: tuple[int, int]
    signature_kind: str


@dataclass(frozen=True)
class ProfileSet:
    version: int
    profiles: tuple[BehaviorProfile, ...]
    statement_max: int
    comparison_max: int
    notes_min: int
    notes_max: int
    notes_p_min: float
    hover_ms: tuple[int, int]
    gap_ms: tuple[int, int]
    update_probability: float
    window_break_probability: float


def _validate_profile(p: BehaviorProfile, taxonomy: ActionTaxonomy) -> None:
    if not 0.0 <= p.noise < 0.5:
        raise InvalidProfileError(f"{p.name}: noise must be in [0, 0.5), got {p.noise}")
    if p.weight < 0:
        raise InvalidProfileError(f"{p.name}: negative weight")
    for token, rate in p.action_rates.items():
        if token not in taxonomy:
            raise InvalidProfileError(f"{p.name}: unknown action {token!r}")
        if rate < 0:
            raise InvalidProfileError(f"{p.name}: negative rate for {token!r}")
    for kind, rate in p.reference_tendencies.items():
        if kind not in REF_KINDS:
            raise InvalidProfileError(f"{p.name}: unknown reference kind {kind!r}")
        if rate < 0:
            raise InvalidProfileError(f"{p.name}: negative tendency for {kind!r}")
    if p.label_rule != RULE_CATEGORY:
        raise InvalidProfileError(f"{p.name}: unknown label rule {p.label_rule!r}")
    lo, hi = p.country_scope
    if lo < 0 or hi < lo:
        raise InvalidProfileError(f"{p.name}: bad country scope ({lo}, {hi})")
    if p.signature_kind not in REF_KINDS:
        raise InvalidProfileError(f"{p.name}: unknown signature kind {p.signature_kind!r}")


def load_profiles(path: str | None = None, taxonomy: ActionTaxonomy | None = None) -> ProfileSet:
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = json.loads(resources.files("trailnote.data").joinpath("profiles.json").read_text("utf-8"))
    tax = taxonomy or default_taxonomy()
    profiles = tuple(
        BehaviorProfile(
            name=p["name"],
            weight=float(p["weight"]),
            action_rates=dict(p["action_rates"]),
            reference_tendencies=dict(p["reference_tendencies"]),
            label_rule=p.get("label_rule", RULE_CATEGORY),
            noise=float(p["noise"]),
            country_scope=(int(p["country_scope"][0]), int(p["country_scope"][1])),
            signature_kind=p["signature_kind"],
        )
        for p in raw["profiles"]
    )
    if not profiles:
        raise InvalidProfileError("profile file defines no profiles")
    for p in profiles:
        _validate_profile(p, tax)
    if abs(sum(p.weight for p in profiles) - 1.0) > 1e-9:
        raise InvalidProfileError("profile weights must sum to 1")
    notes = raw["notes_per_participant"]
    return ProfileSet(
        version=int(raw["version"]),
        profiles=profiles,
        statement_max=int(raw["category_thresholds"]["statement_max"]),
        comparison_max=int(raw["category_thresholds"]["comparison_max"]),
        notes_min=int(notes["min"]),
        notes_max=int(notes["max"]),
        notes_p_min=float(notes["p_min"]),
        hover_ms=(int(raw["hover_duration_ms"]["min"]), int(raw["hover_duration_ms"]["max"])),
        gap_ms=(int(raw["event_gap_ms"]["min"]), int(raw["event_gap_ms"]["max"])),
        update_probability=float(raw["update_probability"]),
        window_break_probability=float(raw["window_break_probability"]),
    )


def category_rule(refs: Sequence[EntityRef], statement_max: int, comparison_max: int) -> str:
    unique = {c for ref in refs for c in ref_countries(ref)}
    if len(unique) <= statement_max:
        return "statement"
    if len(unique) <= comparison_max:
        return "comparison"
    return "grouping"


def overview_detail_rule(refs: Sequence[EntityRef]) -> float:
    detail = sum(1 for r in refs if r.kind in ("map_point", "line"))
    overview = sum(1 for r in refs if r.kind in ("map", "line_chart"))
    if detail > 0 and overview == 0:
        return 1.0
    if overview > 0 and detail == 0:
        return 0.0
    return 0.5


def prior_knowledge_rule(refs: Sequence[EntityRef]) -> int:
    return 1 if any(r.kind == "note" for r in refs) else 0


def _flip_category(value: str, rng: np.random.Generator) -> str:
    others = [c for c in CATEGORIES if c != value]
    return others[int(rng.integers(0, len(others)))]


def _flip_overview(value: float, rng: np.random.Generator) -> float:
    others = [v for v in (0.0, 0.5, 1.0) if v != value]
    return others[int(rng.integers(0, len(others)))]


def _build_refs(
    profile: BehaviorProfile,
    countries: list[str],
    prev_ids: list[str],
    rng: np.random.Generator,
) -> list[EntityRef]:
    counts = {kind: int(rng.poisson(rate)) for kind, rate in profile.reference_tendencies.items()}
    for kind in REF_KINDS:
        counts.setdefault(kind, 0)
    k = len(countries)
    if k == 0:
        for kind in _COUNTRY_KINDS:
            counts[kind] = 0
        if counts["map"] + counts["note"] == 0:
            counts["map"] = 1
    else:
        # every targeted country must be cited: without a multi-country
        # citation, singles have to cover them one each
        multi = counts["line_chart"] + counts["vertical_reference_line"]
        singles = counts["map_point"] + counts["line"]
        if multi == 0 and singles < k:
            if profile.signature_kind in _MULTI_KINDS:
                counts[profile.signature_kind] += 1
            elif k == 1:
                counts[profile.signature_kind] += 1
            else:
                counts["line_chart"] += 1
    if counts["note"] > 0 and not prev_ids:
        counts["note"] = 0

    refs: list[EntityRef] = []
    covered: set[str] = set()

    def a_year() -> int:
        return int(rng.integers(YEAR_MIN, YEAR_MAX + 1))

    first_multi = True
    for kind in _MULTI_KINDS:
        for _ in range(counts[kind]):
            if first_multi:
                chosen = list(countries)
                first_multi = False
            else:
                size = int(rng.integers(1, k + 1))
                chosen = [countries[i] for i in rng.choice(k, size=size, replace=False)]
            chosen = sorted(chosen)
            if kind == "line_chart":
                refs.append(EntityRef(kind="line_chart", countries=tuple(chosen)))
            else:
                refs.append(
                    EntityRef(kind="vertical_reference_line", year=a_year(), countries=tuple(chosen))
                )
            covered.update(chosen)

    multi_present = not first_multi
    pool = list(countries)
    single_jobs = [("map_point", counts["map_point"]), ("line", counts["line"])]
    for kind, count in single_jobs:
        for _ in range(count):
            if not multi_present and pool:
                c = pool.pop(0)  # cover each country once before repeats
            else:
                c = countries[int(rng.integers(0, k))]
            covered.add(c)
            if kind == "map_point":
                refs.append(
                    EntityRef(
                        kind="map_point",
                        year=a_year(),
                        countries=(c,),
                        value=float(round(rng.uniform(0.0, 25.0), 3)),
                    )
                )
            else:
                refs.append(EntityRef(kind="line", countries=(c,)))

    for _ in range(counts["map"]):
        refs.append(EntityRef(kind="map", year=a_year()))
    for _ in range(counts["note"]):
        cited = prev_ids[int(rng.integers(0, len(prev_ids)))]
        refs.append(EntityRef(kind="note", note_id=cited))

    if covered != set(countries):  # only possible without a multi citation
        for c in sorted(set(countries) - covered):
            refs.append(EntityRef(kind="line", countries=(c,)))

    order = rng.permutation(len(refs))
    return [require_valid(refs[i]) for i in order]


def _event_target(
    token: str, countries: list[str], prev_ids: list[str], rng: np.random.Generator, codes: tuple[str, ...]
) -> EntityKey | None:
    kind = _TARGETS.get(token)
    if kind is None:
        return None
    if kind == "country":
        if countries and rng.random() < 0.8:
            return country_key(countries[int(rng.integers(0, len(countries)))])
        return country_key(codes[int(rng.integers(0, len(codes)))])
    if kind == "year":
        return year_key(int(rng.integers(YEAR_MIN, YEAR_MAX + 1)))
    if prev_ids:
        return note_key(prev_ids[int(rng.integers(0, len(prev_ids)))])
    return None


def _participant(
    index: int,
    seed: int,
    ps: ProfileSet,
    codes: tuple[str, ...],
    taxonomy: ActionTaxonomy,
    noise_override: float | None,
) -> tuple[list[InteractionEvent], list[Note]]:
    rng = np.random.default_rng([seed, index])
    pid = f"p{index:03d}"
    session = f"s{index:03d}"
    weights = np.array([p.weight for p in ps.profiles])
    profile = ps.profiles[int(rng.choice(len(ps.profiles), p=weights / weights.sum()))]
    noise = profile.noise if noise_override is None else noise_override
    hover_tokens = taxonomy.hover_tokens()

    t = 1_600_000_000_000 + index * 36_000_000
    events: list[InteractionEvent] = []
    notes: list[Note] = []
    my_ids: list[str] = []

    def gap() -> int:
        return int(rng.integers(ps.gap_ms[0], ps.gap_ms[1] + 1))

    def emit(token: str, target: EntityKey | None = None) -> InteractionEvent:
        nonlocal t
        t += gap()
        dur = None
        if token in hover_tokens:
            dur = int(rng.integers(ps.hover_ms[0], ps.hover_ms[1] + 1))
        ev = InteractionEvent(
            session_id=session,
            participant_id=pid,
            timestamp=t,
            action=token,
            target=target,
            duration_ms=dur,
        )
        events.append(ev)
        return ev

    emit("start_session")
    n_notes = ps.notes_min if rng.random() < ps.notes_p_min else ps.notes_max

    for j in range(n_notes):
        lo, hi = profile.country_scope
        k = int(rng.integers(lo, hi + 1))
        chosen = sorted(codes[i] for i in rng.choice(len(codes), size=k, replace=False))
        refs = _build_refs(profile, chosen, my_ids, rng)

        window_tokens: list[str] = []
        for token, rate in profile.action_rates.items():
            window_tokens.extend([token] * int(rng.poisson(rate)))
        order = rng.permutation(len(window_tokens))
        for i in order:
            token = window_tokens[i]
            emit(token, _event_target(token, chosen, my_ids, rng, codes))
        if rng.random() < ps.window_break_probability:
            emit("deactivate_window")
            t += int(rng.integers(5_000, 480_000))
            emit("activate_window")

        note_id = f"{pid}-n{j + 1}"
        save_ev = emit("save_note", note_key(note_id))
        updated_at = save_ev.timestamp
        if rng.random() < ps.update_probability:
            updated_at = emit("update_note", note_key(note_id)).timestamp

        category = category_rule(refs, ps.statement_max, ps.comparison_max)
        overview = overview_detail_rule(refs)
        prior = prior_knowledge_rule(refs)
        if rng.random() < noise:
            category = _flip_category(category, rng)
        if rng.random() < noise:
            overview = _flip_overview(overview, rng)
        if rng.random() < noise:
            prior = 1 - prior
        correctness = 0 if rng.random() < noise else 1

        unique_countries = {c for r in refs for c in ref_countries(r)}
        unique_years = {r.year for r in refs if r.year is not None}
        labels = NoteLabels(
            category=category,
            overview_detail=overview,
            prior_knowledge=prior,
            correctness=correctness,
            chart_relevance=1,
            mentioned_countries=len(unique_countries),
            mentioned_years=len(unique_years),
            mentioned_values=sum(1 for r in refs if r.value is not None),
        )
        notes.append(
            Note(
                id=note_id,
                author=pid,
                text=f"observation {j + 1} by {pid}",
                refs=tuple(refs),
                created_at=save_ev.timestamp,
                updated_at=updated_at,
                labels=labels,
            )
        )
        my_ids.append(note_id)

    emit("go_to_questionnaire")
    return events, notes


def generate_cohort(
    profile_set: ProfileSet | None = None,
    n_participants: int = 158,
    seed: int = 0,
    noise: float | None = None,
    dataset: EmissionDataset | None = None,
    taxonomy: ActionTaxonomy | None = None,
) -> tuple[dict[str, SessionLog], list[Note]]:
    """Generate session logs and labeled notes; deterministic per seed."""
    if n_participants < 2:
        raise ValueError("a cohort needs at least two participants")
    if noise is not None and not 0.0 <= noise < 0.5:
        raise InvalidProfileError(f"noise must be in [0, 0.5), got {noise}")
    ps = profile_set or load_profiles()
    tax = taxonomy or default_taxonomy()
    codes = (dataset or load_dataset()).codes

    all_events: list[InteractionEvent] = []
    all_notes: list[Note] = []
    for i in range(n_participants):
        events, notes = _participant(i, seed, ps, codes, tax, noise)
        all_events.extend(events)
        all_notes.extend(notes)
    logs = ingest(all_events, taxonomy=tax)
    return logs, all_notes


def shuffle_labels(notes: Sequence[Note], seed: int = 0) -> list[Note]:
    """Reassign whole label sets across notes; the control for planted signal."""
    rng = np.random.default_rng([seed])
    order = rng.permutation(len(notes))
    return [note.with_labels(notes[order[i]].labels) for i, note in enumerate(notes)]
