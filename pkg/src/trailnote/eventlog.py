"""Ingest, validate, and summarize per-participant interaction trails."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

from .actions import ACTIVATE_WINDOW, DEACTIVATE_WINDOW, ActionTaxonomy, default_taxonomy
from .errors import EmptyLogError
from .events import InteractionEvent, read_event_lines, write_events

HOVER_MIN_MS = 3000
IDLE_THRESHOLD_MS = 360_000  # 6 minutes without mouse interaction counts as idle


@dataclass(frozen=True)
class SessionLog:
    participant_id: str
    events: tuple[InteractionEvent, ...]
    window_activity: tuple[tuple[int, int], ...] = field(default=())
    # window_activity holds (deactivate, activate) timestamp pairs

    def span_ms(self) -> int:
        if not self.events:
            return 0
        return self.events[-1].timestamp - self.events[0].timestamp


@dataclass(frozen=True)
class SessionSummary:
    participant_id: str
    total_interactions: int
    data_exploration_count: int
    active_duration_ms: int
    countries_explored: int
    years_explored: int


def _window_intervals(events: list[InteractionEvent]) -> tuple[tuple[int, int], ...]:
    """Pair deactivate/activate events; an unmatched deactivate closes at the last event."""
    intervals: list[tuple[int, int]] = []
    open_at: int | None = None
    for ev in events:
        if ev.action == DEACTIVATE_WINDOW and open_at is None:
            open_at = ev.timestamp
        elif ev.action == ACTIVATE_WINDOW and open_at is not None:
            intervals.append((open_at, ev.timestamp))
            open_at = None
    if open_at is not None and events:
        intervals.append((open_at, events[-1].timestamp))
    return tuple((a, b) for a, b in intervals if b > a)


def ingest(
    records: Iterable[InteractionEvent],
    hover_min_ms: int = HOVER_MIN_MS,
    taxonomy: ActionTaxonomy | None = None,
) -> dict[str, SessionLog]:
    """Group events by participant into time-sorted session logs.

    Unknown actions raise; hover events shorter than ``hover_min_ms`` (or with
    no recorded duration) are dropped.
    """
    taxonomy = taxonomy or default_taxonomy()
    hover = taxonomy.hover_tokens()
    by_participant: dict[str, list[InteractionEvent]] = {}
    for ev in records:
        taxonomy.get(ev.action)  # raises UnknownActionError
        if ev.action in hover and (ev.duration_ms is None or ev.duration_ms < hover_min_ms):
            continue
        by_participant.setdefault(ev.participant_id, []).append(ev)
    logs: dict[str, SessionLog] = {}
    for pid in sorted(by_participant):
        events = sorted(by_participant[pid], key=lambda e: e.timestamp)
        logs[pid] = SessionLog(
            participant_id=pid,
            events=tuple(events),
            window_activity=_window_intervals(events),
        )
    return logs


def ingest_file(
    fh: IO[str], hover_min_ms: int = HOVER_MIN_MS, taxonomy: ActionTaxonomy | None = None
) -> dict[str, SessionLog]:
    return ingest((ev for _, ev in read_event_lines(fh)), hover_min_ms, taxonomy)


def serialize_logs(logs: dict[str, SessionLog], fh: IO[str]) -> None:
    for pid in sorted(logs):
        write_events(logs[pid].events, fh)


def _union_length(intervals: list[tuple[int, int]]) -> int:
    """Total length of the union; overlapping exclusions are never double counted."""
    total = 0
    cur_start: int | None = None
    cur_end = 0
    for start, end in sorted(intervals):
        if cur_start is None:
            cur_start, cur_end = start, end
        elif start <= cur_end:
            cur_end = max(cur_end, end)
        else:
            total += cur_end - cur_start
            cur_start, cur_end = start, end
    if cur_start is not None:
        total += cur_end - cur_start
    return total


def active_duration(log: SessionLog, idle_threshold_ms: int = IDLE_THRESHOLD_MS) -> int:
    """Wall-clock span minus idle gaps and deactivated-window intervals.

    A gap between consecutive events longer than ``idle_threshold_ms`` is
    excluded in full, as are deactivation intervals; the two exclusion kinds
    are unioned before subtraction.
    """
    if not log.events:
        raise EmptyLogError(f"participant {log.participant_id} has no events")
    first = log.events[0].timestamp
    last = log.events[-1].timestamp
    exclusions: list[tuple[int, int]] = []
    for prev, nxt in zip(log.events, log.events[1:]):
        if nxt.timestamp - prev.timestamp > idle_threshold_ms:
            exclusions.append((prev.timestamp, nxt.timestamp))
    for start, end in log.window_activity:
        clipped = (max(start, first), min(end, last))
        if clipped[1] > clipped[0]:
            exclusions.append(clipped)
    return (last - first) - _union_length(exclusions)


def coverage(log: SessionLog, taxonomy: ActionTaxonomy | None = None) -> tuple[int, int]:
    """Unique countries and years targeted by data-exploration actions."""
    taxonomy = taxonomy or default_taxonomy()
    countries: set[str] = set()
    years: set[str] = set()
    for ev in log.events:
        if ev.target is None or taxonomy.group_of(ev.action) != "data-exploration":
            continue
        if ev.target.kind == "country":
            countries.add(ev.target.value)
        elif ev.target.kind == "year":
            years.add(ev.target.value)
    return len(countries), len(years)


def summarize(log: SessionLog, idle_threshold_ms: int = IDLE_THRESHOLD_MS,
              taxonomy: ActionTaxonomy | None = None) -> SessionSummary:
    taxonomy = taxonomy or default_taxonomy()
    n_data = sum(1 for ev in log.events if taxonomy.group_of(ev.action) == "data-exploration")
    n_countries, n_years = coverage(log, taxonomy)
    return SessionSummary(
        participant_id=log.participant_id,
        total_interactions=len(log.events),
        data_exploration_count=n_data,
        active_duration_ms=active_duration(log, idle_threshold_ms) if log.events else 0,
        countries_explored=n_countries,
        years_explored=n_years,
    )
