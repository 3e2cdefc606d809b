"""Interaction-pattern extraction over normalized action trails.

The pipeline has three steps. First, deselecting a country is rewritten to
selecting one (same exploration intent) and consecutive repeats of an action
are collapsed to a single occurrence; each maximal run, regardless of length,
counts as one occurrence of that action's run pattern. Second, every
contiguous subsequence of 2 to 10 actions in the collapsed trail is
enumerated (overlapping windows all count) and the sequences present in more
than ``floor(N * t1)`` participants' trails become candidates. Third, each
trail is rescanned greedily: longer candidates match first, a matched span
consumes its actions, and scanning resumes after the span. Sequences matched
in more than ``floor(N * t2)`` participants' trails are the final patterns,
and one more greedy pass restricted to the final patterns fixes their counts.

Run patterns keep their step-one counts and never enter the greedy matching,
so an action may contribute to one run pattern and one sequence pattern.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .actions import DESELECT_COUNTRY, SELECT_COUNTRY
from .errors import ConfigError
from .eventlog import SessionLog

T1_FRACTION = 0.25
T2_FRACTION = 0.20
MIN_LEN = 2
MAX_LEN = 10

# Both thresholds are adjustable, and tuning them interacts: whether a long
# sequence survives the first cut changes which of its windows are consumed
# during matching, and therefore which shorter sequences can still reach the
# second cut. Keep the first threshold high enough to drop one-off noise but
# low enough, relative to the number of action types, to leave a workable
# candidate pool.

Seq = tuple[str, ...]


@dataclass(frozen=True)
class Trail:
    participant_id: str
    actions: tuple[str, ...]


@dataclass(frozen=True)
class RunPattern:
    action: str
    support: int  # distinct participants with at least one run
    total_runs: int
    participant_runs: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class FinalPattern:
    tokens: Seq
    support: int  # distinct participants matched in the selection pass
    matched_total: int  # occurrences in the final counting pass
    participant_matches: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PatternSet:
    n_participants: int
    t1_fraction: float
    t2_fraction: float
    min_len: int
    max_len: int
    run_patterns: tuple[RunPattern, ...]
    sequence_candidates: Mapping[Seq, int]  # sequence -> participant support
    final_patterns: tuple[FinalPattern, ...]


def normalize_actions(actions: Sequence[str]) -> tuple[tuple[str, ...], list[tuple[str, int]]]:
    """Apply the select/deselect equivalence, then collapse consecutive repeats.

    Returns the collapsed action tuple plus the (action, run_length) list the
    run patterns are counted from.
    """
    mapped = [SELECT_COUNTRY if a == DESELECT_COUNTRY else a for a in actions]
    collapsed: list[str] = []
    runs: list[tuple[str, int]] = []
    for a in mapped:
        if collapsed and collapsed[-1] == a:
            runs[-1] = (a, runs[-1][1] + 1)
        else:
            collapsed.append(a)
            runs.append((a, 1))
    return tuple(collapsed), runs


def normalize_trail(participant_id: str, actions: Sequence[str]) -> Trail:
    collapsed, _ = normalize_actions(actions)
    return Trail(participant_id=participant_id, actions=collapsed)


def enumerate_sequences(trail: Trail, min_len: int = MIN_LEN, max_len: int = MAX_LEN) -> set[Seq]:
    """All distinct contiguous subsequences of ``min_len..max_len`` actions."""
    actions = trail.actions
    n = len(actions)
    found: set[Seq] = set()
    for start in range(n):
        upper = min(max_len, n - start)
        for length in range(min_len, upper + 1):
            found.add(tuple(actions[start : start + length]))
    return found


def support_threshold(n_participants: int, fraction: float) -> int:
    """Patterns must occur in strictly more than this many participants' trails."""
    return int(n_participants * fraction)


def select_candidates(
    per_participant: Mapping[str, set[Seq]], n_participants: int, t1_fraction: float = T1_FRACTION
) -> dict[Seq, int]:
    """Sequences whose distinct-participant support exceeds ``floor(N * t1)``."""
    support: Counter[Seq] = Counter()
    for seqs in per_participant.values():
        support.update(seqs)
    cut = support_threshold(n_participants, t1_fraction)
    return {seq: count for seq, count in support.items() if count > cut}


def candidate_order(candidates: Mapping[Seq, int]) -> list[Seq]:
    """Longest first; ties broken by higher support, then token order."""
    return sorted(candidates, key=lambda s: (-len(s), -candidates[s], s))


def greedy_match(
    trail: Trail, candidates: Mapping[Seq, int] | Iterable[Seq]
) -> list[tuple[Seq, int]]:
    """Left-to-right scan matching each action into at most one candidate.

    At every position the longest matching candidate wins and consumes its
    span; scanning resumes at the action after the span, or advances by one
    when nothing matches. Returns (pattern, start index) pairs in scan order.
    """
    if not isinstance(candidates, Mapping):
        candidates = {tuple(seq): 0 for seq in candidates}
    ordered = candidate_order(candidates)
    by_length: dict[int, list[Seq]] = {}
    for seq in ordered:
        by_length.setdefault(len(seq), []).append(seq)
    lengths = sorted(by_length, reverse=True)

    actions = trail.actions
    n = len(actions)
    matches: list[tuple[Seq, int]] = []
    pos = 0
    while pos < n:
        hit: Seq | None = None
        for length in lengths:
            if pos + length > n:
                continue
            window = tuple(actions[pos : pos + length])
            for seq in by_length[length]:
                if window == seq:
                    hit = seq
                    break
            if hit is not None:
                break
        if hit is None:
            pos += 1
        else:
            matches.append((hit, pos))
            pos += len(hit)
    return matches


def _match_counts(
    trails: Sequence[Trail], candidates: Mapping[Seq, int]
) -> tuple[dict[Seq, dict[str, int]], dict[Seq, int]]:
    """Per-pattern participant match counts and distinct-participant support."""
    per_pattern: dict[Seq, dict[str, int]] = {}
    for trail in trails:
        for seq, _ in greedy_match(trail, candidates):
            per_pattern.setdefault(seq, {}).setdefault(trail.participant_id, 0)
            per_pattern[seq][trail.participant_id] += 1
    support = {seq: len(counts) for seq, counts in per_pattern.items()}
    return per_pattern, support


def mine_patterns(
    logs: Mapping[str, SessionLog] | Sequence[Trail],
    t1_fraction: float = T1_FRACTION,
    t2_fraction: float = T2_FRACTION,
    min_len: int = MIN_LEN,
    max_len: int = MAX_LEN,
) -> PatternSet:
    """Run the full extraction pipeline over one trail per participant."""
    if t2_fraction > t1_fraction:
        raise ConfigError("t2 must not exceed t1")
    if min_len < 2 or max_len < min_len:
        raise ConfigError(f"bad length bounds ({min_len}, {max_len})")

    if isinstance(logs, Mapping):
        raw = [(pid, [ev.action for ev in log.events]) for pid, log in sorted(logs.items())]
        trails: list[Trail] = []
        run_lists: dict[str, list[tuple[str, int]]] = {}
        for pid, actions in raw:
            collapsed, runs = normalize_actions(actions)
            trails.append(Trail(pid, collapsed))
            run_lists[pid] = runs
    else:
        trails = sorted(logs, key=lambda t: t.participant_id)
        run_lists = {t.participant_id: [(a, 1) for a in t.actions] for t in trails}

    n = len(trails)
    if n < 1:
        raise ConfigError("at least one participant required")

    # step one: run patterns from the collapse counts
    runs_by_action: dict[str, dict[str, int]] = {}
    for pid, runs in run_lists.items():
        for action, _length in runs:
            runs_by_action.setdefault(action, {}).setdefault(pid, 0)
            runs_by_action[action][pid] += 1
    run_patterns = tuple(
        RunPattern(
            action=action,
            support=len(counts),
            total_runs=sum(counts.values()),
            participant_runs=dict(sorted(counts.items())),
        )
        for action, counts in sorted(runs_by_action.items())
    )

    # step two: exhaustive windows, then the first support cut
    per_participant = {t.participant_id: enumerate_sequences(t, min_len, max_len) for t in trails}
    candidates = select_candidates(per_participant, n, t1_fraction)

    # step three: greedy matching, the second support cut, and a final count pass
    _, matched_support = _match_counts(trails, candidates)
    t2_cut = support_threshold(n, t2_fraction)
    final_seqs = {seq: candidates[seq] for seq, sup in matched_support.items() if sup > t2_cut}
    final_counts, _ = _match_counts(trails, final_seqs)

    final_patterns = tuple(
        FinalPattern(
            tokens=seq,
            support=matched_support[seq],
            matched_total=sum(final_counts.get(seq, {}).values()),
            participant_matches=dict(sorted(final_counts.get(seq, {}).items())),
        )
        for seq in sorted(final_seqs, key=lambda s: (-matched_support[s], s))
    )

    return PatternSet(
        n_participants=n,
        t1_fraction=t1_fraction,
        t2_fraction=t2_fraction,
        min_len=min_len,
        max_len=max_len,
        run_patterns=run_patterns,
        sequence_candidates=dict(sorted(candidates.items())),
        final_patterns=final_patterns,
    )


def pattern_name(tokens: Seq) -> str:
    return ">".join(tokens)


def pattern_set_to_json(ps: PatternSet) -> dict:
    return {
        "n_participants": ps.n_participants,
        "t1_fraction": ps.t1_fraction,
        "t2_fraction": ps.t2_fraction,
        "min_len": ps.min_len,
        "max_len": ps.max_len,
        "run_patterns": [
            {
                "action": rp.action,
                "support": rp.support,
                "total_runs": rp.total_runs,
                "participant_runs": rp.participant_runs,
            }
            for rp in ps.run_patterns
        ],
        "sequence_candidates": [
            {"tokens": list(seq), "support": sup} for seq, sup in ps.sequence_candidates.items()
        ],
        "final_patterns": [
            {
                "tokens": list(fp.tokens),
                "support": fp.support,
                "matched_total": fp.matched_total,
                "participant_matches": fp.participant_matches,
            }
            for fp in ps.final_patterns
        ],
    }


def pattern_set_from_json(obj: dict) -> PatternSet:
    return PatternSet(
        n_participants=obj["n_participants"],
        t1_fraction=obj["t1_fraction"],
        t2_fraction=obj["t2_fraction"],
        min_len=obj["min_len"],
        max_len=obj["max_len"],
        run_patterns=tuple(
            RunPattern(
                action=rp["action"],
                support=rp["support"],
                total_runs=rp["total_runs"],
                participant_runs=rp["participant_runs"],
            )
            for rp in obj["run_patterns"]
        ),
        sequence_candidates={
            tuple(c["tokens"]): c["support"] for c in obj["sequence_candidates"]
        },
        final_patterns=tuple(
            FinalPattern(
                tokens=tuple(fp["tokens"]),
                support=fp["support"],
                matched_total=fp["matched_total"],
                participant_matches=fp["participant_matches"],
            )
            for fp in obj["final_patterns"]
        ),
    )
