"""Participant-disjoint train/test splitting.

Whole participants go to one side or the other, so no participant's notes
leak across the boundary. The assignment targets the requested note-count
fraction while keeping the per-class label proportions of the two sides
close: seeded greedy fills are refined by local moves, and small cohorts
fall back to an exhaustive sweep when the greedy result misses the
divergence target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InfeasibleSplitError

TRAIN_FRACTION = 0.8
DIVERGENCE_TARGET = 0.10
_RESTARTS = 64
_EXHAUSTIVE_MAX = 18


@dataclass(frozen=True)
class SplitPlan:
    train: frozenset[str]
    test: frozenset[str]
    seed: int
    train_participants: tuple[str, ...]
    test_participants: tuple[str, ...]
    train_fraction: float
    divergence: float

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "train_participants": list(self.train_participants),
            "test_participants": list(self.test_participants),
            "train_fraction": self.train_fraction,
            "divergence": self.divergence,
        }


class _Cohort:
    def __init__(self, pids: list[str], note_counts: np.ndarray, label_counts: np.ndarray):
        self.pids = pids
        self.note_counts = note_counts  # (P,)
        self.label_counts = label_counts  # (P, C)
        self.total = int(note_counts.sum())
        self.total_labels = label_counts.sum(axis=0)
        self.max_notes = int(note_counts.max())

    def divergence(self, test_mask: np.ndarray) -> float:
        test_labels = self.label_counts[test_mask].sum(axis=0)
        train_labels = self.total_labels - test_labels
        test_n = test_labels.sum()
        train_n = train_labels.sum()
        if test_n == 0 or train_n == 0:
            return float("inf")
        return float(np.abs(train_labels / train_n - test_labels / test_n).max())

    def key(self, test_mask: np.ndarray, target_test: float) -> tuple[float, float]:
        frac_err = abs(float(self.note_counts[test_mask].sum()) - target_test)
        return (self.divergence(test_mask), frac_err)

    def within_one_participant(self, test_mask: np.ndarray, target_test: float) -> bool:
        return abs(float(self.note_counts[test_mask].sum()) - target_test) <= self.max_notes


def _greedy_fill(cohort: _Cohort, order: np.ndarray, target_test: float) -> np.ndarray:
    mask = np.zeros(len(cohort.pids), dtype=bool)
    count = 0.0
    picked: list[int] = []
    for p in order:
        if count >= target_test:
            break
        mask[p] = True
        picked.append(int(p))
        count += float(cohort.note_counts[p])
    # dropping the last pick may land closer to the target
    if len(picked) > 1:
        last = picked[-1]
        without = count - float(cohort.note_counts[last])
        if abs(without - target_test) < abs(count - target_test):
            mask[last] = False
    return mask


def _hill_climb(cohort: _Cohort, mask: np.ndarray, target_test: float) -> np.ndarray:
    """First-improvement moves and swaps; keeps both sides nonempty and the
    note fraction within one participant's worth of the target."""
    mask = mask.copy()
    best = cohort.key(mask, target_test)
    for _ in range(100):
        improved = False
        p_count = len(cohort.pids)
        test_idx = [i for i in range(p_count) if mask[i]]
        train_idx = [i for i in range(p_count) if not mask[i]]
        moves: list[tuple[int, ...]] = [(i,) for i in test_idx + train_idx]
        moves.extend((i, j) for i in test_idx for j in train_idx)
        for move in moves:
            cand = mask.copy()
            for i in move:
                cand[i] = not cand[i]
            if not cand.any() or cand.all():
                continue
            if not cohort.within_one_participant(cand, target_test):
                continue
            key = cohort.key(cand, target_test)
            if key < best:
                mask, best = cand, key
                improved = True
                break
        if not improved:
            break
    return mask


def grouped_split(
    note_ids: Sequence[str],
    participant_ids: Sequence[str],
    labels: Sequence[object],
    train_fraction: float = TRAIN_FRACTION,
    seed: int = 0,
    divergence_target: float = DIVERGENCE_TARGET,
    n_restarts: int = _RESTARTS,
) -> SplitPlan:
    """Assign whole participants to train/test, deterministic per seed."""
    if len(note_ids) != len(participant_ids) or len(note_ids) != len(labels):
        raise ValueError("note_ids, participant_ids, labels must align")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")

    per_pid_notes: dict[str, list[str]] = {}
    per_pid_labels: dict[str, dict[object, int]] = {}
    for nid, pid, label in zip(note_ids, participant_ids, labels):
        if label is None:
            raise ValueError(f"note {nid!r} has no label; drop unlabeled rows before splitting")
        per_pid_notes.setdefault(pid, []).append(nid)
        per_pid_labels.setdefault(pid, {}).setdefault(label, 0)
        per_pid_labels[pid][label] += 1

    pids = sorted(per_pid_notes)
    if len(pids) < 2:
        raise InfeasibleSplitError("need at least two participants to split")
    classes = sorted({label for label in labels})
    class_index = {c: i for i, c in enumerate(classes)}
    note_counts = np.array([len(per_pid_notes[p]) for p in pids], dtype=float)
    label_counts = np.zeros((len(pids), len(classes)))
    for i, p in enumerate(pids):
        for label, c in per_pid_labels[p].items():
            label_counts[i, class_index[label]] = c

    total = int(note_counts.sum())
    biggest = int(note_counts.max())
    if biggest > train_fraction * total:
        raise InfeasibleSplitError(
            f"one participant holds {biggest}/{total} notes, more than the train share"
        )

    cohort = _Cohort(pids, note_counts, label_counts)
    target_test = total * (1.0 - train_fraction)

    rng = np.random.default_rng([seed])
    best_mask: np.ndarray | None = None
    best_key: tuple[float, float] | None = None
    for _ in range(n_restarts):
        order = rng.permutation(len(pids))
        mask = _greedy_fill(cohort, order, target_test)
        if not mask.any() or mask.all():
            continue
        mask = _hill_climb(cohort, mask, target_test)
        key = cohort.key(mask, target_test)
        if best_key is None or key < best_key:
            best_mask, best_key = mask, key

    # greedy can miss tight arrangements on tiny cohorts; sweep them all
    if (
        best_key is not None
        and best_key[0] > divergence_target
        and len(pids) <= _EXHAUSTIVE_MAX
    ):
        for bits in range(1, 2 ** len(pids) - 1):
            cand = np.array([(bits >> i) & 1 == 1 for i in range(len(pids))])
            if not cohort.within_one_participant(cand, target_test):
                continue
            key = cohort.key(cand, target_test)
            if key < best_key:
                best_mask, best_key = cand, key

    if best_mask is None:
        raise InfeasibleSplitError("no valid assignment found")

    test_pids = tuple(p for i, p in enumerate(pids) if best_mask[i])
    train_pids = tuple(p for i, p in enumerate(pids) if not best_mask[i])
    train_notes = frozenset(n for p in train_pids for n in per_pid_notes[p])
    test_notes = frozenset(n for p in test_pids for n in per_pid_notes[p])
    return SplitPlan(
        train=train_notes,
        test=test_notes,
        seed=seed,
        train_participants=train_pids,
        test_participants=test_pids,
        train_fraction=len(train_notes) / total,
        divergence=best_key[0],
    )


def split_matrix(matrix, train_fraction: float = TRAIN_FRACTION, seed: int = 0, **kwargs):
    """Split a feature matrix, dropping notes without a label first.

    Returns (plan, train_row_indices, test_row_indices).
    """
    keep = [i for i, label in enumerate(matrix.labels) if label is not None]
    plan = grouped_split(
        [matrix.note_ids[i] for i in keep],
        [matrix.participant_ids[i] for i in keep],
        [matrix.labels[i] for i in keep],
        train_fraction=train_fraction,
        seed=seed,
        **kwargs,
    )
    train_rows = [i for i in keep if matrix.note_ids[i] in plan.train]
    test_rows = [i for i in keep if matrix.note_ids[i] in plan.test]
    return plan, train_rows, test_rows
