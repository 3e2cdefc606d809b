"""Classifier evaluation: accuracy, Cohen's kappa, one-vs-rest F1, bands.

Interval conventions, labeled in every report: the accuracy half-width is
the 95% normal approximation 1.96 * sqrt(p(1-p)/n); kappa and F1 half-widths
are half the spread of a 95% percentile bootstrap over test-set resamples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import EmptyTestError

N_BOOTSTRAP = 2000
INTERVAL_METHOD = (
    "accuracy: 95% normal approximation; "
    "kappa/F1: 95% percentile bootstrap over test resamples"
)

# Agreement bands over kappa; the upper edge belongs to the band below it.
_BANDS = ((0.20, "slight"), (0.40, "fair"), (0.60, "moderate"), (0.80, "substantial"))


def kappa_band(kappa: float) -> str:
    if kappa < 0.0:
        return "poor"
    for upper, name in _BANDS:
        if kappa <= upper:
            return name
    return "almost_perfect"


def confusion_matrix(
    y_true: Sequence[object], y_pred: Sequence[object], classes: Sequence[object]
) -> np.ndarray:
    """Rows are true classes, columns predicted."""
    index = {c: i for i, c in enumerate(classes)}
    m = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        m[index[t], index[p]] += 1
    return m


def accuracy_from_confusion(m: np.ndarray) -> float:
    return float(np.trace(m) / m.sum())


def kappa_from_confusion(m: np.ndarray) -> float:
    """Observed vs chance agreement from the marginals.

    Counts are whole numbers, so the ratio (p_o - p_e) / (1 - p_e) is formed
    as (total*trace - sum(row_i*col_i)) / (total^2 - sum(row_i*col_i)) in
    exact integer arithmetic with one final division; this keeps simple
    fractions bit-exact. With all mass in one cell chance agreement is 1 and
    the ratio is 0/0; that boundary is pinned to 1 on the diagonal (total
    agreement) and 0 off it (no information).
    """
    rows = [int(r) for r in m.sum(axis=1)]
    cols = [int(c) for c in m.sum(axis=0)]
    total = sum(rows)
    trace = sum(int(m[i, i]) for i in range(m.shape[0]))
    chance = sum(r * c for r, c in zip(rows, cols))
    if total * total == chance:
        return 1.0 if trace == total else 0.0
    return (total * trace - chance) / (total * total - chance)


def f1_from_confusion(m: np.ndarray) -> np.ndarray:
    """One-vs-rest F1 per class; 0 where precision and recall are both 0."""
    tp = np.diag(m).astype(float)
    col = m.sum(axis=0).astype(float)
    row = m.sum(axis=1).astype(float)
    precision = np.divide(tp, col, out=np.zeros_like(tp), where=col > 0)
    recall = np.divide(tp, row, out=np.zeros_like(tp), where=row > 0)
    pr = precision + recall
    return np.divide(2 * precision * recall, pr, out=np.zeros_like(tp), where=pr > 0)


@dataclass(frozen=True)
class EvalReport:
    classes: tuple
    confusion: tuple[tuple[int, ...], ...]
    n_test: int
    accuracy: float
    accuracy_half_width: float
    kappa: float
    kappa_half_width: float
    kappa_band: str
    f1: Mapping[object, float]
    f1_half_widths: Mapping[object, float]
    macro_f1: float
    n_bootstrap: int
    interval_method: str = INTERVAL_METHOD

    def to_json(self) -> dict:
        return {
            "classes": [str(c) for c in self.classes],
            "confusion": [list(row) for row in self.confusion],
            "n_test": self.n_test,
            "accuracy": self.accuracy,
            "accuracy_half_width": self.accuracy_half_width,
            "kappa": self.kappa,
            "kappa_half_width": self.kappa_half_width,
            "kappa_band": self.kappa_band,
            "f1": {str(c): v for c, v in self.f1.items()},
            "f1_half_widths": {str(c): v for c, v in self.f1_half_widths.items()},
            "macro_f1": self.macro_f1,
            "n_bootstrap": self.n_bootstrap,
            "interval_method": self.interval_method,
        }


def _half_width(reps: list[float], level: float = 0.95) -> float:
    if not reps:
        return 0.0
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(np.asarray(reps), [alpha, 1.0 - alpha])
    return float((hi - lo) / 2.0)


def evaluate_predictions(
    y_true: Sequence[object],
    y_pred: Sequence[object],
    classes: Sequence[object] | None = None,
    n_bootstrap: int = N_BOOTSTRAP,
    seed: int = 0,
) -> EvalReport:
    """Score predictions against truth; bootstrap is deterministic per seed."""
    n = len(y_true)
    if n == 0:
        raise EmptyTestError("no test rows to evaluate")
    if len(y_pred) != n:
        raise ValueError("predictions out of step with truth")
    cls = tuple(classes) if classes is not None else tuple(sorted(set(y_true) | set(y_pred)))
    known = set(cls)
    stray = [v for v in list(y_true) + list(y_pred) if v not in known]
    if stray:
        raise ValueError(f"labels outside the class list: {sorted(set(map(str, stray)))}")

    m = confusion_matrix(y_true, y_pred, cls)
    acc = accuracy_from_confusion(m)
    kappa = kappa_from_confusion(m)
    f1 = f1_from_confusion(m)

    index = {c: i for i, c in enumerate(cls)}
    flat = np.asarray(
        [index[t] * len(cls) + index[p] for t, p in zip(y_true, y_pred)], dtype=np.int64
    )
    kappa_reps: list[float] = []
    f1_reps: list[list[float]] = [[] for _ in cls]
    for rep in range(n_bootstrap):
        rng = np.random.default_rng([seed, rep])
        counts = np.bincount(flat[rng.integers(0, n, size=n)], minlength=len(cls) ** 2)
        mm = counts.reshape(len(cls), len(cls))
        kappa_reps.append(kappa_from_confusion(mm))
        rep_f1 = f1_from_confusion(mm)
        for i in range(len(cls)):
            f1_reps[i].append(float(rep_f1[i]))

    return EvalReport(
        classes=cls,
        confusion=tuple(tuple(int(v) for v in row) for row in m),
        n_test=n,
        accuracy=acc,
        accuracy_half_width=1.96 * float(np.sqrt(acc * (1.0 - acc) / n)),
        kappa=kappa,
        kappa_half_width=_half_width(kappa_reps),
        kappa_band=kappa_band(kappa),
        f1={c: float(f1[i]) for i, c in enumerate(cls)},
        f1_half_widths={c: _half_width(f1_reps[i]) for i, c in enumerate(cls)},
        macro_f1=float(f1.mean()),
        n_bootstrap=n_bootstrap,
    )


def evaluate(
    model,
    X_test: np.ndarray,
    y_test: Sequence[object],
    n_bootstrap: int = N_BOOTSTRAP,
    seed: int = 0,
) -> EvalReport:
    """Predict the held-out rows and score them against their labels."""
    if len(y_test) == 0:
        raise EmptyTestError("no test rows to evaluate")
    y_pred = model.predict(np.asarray(X_test, dtype=float))
    return evaluate_predictions(
        y_test, y_pred, classes=model.classes, n_bootstrap=n_bootstrap, seed=seed
    )
