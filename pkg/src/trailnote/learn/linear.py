"""One-vs-rest hinge-loss linear classifier, full-batch subgradient descent.

Inputs are standardized internally (mean zero, unit scale), which makes the
decision argmax invariant under uniform positive rescaling of the raw
features. Score ties at prediction time break toward the class seen more
often in training, then toward the lower class index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyDataError, SingleClassError

L2_PENALTY = 1e-3
EPOCHS = 500
STEP = 0.1


@dataclass(frozen=True)
class LinearModel:
    classes: tuple
    feature_names: tuple[str, ...]
    weights: np.ndarray  # (C, d), on standardized inputs
    bias: np.ndarray  # (C,)
    mean: np.ndarray  # (d,)
    scale: np.ndarray  # (d,)
    class_frequency: tuple[int, ...]
    l2: float
    epochs: int
    step: float
    seed: int = 0

    def scores(self, X: np.ndarray) -> np.ndarray:
        Xs = (np.asarray(X, dtype=float) - self.mean) / self.scale
        return Xs @ self.weights.T + self.bias

    def predict_index(self, X: np.ndarray) -> np.ndarray:
        scores = self.scores(X)
        out = np.empty(scores.shape[0], dtype=np.int64)
        for i, row in enumerate(scores):
            top = row.max()
            tied = [c for c in range(len(row)) if row[c] == top]
            tied.sort(key=lambda c: (-self.class_frequency[c], c))
            out[i] = tied[0]
        return out

    def predict(self, X: np.ndarray) -> list:
        return [self.classes[i] for i in self.predict_index(X)]


def train_linear(
    X: np.ndarray,
    y: Sequence[object],
    feature_names: Sequence[str],
    l2: float = L2_PENALTY,
    epochs: int = EPOCHS,
    step: float = STEP,
    seed: int = 0,
) -> LinearModel:
    """Fit one hinge-loss separator per class against the rest."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise EmptyDataError("cannot train on an empty matrix")
    if np.isnan(X).any():
        raise ValueError("feature matrix contains missing values")
    if len(y) != X.shape[0]:
        raise ValueError("labels out of step with matrix rows")
    if X.shape[1] != len(feature_names):
        raise ValueError("feature names out of step with matrix columns")

    classes = tuple(sorted(set(y)))
    if len(classes) < 2:
        raise SingleClassError(f"training labels hold a single class: {classes}")
    index = {c: i for i, c in enumerate(classes)}
    y_idx = np.asarray([index[label] for label in y], dtype=np.int64)

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    Xs = (X - mean) / scale

    n, d = Xs.shape
    weights = np.zeros((len(classes), d))
    bias = np.zeros(len(classes))
    for c in range(len(classes)):
        t = np.where(y_idx == c, 1.0, -1.0)
        w = np.zeros(d)
        b = 0.0
        for _ in range(epochs):
            margins = t * (Xs @ w + b)
            viol = margins < 1.0
            grad_w = l2 * w - (Xs[viol] * t[viol, None]).sum(axis=0) / n
            grad_b = -t[viol].sum() / n
            w = w - step * grad_w
            b = b - step * grad_b
        weights[c] = w
        bias[c] = b

    freq = tuple(int((y_idx == c).sum()) for c in range(len(classes)))
    return LinearModel(
        classes=classes,
        feature_names=tuple(feature_names),
        weights=weights,
        bias=bias,
        mean=mean,
        scale=scale,
        class_frequency=freq,
        l2=l2,
        epochs=epochs,
        step=step,
        seed=seed,
    )
