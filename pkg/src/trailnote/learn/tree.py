"""Single classification tree with axis-aligned splits on gini impurity.

Trees are stored as flat node arrays so prediction can walk a whole batch
level by level instead of row by row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray  # split feature per node, -1 at leaves
    threshold: np.ndarray  # split threshold per node
    left: np.ndarray  # child indices, -1 at leaves
    right: np.ndarray
    leaf_class: np.ndarray  # class index at leaves, -1 at internal nodes

    def predict_class(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        pending = np.flatnonzero(self.leaf_class[node] < 0)
        while pending.size:
            cur = node[pending]
            go_left = X[pending, self.feature[cur]] <= self.threshold[cur]
            node[pending] = np.where(go_left, self.left[cur], self.right[cur])
            pending = pending[self.leaf_class[node[pending]] < 0]
        return self.leaf_class[node]

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_class": self.leaf_class.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "Tree":
        return Tree(
            feature=np.asarray(obj["feature"], dtype=np.int64),
            threshold=np.asarray(obj["threshold"], dtype=float),
            left=np.asarray(obj["left"], dtype=np.int64),
            right=np.asarray(obj["right"], dtype=np.int64),
            leaf_class=np.asarray(obj["leaf_class"], dtype=np.int64),
        )


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    features: np.ndarray,
    n_classes: int,
    min_leaf: int,
) -> tuple[int, float, np.ndarray, np.ndarray] | None:
    """Lowest weighted gini over the candidate features; None if unsplittable.

    Ties keep the earliest feature in draw order and the leftmost boundary,
    which pins the built tree for a given random stream.
    """
    n = rows.size
    best_score = np.inf
    best: tuple[int, float] | None = None
    for f in features:
        v = X[rows, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        if vs[0] == vs[-1]:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y[rows][order]] = 1.0
        cum = np.cumsum(onehot, axis=0)
        total = cum[-1]

        sizes = np.arange(1, n, dtype=float)
        left_counts = cum[:-1]
        right_counts = total - left_counts
        gini_left = 1.0 - ((left_counts / sizes[:, None]) ** 2).sum(axis=1)
        gini_right = 1.0 - ((right_counts / (n - sizes)[:, None]) ** 2).sum(axis=1)
        weighted = (sizes * gini_left + (n - sizes) * gini_right) / n
        valid = (vs[1:] != vs[:-1]) & (sizes >= min_leaf) & ((n - sizes) >= min_leaf)
        if not valid.any():
            continue
        weighted = np.where(valid, weighted, np.inf)
        j = int(np.argmin(weighted))
        if weighted[j] < best_score:
            best_score = float(weighted[j])
            best = (int(f), (vs[j] + vs[j + 1]) / 2.0)
    if best is None:
        return None
    f, thr = best
    go_left = X[rows, f] <= thr
    return f, thr, rows[go_left], rows[~go_left]


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_features: int,
    min_leaf: int,
    rng: np.random.Generator,
) -> Tree:
    """Grow one tree depth-first; the rng drives the per-node feature draws."""
    n_features = X.shape[1]
    k = min(max_features, n_features)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf_class: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_class.append(-1)
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray]] = [(root, np.arange(X.shape[0]))]
    while stack:
        node, rows = stack.pop()
        counts = np.bincount(y[rows], minlength=n_classes)
        if rows.size < 2 * min_leaf or counts.max() == rows.size:
            leaf_class[node] = int(np.argmax(counts))
            continue
        candidates = rng.choice(n_features, size=k, replace=False)
        split = _best_split(X, y, rows, candidates, n_classes, min_leaf)
        if split is None:
            leaf_class[node] = int(np.argmax(counts))
            continue
        f, thr, left_rows, right_rows = split
        feature[node] = f
        threshold[node] = thr
        left_id = new_node()
        right_id = new_node()
        left[node] = left_id
        right[node] = right_id
        # right first so the left child is processed next (LIFO), keeping
        # rng draws in strict depth-first-left order
        stack.append((right_id, right_rows))
        stack.append((left_id, left_rows))

    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        leaf_class=np.asarray(leaf_class, dtype=np.int64),
    )
