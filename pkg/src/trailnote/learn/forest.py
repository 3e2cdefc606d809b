"""Bagged decision forest trained from scratch.

Each tree gets its own generator derived from (seed, tree index), draws its
bootstrap sample from it, and keeps using it for feature subsets while
growing. Trees are therefore independent of scheduling: training with one
worker or many yields bit-identical models.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyDataError, SingleClassError
from .tree import Tree, build_tree

N_TREES = 500
MIN_LEAF = 1


@dataclass(frozen=True)
class ForestModel:
    classes: tuple
    feature_names: tuple[str, ...]
    trees: tuple[Tree, ...]
    n_trees: int
    max_features: int
    min_leaf: int
    seed: int

    def votes(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        counts = np.zeros((X.shape[0], len(self.classes)))
        for tree in self.trees:
            counts[np.arange(X.shape[0]), tree.predict_class(X)] += 1.0
        return counts

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting for each class."""
        return self.votes(X) / len(self.trees)

    def predict_index(self, X: np.ndarray) -> np.ndarray:
        # argmax takes the first maximum, so vote ties go to the lowest class index
        return np.argmax(self.votes(X), axis=1)

    def predict(self, X: np.ndarray) -> list:
        return [self.classes[i] for i in self.predict_index(X)]


def _tree_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _grow(args) -> Tree:
    X, y, n_classes, max_features, min_leaf, seed, index = args
    rng = _tree_rng(seed, index)
    rows = rng.integers(0, X.shape[0], size=X.shape[0])
    return build_tree(X[rows], y[rows], n_classes, max_features, min_leaf, rng)


def train_forest(
    X: np.ndarray,
    y: Sequence[object],
    feature_names: Sequence[str],
    n_trees: int = N_TREES,
    max_features: int | None = None,
    min_leaf: int = MIN_LEAF,
    seed: int = 0,
    workers: int = 1,
) -> ForestModel:
    """Fit a majority-vote forest; deterministic per seed at any worker count."""
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

    if max_features is None:
        max_features = max(1, math.floor(math.sqrt(X.shape[1])))

    jobs = [(X, y_idx, len(classes), max_features, min_leaf, seed, t) for t in range(n_trees)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = tuple(pool.map(_grow, jobs))
    else:
        trees = tuple(_grow(job) for job in jobs)

    return ForestModel(
        classes=classes,
        feature_names=tuple(feature_names),
        trees=trees,
        n_trees=n_trees,
        max_features=max_features,
        min_leaf=min_leaf,
        seed=seed,
    )
