"""Shapley-value feature attribution for trained classifiers.

The value of a feature coalition replaces every non-coalition feature with
background values (marginal replacement) and averages the model output over
the background rows. Exact mode enumerates all coalitions, which is feasible
only for small feature counts; sampled mode is the permutation estimator
with one background row drawn per permutation. Both batch their model calls,
so a forest is evaluated a handful of times, not once per coalition.

The attributed output is the predicted class's probability unless a target
class is named.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionTooLargeError, EmptyDataError

EXACT_MAX_FEATURES = 12
MAX_BACKGROUND = 200
_MAX_ROWS = 250_000  # per model call; keeps coalition batches in memory


@dataclass(frozen=True)
class Attribution:
    note_id: str
    phi: Mapping[str, float]
    base_value: float
    model_output: float
    feature_values: Mapping[str, float]
    target_class: object | None
    method: str


@dataclass(frozen=True)
class AttributionSummary:
    ranking: tuple[str, ...]  # by mean |phi|, descending; name breaks ties
    mean_abs_phi: Mapping[str, float]
    scatter: Mapping[str, tuple[tuple[float, float], ...]]  # feature -> (phi, value) pairs
    n_cases: int
    method: str


def _resolve_output(
    model, instance: np.ndarray, target_class: object | None
) -> tuple[Callable[[np.ndarray], np.ndarray], object | None]:
    if callable(model) and not hasattr(model, "predict_proba"):
        return model, None
    if target_class is None:
        idx = int(model.predict_index(instance[None, :])[0])
    else:
        idx = list(model.classes).index(target_class)

    def fn(X: np.ndarray) -> np.ndarray:
        return model.predict_proba(X)[:, idx]

    return fn, model.classes[idx]


def _prepare(
    model, instance, background, feature_names
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    x = np.asarray(instance, dtype=float).reshape(-1)
    bg = np.asarray(background, dtype=float)
    if bg.ndim == 1:
        bg = bg[None, :]
    if bg.shape[0] == 0:
        raise EmptyDataError("background set is empty")
    if bg.shape[1] != x.size:
        raise ValueError("background width does not match the instance")
    if bg.shape[0] > MAX_BACKGROUND:
        bg = bg[:MAX_BACKGROUND]
    if feature_names is None:
        feature_names = getattr(model, "feature_names", None)
    names = tuple(feature_names) if feature_names else tuple(f"f{i}" for i in range(x.size))
    if len(names) != x.size:
        raise ValueError("feature names do not match the instance width")
    return x, bg, names


def exact_shapley(
    model,
    instance: Sequence[float] | np.ndarray,
    background: np.ndarray,
    feature_names: Sequence[str] | None = None,
    note_id: str = "",
    target_class: object | None = None,
) -> Attribution:
    """Enumerate all coalitions; additivity holds to float precision."""
    x, bg, names = _prepare(model, instance, background, feature_names)
    d = x.size
    if d > EXACT_MAX_FEATURES:
        raise DimensionTooLargeError(d, EXACT_MAX_FEATURES)
    fn, resolved_class = _resolve_output(model, x, target_class)

    n_coalitions = 1 << d
    B = bg.shape[0]
    v = np.empty(n_coalitions)
    chunk = max(1, _MAX_ROWS // B)
    for start in range(0, n_coalitions, chunk):
        masks = range(start, min(start + chunk, n_coalitions))
        rows = np.tile(bg, (len(masks), 1))
        for i, mask in enumerate(masks):
            block = rows[i * B : (i + 1) * B]
            for j in range(d):
                if mask >> j & 1:
                    block[:, j] = x[j]
        v[list(masks)] = np.asarray(fn(rows), dtype=float).reshape(len(masks), B).mean(axis=1)

    fact = [math.factorial(i) for i in range(d + 1)]
    weight = [fact[s] * fact[d - 1 - s] / fact[d] for s in range(d)]
    phi = np.zeros(d)
    for mask in range(n_coalitions):
        w = weight[mask.bit_count()] if mask.bit_count() < d else 0.0
        for j in range(d):
            if not mask >> j & 1:
                phi[j] += w * (v[mask | (1 << j)] - v[mask])

    return Attribution(
        note_id=note_id,
        phi={name: float(p) for name, p in zip(names, phi)},
        base_value=float(v[0]),
        model_output=float(v[n_coalitions - 1]),
        feature_values={name: float(val) for name, val in zip(names, x)},
        target_class=resolved_class,
        method=f"exact (marginal replacement, {B} background rows)",
    )


def sampled_shapley(
    model,
    instance: Sequence[float] | np.ndarray,
    background: np.ndarray,
    n_permutations: int = 2000,
    seed: int = 0,
    feature_names: Sequence[str] | None = None,
    note_id: str = "",
    target_class: object | None = None,
) -> Attribution:
    """Permutation estimator; one background row per permutation, per-seed
    deterministic. The base value is the mean output over the drawn rows, so
    additivity holds exactly for the sample as well."""
    if n_permutations < 1:
        raise ValueError("need at least one permutation")
    x, bg, names = _prepare(model, instance, background, feature_names)
    d = x.size
    fn, resolved_class = _resolve_output(model, x, target_class)

    rng = np.random.default_rng([seed])
    perms = np.vstack([rng.permutation(d) for _ in range(n_permutations)])
    bg_rows = rng.integers(0, bg.shape[0], size=n_permutations)

    phi = np.zeros(d)
    base_sum = 0.0
    per_call = max(1, _MAX_ROWS // (d + 1))
    for start in range(0, n_permutations, per_call):
        stop = min(start + per_call, n_permutations)
        count = stop - start
        rows = np.empty((count, d + 1, d))
        for p in range(count):
            cur = bg[bg_rows[start + p]].copy()
            rows[p, 0] = cur
            for step, j in enumerate(perms[start + p], start=1):
                cur[j] = x[j]
                rows[p, step] = cur
        out = np.asarray(fn(rows.reshape(-1, d)), dtype=float).reshape(count, d + 1)
        base_sum += float(out[:, 0].sum())
        diffs = np.diff(out, axis=1)
        for p in range(count):
            phi[perms[start + p]] += diffs[p]

    phi /= n_permutations
    model_output = float(np.asarray(fn(x[None, :]), dtype=float)[0])
    return Attribution(
        note_id=note_id,
        phi={name: float(p) for name, p in zip(names, phi)},
        base_value=base_sum / n_permutations,
        model_output=model_output,
        feature_values={name: float(val) for name, val in zip(names, x)},
        target_class=resolved_class,
        method=(
            f"sampled ({n_permutations} permutations, marginal replacement, "
            f"{bg.shape[0]} background rows)"
        ),
    )


def summarize(attributions: Sequence[Attribution], top_k: int | None = None) -> AttributionSummary:
    """Rank features by the average magnitude of their attribution."""
    if not attributions:
        raise EmptyDataError("no attributions to summarize")
    names = list(attributions[0].phi)
    for a in attributions:
        if list(a.phi) != names:
            raise ValueError("attributions disagree on feature names")
    mean_abs = {
        name: sum(abs(a.phi[name]) for a in attributions) / len(attributions) for name in names
    }
    ranking = tuple(sorted(names, key=lambda n: (-mean_abs[n], n)))
    if top_k is not None:
        ranking = ranking[:top_k]
    scatter = {
        name: tuple((a.phi[name], a.feature_values[name]) for a in attributions)
        for name in ranking
    }
    return AttributionSummary(
        ranking=ranking,
        mean_abs_phi={n: mean_abs[n] for n in ranking},
        scatter=scatter,
        n_cases=len(attributions),
        method=attributions[0].method,
    )


def attribution_to_json(a: Attribution) -> dict:
    return {
        "note_id": a.note_id,
        "phi": dict(a.phi),
        "base_value": a.base_value,
        "model_output": a.model_output,
        "feature_values": dict(a.feature_values),
        "target_class": a.target_class if not isinstance(a.target_class, tuple) else list(a.target_class),
        "method": a.method,
    }
