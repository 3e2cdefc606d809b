"""Nonparametric statistics for the correlation and usage analyses.

Everything here is computed from first principles: rank correlation with tie
corrections, percentile bootstrap intervals, the exact binomial sign test,
and the Wilcoxon signed-rank test. Implementations avoid naive pair loops so
the test suite can check them against an independent brute-force oracle.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DegenerateDataError, EmptyDataError

N_BOOTSTRAP = 2000
CONFIDENCE_LEVEL = 0.95
# Correlations weaker than this are computed but left out of reports.
REPORT_TAU_MIN = 0.1
# Exact signed-rank enumeration is exponential in n; beyond this the
# tie-corrected normal approximation takes over.
WILCOXON_EXACT_MAX_N = 25


@dataclass(frozen=True)
class CorrelationResult:
    tau_b: float
    ci_low: float
    ci_high: float
    p_value: float
    n: int
    n_bootstrap: int = N_BOOTSTRAP
    analyses_count: int = 1

    @property
    def reportable(self) -> bool:
        return abs(self.tau_b) > REPORT_TAU_MIN


@dataclass(frozen=True)
class EffectSize:
    name: str
    value: float
    ci_low: float
    ci_high: float
    method: str


@dataclass(frozen=True)
class TestResult:
    test: str
    statistic: float
    p_value: float
    n: int
    effect: EffectSize | None = None

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p-value out of range: {self.p_value}")


def _tie_terms(values: Sequence[float]) -> tuple[int, int, int]:
    """(sum t(t-1)/2, sum t(t-1)(t-2), sum t(t-1)(2t+5)) over tie groups."""
    pairs = 0
    triple = 0
    weighted = 0
    for t in Counter(values).values():
        pairs += t * (t - 1) // 2
        triple += t * (t - 1) * (t - 2)
        weighted += t * (t - 1) * (2 * t + 5)
    return pairs, triple, weighted


def _merge_count(ys: list[float]) -> tuple[list[float], int]:
    """Mergesort inversion count; equal elements are not inversions."""
    n = len(ys)
    if n <= 1:
        return ys, 0
    mid = n // 2
    left, a = _merge_count(ys[:mid])
    right, b = _merge_count(ys[mid:])
    merged: list[float] = []
    swaps = a + b
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            swaps += len(left) - i
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, swaps


def _con_minus_dis(x: Sequence[float], y: Sequence[float]) -> int:
    """Concordant minus discordant pairs via sort-and-count."""
    n = len(x)
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    ys = [y[i] for i in order]
    _, swaps = _merge_count(ys)
    n0 = n * (n - 1) // 2
    n1, _, _ = _tie_terms(x)
    n2, _, _ = _tie_terms(y)
    n3, _, _ = _tie_terms(list(zip(x, y)))
    return n0 - n1 - n2 + n3 - 2 * swaps


def _tau_b_value(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    n0 = n * (n - 1) // 2
    n1, _, _ = _tie_terms(x)
    n2, _, _ = _tie_terms(y)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise DegenerateDataError("tau-b undefined: a variable is fully tied")
    return _con_minus_dis(x, y) / denom


def _tau_b_p_value(x: Sequence[float], y: Sequence[float]) -> float:
    """Normal approximation of C-D with tie-adjusted variance."""
    n = len(x)
    cmd = _con_minus_dis(x, y)
    n1, x0, x1 = _tie_terms(x)
    n2, y0, y1 = _tie_terms(y)
    m = n * (n - 1)
    var = (m * (2 * n + 5) - x1 - y1) / 18.0 + (2.0 * n1 * n2) / m
    if n > 2:
        var += (x0 * y0) / (9.0 * m * (n - 2))
    if var <= 0.0:
        return 1.0
    z = cmd / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


def _percentile_interval(reps: list[float], level: float) -> tuple[float, float]:
    alpha = (1.0 - level) / 2.0
    arr = np.sort(np.asarray(reps, dtype=float))
    low, high = np.quantile(arr, [alpha, 1.0 - alpha])
    return float(low), float(high)


def _replicate_rng(seed: int, rep: int) -> np.random.Generator:
    # one generator per replicate, so a parallel map over replicates would
    # produce the identical stream of resamples
    return np.random.default_rng([seed, rep])


def kendall_tau_b(
    x: Sequence[float],
    y: Sequence[float],
    n_bootstrap: int = N_BOOTSTRAP,
    seed: int = 0,
    level: float = CONFIDENCE_LEVEL,
    analyses_count: int = 1,
    with_ci: bool = True,
) -> CorrelationResult:
    """Tie-corrected rank correlation with bootstrap CI and asymptotic p."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise EmptyDataError("need at least two observations")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    tau = _tau_b_value(xs, ys)
    p = _tau_b_p_value(xs, ys)

    ci_low = ci_high = tau
    if with_ci:
        n = len(xs)
        reps: list[float] = []
        for rep in range(n_bootstrap):
            idx = _replicate_rng(seed, rep).integers(0, n, size=n)
            try:
                reps.append(_tau_b_value([xs[i] for i in idx], [ys[i] for i in idx]))
            except DegenerateDataError:
                continue  # a fully tied resample carries no rank information
        if reps:
            ci_low, ci_high = _percentile_interval(reps, level)
    return CorrelationResult(
        tau_b=tau,
        ci_low=ci_low,
        ci_high=ci_high,
        p_value=p,
        n=len(xs),
        n_bootstrap=n_bootstrap,
        analyses_count=analyses_count,
    )


def bootstrap_ci(
    data: Sequence[float] | np.ndarray,
    statistic: Callable[[np.ndarray], float],
    n_rep: int = N_BOOTSTRAP,
    level: float = CONFIDENCE_LEVEL,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile interval of ``statistic`` over row resamples of ``data``."""
    arr = np.asarray(data, dtype=float)
    n = arr.shape[0]
    if n == 0:
        raise EmptyDataError("cannot bootstrap an empty sample")
    reps = []
    for rep in range(n_rep):
        idx = _replicate_rng(seed, rep).integers(0, n, size=n)
        reps.append(float(statistic(arr[idx])))
    return _percentile_interval(reps, level)


def _binom_cdf(k: int, n: int) -> float:
    """P(X <= k) for X ~ Binomial(n, 1/2), exact."""
    if k < 0:
        return 0.0
    total = sum(math.comb(n, i) for i in range(min(k, n) + 1))
    return total / (2.0**n)


def _median_ci(values: Sequence[float], level: float) -> tuple[float, float, str]:
    """Order-statistic interval for the median from the sign distribution."""
    xs = sorted(values)
    n = len(xs)
    alpha = (1.0 - level) / 2.0
    rank = 1
    for j in range(n + 1):
        if _binom_cdf(j, n) <= alpha:
            rank = j + 2  # interval starts above the j-th order statistic
    rank = min(rank, (n + 1) // 2)
    return xs[rank - 1], xs[n - rank], "order-statistic binomial"


def sign_test(differences: Sequence[float], level: float = CONFIDENCE_LEVEL) -> TestResult:
    """Exact two-sided binomial test on the signs of paired differences.

    Zeros are dropped for the test; the effect is the median over all
    differences, zeros included, with an order-statistic interval.
    """
    diffs = [float(d) for d in differences]
    pos = sum(1 for d in diffs if d > 0)
    neg = sum(1 for d in diffs if d < 0)
    n = pos + neg
    if n == 0:
        raise DegenerateDataError("sign test needs at least one nonzero difference")
    k = min(pos, neg)
    p = min(1.0, 2.0 * _binom_cdf(k, n))
    ci_low, ci_high, method = _median_ci(diffs, level)
    effect = EffectSize(
        name="median_difference",
        value=float(statistics.median(diffs)),
        ci_low=ci_low,
        ci_high=ci_high,
        method=method,
    )
    return TestResult(test="sign", statistic=float(pos), p_value=p, n=n, effect=effect)


def _ranks_with_ties(values: Sequence[float]) -> list[float]:
    """Ascending ranks, tied values sharing the average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _wilcoxon_exact_p(doubled: list[int], w_doubled: int) -> float:
    """Two-sided exact p by enumerating sign assignments over doubled ranks."""
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    denom = 2.0 ** len(doubled)
    p_low = sum(counts[: w_doubled + 1]) / denom
    p_high = sum(counts[w_doubled:]) / denom
    return min(1.0, 2.0 * min(p_low, p_high))


def wilcoxon_signed_rank(
    differences: Sequence[float],
    n_bootstrap: int = N_BOOTSTRAP,
    seed: int = 0,
    level: float = CONFIDENCE_LEVEL,
) -> TestResult:
    """Signed-rank test on paired differences, zeros dropped.

    Small samples get an exact p-value by enumeration; larger ones use the
    tie-corrected normal approximation with continuity correction. The effect
    is r = |z| / sqrt(n), with a bootstrap interval over the differences
    (the interval method is a stand-in; it is named in the result).
    """
    diffs = [float(d) for d in differences if d != 0.0]
    n = len(diffs)
    if n == 0:
        raise DegenerateDataError("signed-rank test needs a nonzero difference")
    ranks = _ranks_with_ties([abs(d) for d in diffs])
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)

    mean = n * (n + 1) / 4.0
    tie_correction = 0.0
    for t in Counter(abs(d) for d in diffs).values():
        tie_correction += t**3 - t
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_correction / 48.0
    if var <= 0.0:
        raise DegenerateDataError("signed-rank variance is zero (all magnitudes tied away)")
    delta = w_plus - mean
    z = (delta - 0.5 * math.copysign(1.0, delta)) / math.sqrt(var) if delta != 0 else 0.0

    if n <= WILCOXON_EXACT_MAX_N:
        doubled = [round(2 * r) for r in ranks]
        p = _wilcoxon_exact_p(doubled, round(2 * w_plus))
    else:
        p = math.erfc(abs(z) / math.sqrt(2.0))

    def _r_stat(sample: np.ndarray) -> float:
        d = [float(v) for v in sample if v != 0.0]
        if not d:
            return 0.0
        rk = _ranks_with_ties([abs(v) for v in d])
        wp = sum(r for v, r in zip(d, rk) if v > 0)
        m = len(d)
        tc = sum(t**3 - t for t in Counter(abs(v) for v in d).values())
        v2 = m * (m + 1) * (2 * m + 1) / 24.0 - tc / 48.0
        if v2 <= 0.0:
            return 0.0
        dl = wp - m * (m + 1) / 4.0
        zz = (dl - 0.5 * math.copysign(1.0, dl)) / math.sqrt(v2) if dl != 0 else 0.0
        return abs(zz) / math.sqrt(m)

    r_value = abs(z) / math.sqrt(n)
    ci_low, ci_high = bootstrap_ci(diffs, _r_stat, n_rep=n_bootstrap, level=level, seed=seed)
    effect = EffectSize(
        name="r", value=r_value, ci_low=ci_low, ci_high=ci_high, method="percentile bootstrap"
    )
    return TestResult(test="wilcoxon_signed_rank", statistic=w_plus, p_value=p, n=n, effect=effect)


def bonferroni(p_values: Sequence[float], m: int | None = None) -> list[float]:
    """Family-wise adjustment: each p becomes min(1, p * m)."""
    family = len(p_values) if m is None else m
    if family < len(p_values):
        raise ConfigError(f"family size {family} smaller than {len(p_values)} p-values")
    return [min(1.0, p * family) for p in p_values]
