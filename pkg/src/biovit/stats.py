"""Descriptives and the hypothesis tests used on attention series.

Includes the Anderson-Darling normality test with Stephens' p-value
approximation, an exact/asymptotic one-sided Mann-Whitney test with a
Hodges-Lehmann estimate and confidence bound, Pearson's r and Cronbach's
alpha.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

P_DISPLAY_FLOOR = 0.005


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class Descriptives:
    n: int
    mean: float
    variance: float
    std_dev: float
    mode: float


def descriptives(values) -> Descriptives:
    """Mean, sample variance (n-1), std dev and mode.

    The mode is the most frequent value; ties go to the smallest value.
    A single observation has variance 0.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise StatsError("descriptives of an empty sample")
    var = float(np.var(x, ddof=1)) if x.size > 1 else 0.0
    uniq, counts = np.unique(x, return_counts=True)
    mode = float(uniq[np.argmax(counts)])  # np.unique sorts, argmax takes the first
    return Descriptives(int(x.size), float(np.mean(x)), var, math.sqrt(var), mode)


@dataclass(frozen=True)
class AdResult:
    statistic: float
    adjusted: float
    p_value: float

    @property
    def p_display(self) -> float:
        return max(self.p_value, P_DISPLAY_FLOOR)


def stephens_p_value(a2_star: float) -> float:
    """p-value for the modified statistic A*^2, normal with estimated parameters."""
    a = a2_star
    if a < 0.2:
        p = 1 - math.exp(-13.436 + 101.14 * a - 223.73 * a * a)
    elif a < 0.34:
        p = 1 - math.exp(-8.318 + 42.796 * a - 59.938 * a * a)
    elif a < 0.6:
        p = math.exp(0.9177 - 4.279 * a - 1.38 * a * a)
    elif a <= 13:
        p = math.exp(1.2937 - 5.709 * a + 0.0186 * a * a)
    else:
        p = 0.0
    return min(max(p, 0.0), 1.0)


def anderson_darling(values) -> AdResult:
    """Anderson-Darling test of normality with mean and sd estimated."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 8:
        raise StatsError("Anderson-Darling needs at least 8 observations")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise StatsError("Anderson-Darling undefined for zero variance")
    w = (x - x.mean()) / sd
    # log Phi and log(1 - Phi) via log_ndtr keep the tails finite
    logf = special.log_ndtr(w)
    logsf = special.log_ndtr(-w[::-1])
    i = np.arange(1, n + 1)
    a2 = -n - float(np.sum((2 * i - 1) * (logf + logsf))) / n
    a2 = max(a2, 0.0)
    a2_star = a2 * (1 + 0.75 / n + 2.25 / n**2)
    return AdResult(a2, a2_star, stephens_p_value(a2_star))


class Direction(enum.Enum):
    GREATER = "Greater"
    LESS = "Less"


@dataclass(frozen=True)
class MannWhitneyResult:
    w_statistic: float
    u_statistic: float
    p_value: float
    direction: Direction
    method: str
    median_diff_point: float
    ci_bound: float
    confidence: float
    n1: int
    n2: int

    @property
    def ci_lower_or_upper(self) -> float:
        return self.ci_bound


def rankdata(values) -> np.ndarray:
    """1-based ranks with ties given their mean (mid)rank."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    edges = np.flatnonzero(np.diff(xs)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [x.size]))
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + 1 + e) / 2.0
    return ranks


def _subset_sum_counts(doubled: np.ndarray, n1: int) -> np.ndarray:
    """counts[s] = number of n1-element subsets of ``doubled`` summing to s."""
    total = int(doubled.sum())
    dp = np.zeros((n1 + 1, total + 1))
    dp[0, 0] = 1.0
    for k, r in enumerate(doubled.tolist(), start=1):
        for j in range(min(k, n1), 0, -1):
            dp[j, r:] += dp[j - 1, : total + 1 - r]
    return dp[n1]


def _exact_p(ranks: np.ndarray, n1: int, w: float, direction: Direction) -> float:
    doubled = np.rint(2 * ranks).astype(np.int64)
    counts = _subset_sum_counts(doubled, n1)
    w2 = int(round(2 * w))
    if direction is Direction.GREATER:
        hit = counts[w2:].sum()
    else:
        hit = counts[: w2 + 1].sum()
    return float(hit / counts.sum())


def _asymptotic_p(ranks: np.ndarray, n1: int, n2: int, u: float, direction: Direction) -> float:
    n = n1 + n2
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    mu = n1 * n2 / 2.0
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    if direction is Direction.GREATER:
        z = (u - mu - 0.5) / sd
        return float(special.ndtr(-z))
    z = (u - mu + 0.5) / sd
    return float(special.ndtr(z))


def _confidence_bound(diffs: np.ndarray, n1: int, n2: int, direction: Direction, level: float):
    """One-sided bound from ordered pairwise differences.

    Picks the order statistic whose normal-approximation (continuity
    corrected) coverage is the smallest level not below ``level``.
    """
    m = n1 * n2
    mu = m / 2.0
    sd = math.sqrt(n1 * n2 * (n1 + n2 + 1) / 12.0)
    # coverage of D_(k) is 1 - Phi((k - 0.5 - mu) / sd); take the largest k meeting level
    k = math.floor(mu + 0.5 + sd * float(special.ndtri(1.0 - level / 100.0)) + 1e-9)
    best_k = min(max(k, 1), m)
    best_conf = 1.0 - float(special.ndtr((best_k - 0.5 - mu) / sd))
    d = np.sort(diffs)
    bound = d[best_k - 1] if direction is Direction.GREATER else d[m - best_k]
    return float(bound), 100.0 * best_conf


EXACT_MAX_N = 20


def mann_whitney(
    sample_a,
    sample_b,
    direction: Direction | str = Direction.GREATER,
    method: str = "auto",
    confidence: float = 95.0,
) -> MannWhitneyResult:
    """One-sided Mann-Whitney rank-sum test of ``a`` against ``b``.

    ``method="auto"`` uses the exact permutation distribution of the midrank
    sum when both samples have at most 20 observations, and the normal
    approximation (tie and continuity corrected) otherwise.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise StatsError("Mann-Whitney needs two nonempty samples")
    if not 0 < confidence < 100:
        raise StatsError("confidence must be a percentage in (0, 100)")
    direction = Direction(direction) if isinstance(direction, str) else direction
    n1, n2 = a.size, b.size
    ranks = rankdata(np.concatenate((a, b)))
    w = float(ranks[:n1].sum())
    u = w - n1 * (n1 + 1) / 2.0
    if method == "auto":
        method = "exact" if max(n1, n2) <= EXACT_MAX_N else "asymptotic"
    if method == "exact":
        p = _exact_p(ranks, n1, w, direction)
    elif method == "asymptotic":
        p = _asymptotic_p(ranks, n1, n2, u, direction)
    else:
        raise ValueError(f"unknown method {method!r}")
    diffs = np.subtract.outer(a, b).ravel()
    bound, achieved = _confidence_bound(diffs, n1, n2, direction, confidence)
    return MannWhitneyResult(
        w_statistic=w,
        u_statistic=u,
        p_value=min(max(p, 0.0), 1.0),
        direction=direction,
        method=method,
        median_diff_point=float(np.median(diffs)),
        ci_bound=bound,
        confidence=achieved,
        n1=n1,
        n2=n2,
    )


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise StatsError("pearson needs two equal-length 1-D samples")
    if x.size < 3:
        raise StatsError("pearson needs at least 3 pairs")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise StatsError("pearson undefined for zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class CronbachResult:
    raw: float
    standardized: float
    mean_r: float
    k: int


def standardized_alpha(mean_r: float, k: int = 2) -> float:
    return k * mean_r / (1 + (k - 1) * mean_r)


def cronbach_alpha(items: Sequence[Sequence[float]]) -> CronbachResult:
    """Raw and standardized Cronbach's alpha for ``k`` item-score lists."""
    X = np.asarray(items, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise StatsError("cronbach_alpha needs at least 2 equal-length items")
    k = X.shape[0]
    total_var = float(np.var(X.sum(axis=0), ddof=1))
    if not total_var > 0:
        raise StatsError("cronbach_alpha undefined for zero total variance")
    raw = k / (k - 1) * (1 - float(np.var(X, axis=1, ddof=1).sum()) / total_var)
    rs = [pearson(X[i], X[j]) for i in range(k) for j in range(i + 1, k)]
    mean_r = float(np.mean(rs))
    return CronbachResult(raw, standardized_alpha(mean_r, k), mean_r, k)
