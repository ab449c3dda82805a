"""Independent reference computations used by the tests.

Nothing here imports the code under test except for plain data types.
"""

import itertools
from fractions import Fraction

import numpy as np


def midranks(values):
    """O(n^2) midranks: count smaller and equal values directly."""
    out = []
    for v in values:
        less = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(less + (equal + 1) / 2)
    return out


def enumerate_rank_sum_p(a, b, direction):
    """Exact one-sided p-value by listing every labelling of the pooled sample."""
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    n1 = len(a)
    w = sum(ranks[:n1])
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), n1):
        s = sum(ranks[i] for i in idx)
        total += 1
        if direction == "Greater":
            hits += s >= w - 1e-9
        else:
            hits += s <= w + 1e-9
    return Fraction(hits, total), w


def point_mass(a, b):
    """P(W = observed) under the permutation distribution."""
    pooled = list(a) + list(b)
    ranks = midranks(pooled)
    n1 = len(a)
    w = sum(ranks[:n1])
    combos = list(itertools.combinations(range(len(pooled)), n1))
    eq = sum(1 for idx in combos if abs(sum(ranks[i] for i in idx) - w) < 1e-9)
    return Fraction(eq, len(combos))


def permutation_p(a, b, direction, n_perm, seed=0, chunk=100_000):
    """Monte-Carlo permutation p-value with random relabelling."""
    pooled = np.asarray(list(a) + list(b), dtype=float)
    ranks = np.asarray(midranks(list(pooled)))
    n1 = len(a)
    w = ranks[:n1].sum()
    rng = np.random.default_rng(seed)
    hits = done = 0
    while done < n_perm:
        m = min(chunk, n_perm - done)
        perm = np.argsort(rng.random((m, ranks.size)), axis=1)[:, :n1]
        sums = ranks[perm].sum(axis=1)
        hits += int(np.count_nonzero(sums >= w - 1e-9 if direction == "Greater" else sums <= w + 1e-9))
        done += m
    return hits / n_perm


def solve_vandermonde(ts, ys):
    """Exact interpolating polynomial through len(ts) points with Fractions."""
    n = len(ts)
    A = [[Fraction(t) ** k for k in range(n)] + [Fraction(y)] for t, y in zip(ts, ys)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def sse(y, coef, t=None):
    y = np.asarray(y, dtype=float)
    t = np.arange(1, y.size + 1, dtype=float) if t is None else t
    f = sum(c * t**k for k, c in enumerate(coef))
    return float(np.sum((y - f) ** 2))
