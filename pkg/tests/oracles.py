"""Slow, obviously-correct reference computations used only by the tests."""

from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np


def exact_rank(rows):
    """Rank by Gaussian elimination with full pivoting over the rationals."""
    m = [[Fraction(int(v)) for v in row] for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rank = 0
    col_perm = list(range(n_cols))
    for r in range(min(n_rows, n_cols)):
        pivot = None
        for i in range(r, n_rows):
            for j in range(r, n_cols):
                if m[i][col_perm[j]] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        m[r], m[i] = m[i], m[r]
        col_perm[r], col_perm[j] = col_perm[j], col_perm[r]
        p = m[r][col_perm[r]]
        for i in range(r + 1, n_rows):
            f = m[i][col_perm[r]] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        rank += 1
    return rank


def exact_is_sm_set(vectors):
    """True iff the products x_i x_j (i <= j) of the vectors span R^D."""
    vectors = [list(map(int, v)) for v in vectors]
    d = len(vectors[0])
    pairs = list(combinations_with_replacement(range(d), 2))
    rows = [[v[i] * v[j] for i, j in pairs] for v in vectors]
    return exact_rank(rows) == len(pairs)


def ks_by_counting(x, y):
    """max over pooled points t of |#{x <= t}/n - #{y <= t}/m|."""
    best = Fraction(0)
    for t in list(x) + list(y):
        fx = Fraction(sum(1 for v in x if v <= t), len(x))
        fy = Fraction(sum(1 for v in y if v <= t), len(y))
        best = max(best, abs(fx - fy))
    return best


def rpt_statistic_brute(x, y, directions):
    """Scaled statistic via per-direction ECDFs evaluated on a grid of all pooled points."""
    n, m = len(x), len(y)
    best = 0.0
    for v in directions:
        px = [float(np.dot(row, v)) for row in x]
        py = [float(np.dot(row, v)) for row in y]
        best = max(best, float(ks_by_counting(px, py)))
    return np.sqrt(n * m / (n + m)) * best


def knn_count_brute(values, labels, k, z):
    """Label-1 count among the k nearest (distance, then index) references."""
    order = sorted(range(len(values)), key=lambda i: (abs(values[i] - z), i))
    return sum(labels[i] for i in order[:k])
