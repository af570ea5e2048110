"""Empirical distribution functions and the two-sample Kolmogorov-Smirnov distance."""

import numpy as np

from .errors import EmptySample, InvalidInput


class EmpiricalCdf:
    """Right-continuous ECDF ``F(t) = #{values <= t} / n``."""

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).ravel())
        if v.size == 0:
            raise EmptySample("an empirical CDF needs at least one value")
        self.sorted_values = v

    @property
    def n(self):
        return self.sorted_values.size

    def __call__(self, t):
        return np.searchsorted(self.sorted_values, t, side="right") / self.n


def _as_1d(v, name):
    a = np.asarray(v, dtype=float).ravel()
    if a.size == 0:
        raise EmptySample(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{name} contains non-finite values")
    return a


def group_ends(sorted_values):
    """Boolean mask of the last position of every run of equal values."""
    ends = np.ones(sorted_values.shape[-1], dtype=bool)
    ends[:-1] = sorted_values[1:] != sorted_values[:-1]
    return ends


def ks_gap_numerator(x, y):
    """Integer ``n*m*sup|F_n - G_m|`` for 1-d samples ``x`` and ``y``.

    The pooled values are scanned once in sorted order, accumulating ``+m``
    for every ``x`` value and ``-n`` for every ``y`` value.  The running sum
    equals ``n*m*(F_n - G_m)`` and is read only after a whole run of tied
    values has been consumed.
    """
    n, m = x.size, y.size
    pooled = np.concatenate([x, y])
    order = np.argsort(pooled, kind="stable")
    step = np.concatenate([np.full(n, m, dtype=np.int64), np.full(m, -n, dtype=np.int64)])
    running = np.cumsum(step[order])
    return int(np.max(np.abs(running[group_ends(pooled[order])])))


def ks_two_sample(x, y):
    """``sup_t |F_n(t) - G_m(t)|`` for two one-dimensional samples."""
    x = _as_1d(x, "x")
    y = _as_1d(y, "y")
    return ks_gap_numerator(x, y) / (x.size * y.size)
