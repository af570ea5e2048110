"""Random-projection Kolmogorov-Smirnov two-sample test.

The statistic is ``sqrt(nm/(n+m)) * max_j KS(x.v_j, y.v_j)`` over a fixed
direction set (by default the canonical sm-uniqueness set), calibrated by
bootstrap.

Bootstrap replicates never re-sort data.  Every resample is a vector of
multiplicities over the pooled original observations, so the ECDF gap of a
replicate along direction ``j`` is a cumulative sum of integer weights in
the (precomputed) sorted order of the pooled projections.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .elliptical import as_sample
from .errors import DimensionMismatch, EmptySample, InvalidInput
from .kstest import group_ends, ks_two_sample
from .rng import RngSeed, as_seed
from .smset import DirectionSet, as_direction_set, canonical_sm_set

#: ``separate`` resamples each sample from itself and centres the replicate
#: at the observed ECDFs; ``pooled`` resamples both groups from the pooled
#: data; ``separate-raw`` is the uncentred per-sample statistic.
SCHEMES = ("separate", "pooled", "separate-raw")

_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class RptConfig:
    directions: DirectionSet = None
    bootstrap_reps: int = 500
    alpha: float = 0.05
    seed: RngSeed = field(default_factory=RngSeed)
    scheme: str = "separate"

    def __post_init__(self):
        if self.directions is not None:
            object.__setattr__(self, "directions", as_direction_set(self.directions))
        object.__setattr__(self, "seed", as_seed(self.seed))
        if int(self.bootstrap_reps) != self.bootstrap_reps or self.bootstrap_reps < 100:
            raise InvalidInput("bootstrap_reps must be an integer >= 100")
        if not 0 < self.alpha < 1:
            raise InvalidInput("alpha must lie in (0, 1)")
        if self.scheme not in SCHEMES:
            raise InvalidInput(f"unknown bootstrap scheme {self.scheme!r}")

    def to_json(self):
        return {
            "directions": None if self.directions is None else self.directions.tolist(),
            "bootstrap_reps": int(self.bootstrap_reps),
            "alpha": float(self.alpha),
            "seed": int(self.seed.seed),
            "stream": int(self.seed.stream),
            "scheme": self.scheme,
        }


@dataclass(frozen=True, eq=False)
class TestReport:
    statistic: float
    per_direction: np.ndarray
    critical_value: float
    p_value: float
    reject: bool

    __test__ = False  # not a pytest class

    def to_json(self, config=None):
        out = {
            "statistic": float(self.statistic),
            "critical_value": float(self.critical_value),
            "p_value": float(self.p_value),
            "reject": bool(self.reject),
            "per_direction": [float(v) for v in self.per_direction],
        }
        if config is not None:
            out["config"] = config
        return out


def _scale(n, m):
    return math.sqrt(n * m / (n + m))


def _check_inputs(x, y, s):
    s = as_direction_set(s)
    x = as_sample(x, name="x")
    y = as_sample(y, name="y")
    if x.shape[1] != s.dim or y.shape[1] != s.dim:
        raise DimensionMismatch(
            f"dimensions differ: x {x.shape[1]}, y {y.shape[1]}, directions {s.dim}")
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise EmptySample("both samples need at least one row")
    return x, y, s


def rpt_statistic(x, y, s):
    """Return ``(scaled statistic, per-direction KS distances)``."""
    x, y, s = _check_inputs(x, y, s)
    v = s.vectors.astype(float)
    px, py = x @ v.T, y @ v.T
    per = np.array([ks_two_sample(px[:, j], py[:, j]) for j in range(len(s))])
    return _scale(len(x), len(y)) * float(per.max()), per


class _PooledOrder:
    """Sorted order and tie structure of the pooled projections."""

    def __init__(self, x, y, s):
        pooled = np.vstack([x, y]) @ s.vectors.astype(float).T
        self.perms = []
        self.ends = []
        for j in range(pooled.shape[1]):
            perm = np.argsort(pooled[:, j], kind="stable")
            ends = group_ends(pooled[perm, j])
            self.perms.append(perm)
            self.ends.append(None if ends.all() else np.flatnonzero(ends))

    def max_gap(self, weights):
        """Column-wise ``max_j max_t |cumsum|`` of an ``(n + m, reps)`` weight array."""
        best = np.zeros(weights.shape[1], dtype=weights.dtype)
        for perm, ends in zip(self.perms, self.ends):
            run = weights[perm]
            np.cumsum(run, axis=0, out=run)
            if ends is not None:
                run = run[ends]
            np.maximum(best, np.abs(run).max(axis=0), out=best)
        return best


def _replicate_weights(seed, indices, n, m, scheme, dtype):
    """Integer weights ``m * count_x - n * count_y`` per pooled row, one column per replicate."""
    big_n = n + m
    # filled row-per-replicate (contiguous writes), then transposed once
    w = np.empty((len(indices), big_n), dtype=dtype)
    for row, b in zip(w, indices):
        rng = seed.child(int(b)).generator()
        if scheme == "pooled":
            cx = np.bincount(rng.integers(0, big_n, n), minlength=big_n)
            cy = np.bincount(rng.integers(0, big_n, m), minlength=big_n)
            row[:] = m * cx - n * cy
        else:
            cx = np.bincount(rng.integers(0, n, n), minlength=n)
            cy = np.bincount(rng.integers(0, m, m), minlength=m)
            if scheme == "separate":
                cx -= 1
                cy -= 1
            row[:n] = m * cx
            row[n:] = -n * cy
    return np.ascontiguousarray(w.T)


def bootstrap_distribution(x, y, s, B, seed=None, scheme="separate", workers=1):
    """``B`` bootstrap replicates of the scaled statistic.

    Replicate ``b`` draws from the stream ``seed.child(b)``, so the output
    does not depend on ``workers`` or on the order replicates are evaluated.
    """
    x, y, s = _check_inputs(x, y, s)
    if B < 1:
        raise InvalidInput("B must be positive")
    if scheme not in SCHEMES:
        raise InvalidInput(f"unknown bootstrap scheme {scheme!r}")
    seed = as_seed(seed)
    n, m = len(x), len(y)
    order = _PooledOrder(x, y, s)
    # |running sum| <= 2nm (centred) so int32 is safe well past desk scale
    dtype = np.int32 if 2 * n * m < 2**31 - 1 else np.int64
    chunk = max(1, _CHUNK_CELLS // (n + m))
    blocks = [np.arange(lo, min(lo + chunk, B)) for lo in range(0, B, chunk)]

    def run(idx):
        return order.max_gap(_replicate_weights(seed, idx, n, m, scheme, dtype))

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            gaps = list(pool.map(run, blocks))
    else:
        gaps = [run(idx) for idx in blocks]
    num = np.concatenate(gaps).astype(np.int64)
    return num / (n * m) * _scale(n, m)


def critical_value(replicates, alpha):
    """Upper order statistic at 1-based index ``ceil((1 - alpha) * B)``."""
    reps = np.sort(np.asarray(replicates, dtype=float))
    k = max(1, math.ceil((1 - alpha) * reps.size - 1e-9))
    return float(reps[k - 1])


def rpt_test(x, y, cfg=None, workers=1):
    """Run the random-projection test and return a :class:`TestReport`."""
    cfg = cfg or RptConfig()
    x = as_sample(x, name="x")
    s = cfg.directions if cfg.directions is not None else canonical_sm_set(x.shape[1])
    # observed and replicates are both (integer gap / nm) * scale, so equal
    # gaps give bit-equal values and the ">=" count in the p-value is exact
    stat, per = rpt_statistic(x, y, s)
    reps = bootstrap_distribution(x, y, s, cfg.bootstrap_reps, cfg.seed, cfg.scheme, workers)
    crit = critical_value(reps, cfg.alpha)
    p = (1 + int(np.sum(reps >= stat))) / (reps.size + 1)
    return TestReport(stat, per, crit, p, bool(stat > crit))
