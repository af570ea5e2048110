"""Binary classification by k-NN votes along a fixed set of projections.

Training rows are shuffled and split.  The first part (the reference) is
projected onto every direction; the second part scores each direction by
the accuracy of one-dimensional k-NN against the reference.  Directions
whose accuracy rank reaches ``delta * D`` vote on new points, weighted by
their accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .elliptical import as_sample
from .errors import BadLabels, BadSplit, DimensionMismatch, InvalidInput, UnknownDirection
from .rng import as_seed
from .smset import DirectionSet, as_direction_set

K_GRID = (1, 3, 5, 9, 15)
CV_FOLDS = 5


@dataclass(frozen=True, eq=False)
class LabeledSample:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        x = as_sample(self.features, name="features")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.size != x.shape[0]:
            raise BadLabels("need exactly one label per row")
        if y.size and not np.all((y == 0) | (y == 1)):
            raise BadLabels("labels must be 0 or 1")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y.astype(np.int64))

    def __len__(self):
        return self.labels.size


@dataclass(frozen=True, eq=False)
class RpClassifier:
    """Fitted model.

    ``ref_values[j]`` holds the reference projections on direction ``j`` in
    ascending order, with ``ref_labels[j]`` and ``ref_index[j]`` (position in
    the reference split) aligned to it.
    """

    directions: DirectionSet
    weights: np.ndarray
    retained: np.ndarray
    k: int
    ref_values: np.ndarray
    ref_labels: np.ndarray
    ref_index: np.ndarray

    @property
    def dim(self):
        return self.directions.dim

    def to_json(self):
        return {
            "directions": self.directions.tolist(),
            "weights": self.weights.tolist(),
            "retained": self.retained.tolist(),
            "k": int(self.k),
            "ref_values": self.ref_values.tolist(),
            "ref_labels": self.ref_labels.tolist(),
            "ref_index": self.ref_index.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            model = cls(
                as_direction_set(np.asarray(obj["directions"], dtype=float)),
                np.asarray(obj["weights"], dtype=float),
                np.asarray(obj["retained"], dtype=np.int64),
                int(obj["k"]),
                np.asarray(obj["ref_values"], dtype=float),
                np.asarray(obj["ref_labels"], dtype=np.int64),
                np.asarray(obj["ref_index"], dtype=np.int64),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed model: {exc}") from exc
        n_dir = len(model.directions)
        if (model.weights.shape != (n_dir,) or model.ref_values.ndim != 2
                or model.ref_values.shape[0] != n_dir
                or model.ref_labels.shape != model.ref_values.shape
                or model.ref_index.shape != model.ref_values.shape
                or model.retained.size == 0
                or model.retained.min() < 0 or model.retained.max() >= n_dir
                or not 1 <= model.k <= model.ref_values.shape[1]):
            raise InvalidInput("malformed model: inconsistent array shapes")
        return model


def _brute_count(vals, labs, idx, k, z):
    order = np.lexsort((idx, np.abs(vals - z)))[:k]
    return int(labs[order].sum())


def knn_label_counts(vals, labs, idx, k, z):
    """Number of label-1 points among the ``k`` nearest sorted references.

    ``vals`` must be ascending with ``labs``/``idx`` aligned.  Distance ties
    go to the smaller ``idx``.  Only a ``2k + 2`` window around each query
    is inspected; a query whose tied neighbours reach the window edge, or
    must be split by index, falls back to a full scan.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n1 = vals.size
    pos = np.searchsorted(vals, z)
    cand = pos[:, None] + np.arange(-k - 1, k + 1)[None, :]
    valid = (cand >= 0) & (cand < n1)
    cc = np.clip(cand, 0, n1 - 1)
    dist = np.where(valid, np.abs(vals[cc] - z[:, None]), np.inf)
    radius = np.partition(dist, k - 1, axis=1)[:, k - 1][:, None]
    inner = dist < radius
    tied = valid & (dist == radius)
    need = k - inner.sum(axis=1)
    counts = (labs[cc] * inner).sum(axis=1) + (labs[cc] * tied).sum(axis=1)
    edge = tied[:, 0] | tied[:, -1]
    hard = np.flatnonzero(edge | (tied.sum(axis=1) != need))
    for q in hard:
        counts[q] = _brute_count(vals, labs, idx, k, z[q])
    return counts


def _sorted_reference(z_ref, y_ref):
    order = np.argsort(z_ref, axis=0, kind="stable").T
    vals = np.take_along_axis(z_ref.T, order, axis=1)
    return vals, y_ref[order], order


def _posteriors(vals, labs, idx, k, z_query):
    """``(queries, directions)`` k-NN posteriors of label 1."""
    out = np.empty((z_query.shape[0], vals.shape[0]))
    for j in range(vals.shape[0]):
        out[:, j] = knn_label_counts(vals[j], labs[j], idx[j], k, z_query[:, j]) / k
    return out


def _vote(post, weights):
    # class 1 iff sum w p >= sum w (1 - p)
    return (post @ weights >= (1.0 - post) @ weights).astype(np.int64)


def select_k(z_ref, y_ref, grid=K_GRID, folds=CV_FOLDS):
    """Cross-validated neighbour count on the reference split.

    Folds are contiguous blocks of the (already shuffled) reference.  Each
    candidate is scored by the accuracy of the equal-weight vote over all
    directions; the smallest ``k`` among the best scores wins.
    """
    n1 = len(y_ref)
    bounds = np.linspace(0, n1, min(folds, n1) + 1).astype(int)
    best_k, best_acc = None, -1.0
    for k in sorted(grid):
        if k > n1 - math.ceil(n1 / min(folds, n1)):
            continue
        correct = 0
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            keep = np.r_[0:lo, hi:n1]
            vals, labs, idx = _sorted_reference(z_ref[keep], y_ref[keep])
            post = _posteriors(vals, labs, idx, k, z_ref[lo:hi])
            correct += int(np.sum(_vote(post, np.ones(post.shape[1])) == y_ref[lo:hi]))
        acc = correct / n1
        if acc > best_acc:
            best_k, best_acc = k, acc
    if best_k is None:
        raise BadSplit("reference split too small for cross-validating k")
    return best_k


def _retain(weights, delta):
    n_dir = weights.size
    idx = np.arange(n_dir)
    # ascending in weight; among equal weights the lower index ranks higher
    order = np.lexsort((-idx, weights))
    ranks = np.empty(n_dir, dtype=np.int64)
    ranks[order] = np.arange(1, n_dir + 1)
    keep = np.flatnonzero(ranks >= delta * n_dir - 1e-9)
    if keep.size == 0:
        keep = np.array([order[-1]])
    return keep


def fit(train, directions, k=None, omega=0.25, delta=0.5, seed=None):
    """Fit a projection classifier; ``k=None`` selects k by cross-validation."""
    if not isinstance(train, LabeledSample):
        train = LabeledSample(*train)
    s = as_direction_set(directions)
    x, y = train.features, train.labels
    n = len(y)
    if x.shape[1] != s.dim:
        raise DimensionMismatch("features and directions have different dimensions")
    if n < 4:
        raise BadSplit("need at least 4 training rows")
    if not 0 < omega < 1:
        raise InvalidInput("omega must lie in (0, 1)")
    if not 0 < delta <= 1:
        raise InvalidInput("delta must lie in (0, 1]")
    n1 = int(math.floor((1 - omega) * n))
    if k is not None and (int(k) != k or k < 1):
        raise InvalidInput("k must be a positive integer")
    if n1 >= n or n1 < (k or 1):
        raise BadSplit(f"reference split of {n1} rows cannot support k={k or 1} with n={n}")

    perm = as_seed(seed).generator().permutation(n)
    v = s.vectors.astype(float)
    z = x[perm] @ v.T
    y = y[perm]
    z_ref, y_ref, z_w, y_w = z[:n1], y[:n1], z[n1:], y[n1:]
    if k is None:
        k = select_k(z_ref, y_ref)
    vals, labs, idx = _sorted_reference(z_ref, y_ref)

    post = _posteriors(vals, labs, idx, k, z_w)
    yhat = (post > 0.5).astype(np.int64)
    weights = np.mean(yhat == y_w[:, None], axis=0)
    return RpClassifier(s, weights, _retain(weights, delta), int(k), vals, labs, idx)


def knn_posterior(model, j, z):
    if not 0 <= j < len(model.directions):
        raise UnknownDirection(f"direction index {j} out of range")
    count = knn_label_counts(model.ref_values[j], model.ref_labels[j], model.ref_index[j], model.k, z)
    return float(count[0]) / model.k


def predict_many(model, x):
    x = as_sample(x, name="features")
    if x.shape[1] != model.dim:
        raise DimensionMismatch(f"features have {x.shape[1]} columns, model expects {model.dim}")
    keep = model.retained
    z = x @ model.directions.vectors[keep].astype(float).T
    post = _posteriors(model.ref_values[keep], model.ref_labels[keep], model.ref_index[keep], model.k, z)
    return _vote(post, model.weights[keep])


def predict(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("predict takes a single feature vector")
    return int(predict_many(model, x[None, :])[0])
