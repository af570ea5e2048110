"""Symmetric-matrix uniqueness sets.

A finite set ``S`` of directions in R^d is an sm-uniqueness set when the
only symmetric matrix ``A`` with ``x^T A x = 0`` for every ``x`` in ``S`` is
``A = 0``.  Membership is decided by the rank of the matrix whose rows are
the half-vectorizations ``(x_i x_j)_{i <= j}`` of the vectors of ``S``.

Symmetric matrices are stored packed: the upper triangle in row-major
order, which is the same layout :func:`half_vectorize` produces.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DependentBasis, InvalidInput, NoWitness

#: singular values below ``RANK_RTOL * s_max * max(shape)`` count as zero
RANK_RTOL = 1e-9


def packed_size(d):
    return d * (d + 1) // 2


def _triu(d):
    return np.triu_indices(d)


def half_vectorize(x):
    """Products ``x_i * x_j`` for ``i <= j``, row-major over the upper triangle.

    Integer input stays integer so that exact arithmetic is possible
    downstream.

    >>> half_vectorize([1, 2])
    array([1, 2, 4])
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInput("half_vectorize expects a non-empty 1-d vector")
    i, j = _triu(x.size)
    return x[i] * x[j]


def _half_vectorize_rows(vectors):
    i, j = _triu(vectors.shape[1])
    return vectors[:, i] * vectors[:, j]


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Ordered list of nonzero direction vectors in R^d (one per row)."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] == 0:
            raise InvalidInput("directions must form a 2-d array with at least one column")
        if not np.issubdtype(v.dtype, np.number) or np.iscomplexobj(v):
            raise InvalidInput("directions must be real numbers")
        if not np.all(np.isfinite(v)):
            raise InvalidInput("directions must be finite")
        if v.shape[0] and np.any(np.max(np.abs(v), axis=1) == 0):
            raise InvalidInput("directions must be nonzero vectors")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, item):
        return self.vectors[item]

    def without(self, index):
        """Copy of the set with the element at ``index`` removed."""
        return DirectionSet(np.delete(self.vectors, index, axis=0))

    def tolist(self):
        return self.vectors.tolist()


def as_direction_set(s):
    return s if isinstance(s, DirectionSet) else DirectionSet(s)


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Symmetric ``d x d`` matrix stored as its packed upper triangle."""

    dim: int
    packed: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.packed, dtype=float).ravel()
        if p.size != packed_size(self.dim):
            raise InvalidInput(f"packed length {p.size} does not match dim {self.dim}")
        p.setflags(write=False)
        object.__setattr__(self, "packed", p)

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput("expected a square matrix")
        if not np.allclose(a, a.T, rtol=1e-12, atol=0):
            raise InvalidInput("matrix is not symmetric")
        return cls(a.shape[0], a[_triu(a.shape[0])])

    def dense(self):
        a = np.zeros((self.dim, self.dim))
        i, j = _triu(self.dim)
        a[i, j] = self.packed
        a[j, i] = self.packed
        return a

    def quadratic_form(self, x):
        """``x^T A x`` evaluated from the packed entries."""
        hv = half_vectorize(np.asarray(x, dtype=float))
        i, j = _triu(self.dim)
        coef = np.where(i == j, 1.0, 2.0)
        return float(np.dot(coef * self.packed, hv))


def canonical_sm_set(d):
    """The ``(d^2+d)/2`` vectors with one or two coordinates equal to one.

    Standard basis first, then ``e_i + e_j`` for ``i < j`` in lexicographic
    order.  Entries are integers.
    """
    if d < 1:
        raise InvalidInput("dimension must be positive")
    eye = np.eye(d, dtype=np.int64)
    pairs = [eye[i] + eye[j] for i, j in itertools.combinations(range(d), 2)]
    return DirectionSet(np.vstack([eye] + pairs) if pairs else eye)


def numerical_rank(m):
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * s[0] * max(m.shape)))


def sum_basis_sm_set(basis):
    """``{v_j + v_k : j <= k}`` built from ``d`` independent vectors."""
    v = np.asarray(basis)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise InvalidInput("basis must be d vectors of length d")
    if numerical_rank(v) < v.shape[0]:
        raise DependentBasis("basis vectors are linearly dependent")
    d = v.shape[0]
    return DirectionSet(np.array([v[j] + v[k] for j in range(d) for k in range(j, d)]))


def half_vectorization_matrix(s):
    s = as_direction_set(s)
    return _half_vectorize_rows(s.vectors)


def uniqueness_margin(s):
    """Ratio of the D-th singular value to the rank threshold.

    Values well above 1 mean a clear uniqueness set; values near 1 mean the
    verdict of :func:`is_sm_uniqueness_set` hinges on the tolerance.  Returns
    0 when the set has fewer than D vectors.
    """
    h = np.asarray(half_vectorization_matrix(s), dtype=float)
    big_d = h.shape[1]
    if h.shape[0] < big_d:
        return 0.0
    sv = np.linalg.svd(h, compute_uv=False)
    if sv[0] == 0:
        return 0.0
    return float(sv[big_d - 1] / (RANK_RTOL * sv[0] * max(h.shape)))


def is_sm_uniqueness_set(s):
    s = as_direction_set(s)
    if len(s) == 0:
        raise InvalidInput("direction set is empty")
    return numerical_rank(half_vectorization_matrix(s)) == packed_size(s.dim)


def spans_space(s):
    s = as_direction_set(s)
    if len(s) == 0:
        raise InvalidInput("direction set is empty")
    return numerical_rank(s.vectors) == s.dim


def null_witness(s):
    """Nonzero symmetric ``A`` with ``x^T A x = 0`` for every ``x`` in ``s``.

    The result is scaled to unit max-abs entry with its first nonzero packed
    entry positive.  Raises :class:`NoWitness` for uniqueness sets.
    """
    s = as_direction_set(s)
    if len(s) == 0:
        raise InvalidInput("direction set is empty")
    d = s.dim
    big_d = packed_size(d)
    h = np.asarray(half_vectorization_matrix(s), dtype=float)
    # full_matrices so that wide systems (|S| < D) expose the whole nullspace
    _, sv, vt = np.linalg.svd(h, full_matrices=True)
    rank = int(np.sum(sv > RANK_RTOL * sv[0] * max(h.shape))) if sv.size else 0
    if rank == big_d:
        raise NoWitness("direction set is an sm-uniqueness set")
    # sum_{i<=j} hv_ij h_ij = 0 and x^T A x = sum_i A_ii x_i^2 + 2 sum_{i<j} A_ij x_i x_j
    null_vec = vt[-1].copy()
    i, j = _triu(d)
    null_vec[i != j] /= 2.0
    null_vec /= np.max(np.abs(null_vec))
    null_vec[np.abs(null_vec) < 1e-12] = 0.0
    first = np.flatnonzero(null_vec)[0]
    if null_vec[first] < 0:
        null_vec = -null_vec
    return SymmetricMatrix(d, null_vec + 0.0)  # + 0.0 clears negative zeros
