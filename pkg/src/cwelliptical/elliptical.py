"""Elliptical distributions: parameters, samplers, characteristic functions.

Two generator families are supported, Gaussian and multivariate Student t
(Cauchy is ``StudentT(1)``).  Samples are plain ``(n, d)`` float arrays, one
observation per row.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, InvalidInput, NotPd, NotPsd,
                     UnsupportedGenerator, ZeroDirection, ZeroWitness)
from .rng import as_seed
from .smset import SymmetricMatrix, as_direction_set, null_witness

#: relative eigenvalue tolerance for PSD / PD decisions
EIG_RTOL = 1e-10


@dataclass(frozen=True)
class Gaussian:
    def to_json(self):
        return "gaussian"


@dataclass(frozen=True)
class StudentT:
    nu: int

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 1:
            raise InvalidInput(f"degrees of freedom must be a positive integer, got {self.nu!r}")

    def to_json(self):
        return {"student_t": int(self.nu)}


def Cauchy():
    return StudentT(1)


def generator_from_json(obj):
    if obj == "gaussian":
        return Gaussian()
    if obj == "cauchy":
        return StudentT(1)
    if isinstance(obj, dict) and set(obj) == {"student_t"}:
        nu = obj["student_t"]
        if isinstance(nu, bool) or not isinstance(nu, (int, float)):
            raise InvalidInput("student_t degrees of freedom must be a number")
        return StudentT(nu)
    raise InvalidInput(f"unknown generator {obj!r}")


def _as_matrix(sigma):
    if isinstance(sigma, SymmetricMatrix):
        return sigma.dense()
    a = np.asarray(sigma, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput("scale matrix must be square")
    return a


def _eigvalsh(a):
    return np.linalg.eigvalsh(a)


def _check_psd(a):
    w = _eigvalsh(a)
    lam_max = max(w[-1], 0.0)
    if w[0] < -EIG_RTOL * lam_max or (lam_max == 0 and w[0] < 0):
        raise NotPsd(f"scale matrix has eigenvalue {w[0]:.3g} < 0")
    return w


@dataclass(frozen=True, eq=False)
class EllipticalSpec:
    """Location ``mu``, scale ``sigma`` (dense, symmetric PSD) and generator."""

    mu: np.ndarray
    sigma: np.ndarray
    generator: object = field(default_factory=Gaussian)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).ravel()
        sigma = _as_matrix(self.sigma)
        if sigma.shape[0] != mu.size:
            raise DimensionMismatch("mu and sigma dimensions differ")
        if not np.all(np.isfinite(sigma)) or not np.all(np.isfinite(mu)):
            raise InvalidInput("parameters must be finite")
        if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-14):
            raise InvalidInput("scale matrix is not symmetric")
        sigma = (sigma + sigma.T) / 2
        _check_psd(sigma)
        if not isinstance(self.generator, (Gaussian, StudentT)):
            raise InvalidInput(f"unsupported generator {self.generator!r}")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self):
        return self.mu.size

    @classmethod
    def standard(cls, d, generator=None):
        return cls(np.zeros(d), np.eye(d), generator or Gaussian())

    def replace(self, **changes):
        kw = dict(mu=self.mu, sigma=self.sigma, generator=self.generator)
        kw.update(changes)
        return EllipticalSpec(**kw)

    def to_json(self):
        return {"mu": self.mu.tolist(), "sigma": self.sigma.tolist(),
                "generator": self.generator.to_json()}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["mu"], obj["sigma"], generator_from_json(obj.get("generator", "gaussian")))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"bad spec: {exc}") from exc


def cholesky_factor(sigma):
    """Lower-triangular ``L`` with ``L @ L.T == sigma``.

    Positive definite input goes through LAPACK.  Semi-definite input is
    factored column by column; a column whose pivot is numerically zero is
    left at zero (the PSD structure forces the rest of that column to be
    zero as well).
    """
    a = _as_matrix(sigma)
    w = _check_psd(a)
    if w[0] > EIG_RTOL * w[-1]:
        try:
            return np.linalg.cholesky(a)
        except np.linalg.LinAlgError:
            pass
    d = a.shape[0]
    tol = EIG_RTOL * max(w[-1], 0.0)
    low = np.zeros_like(a)
    for k in range(d):
        pivot = a[k, k] - low[k, :k] @ low[k, :k]
        if pivot <= tol:
            continue
        low[k, k] = np.sqrt(pivot)
        low[k + 1:, k] = (a[k + 1:, k] - low[k + 1:, :k] @ low[k, :k]) / low[k, k]
    return low


def _chi2(rng, nu, n):
    if nu <= 100:
        return np.sum(rng.standard_normal((n, nu)) ** 2, axis=1)
    return rng.chisquare(nu, n)


def sample_elliptical(spec, n, seed=None):
    """Draw ``n`` i.i.d. rows from ``spec``; deterministic in ``seed``."""
    if n < 0:
        raise InvalidInput("sample size must be nonnegative")
    rng = as_seed(seed).generator()
    low = cholesky_factor(spec.sigma)
    z = rng.standard_normal((n, spec.dim)) @ low.T
    if isinstance(spec.generator, StudentT):
        nu = int(spec.generator.nu)
        z /= np.sqrt(_chi2(rng, nu, n) / nu)[:, None]
    return spec.mu + z


@dataclass(frozen=True)
class MixtureSpec:
    """``a1*N(mu 1, I) + a2*Cauchy(mu 1, I) + a3*(two-centre Gaussian at +-(1+mu) 1)``."""

    dim: int
    shift: float
    weights: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        if len(w) != 3 or min(w) < 0 or abs(sum(w) - 1) > 1e-12:
            raise InvalidInput(f"mixture weights must be 3 nonnegative numbers summing to 1, got {self.weights!r}")
        if self.dim < 1:
            raise InvalidInput("dimension must be positive")
        object.__setattr__(self, "weights", w)


def sample_mixture(spec, n, seed=None):
    if n < 0:
        raise InvalidInput("sample size must be nonnegative")
    rng = as_seed(seed).generator()
    d = spec.dim
    comp = rng.choice(3, size=n, p=np.asarray(spec.weights) / sum(spec.weights))
    z = rng.standard_normal((n, d))
    w = rng.standard_normal(n) ** 2
    coin = rng.integers(0, 2, size=n)
    out = spec.shift + z
    cauchy = comp == 1
    out[cauchy] = spec.shift + z[cauchy] / np.sqrt(w[cauchy])[:, None]
    two = comp == 2
    centre = np.where(coin[two] == 1, 1.0, -1.0) * (1.0 + spec.shift)
    out[two] = centre[:, None] + z[two]
    return out


def as_sample(data, dim=None, name="sample"):
    x = np.asarray(data, dtype=float)
    if x.ndim == 1 and dim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-d array (rows are observations)")
    if dim is not None and x.shape[1] != dim:
        raise DimensionMismatch(f"{name} has {x.shape[1]} columns, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput(f"{name} contains non-finite values")
    return x


def project(sample, direction):
    """Inner products of every row with ``direction`` (no normalisation)."""
    v = np.asarray(direction, dtype=float).ravel()
    x = as_sample(sample)
    if v.size != x.shape[1]:
        raise DimensionMismatch(f"direction has length {v.size}, sample has dim {x.shape[1]}")
    if not np.any(v):
        raise ZeroDirection("projection direction is zero")
    return x @ v


def characteristic_function(spec, xi):
    """``exp(i mu.xi) * psi(xi^T Sigma xi)`` for the Gaussian and Cauchy families."""
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size != spec.dim:
        raise DimensionMismatch("argument length does not match the distribution")
    q = max(float(xi @ spec.sigma @ xi), 0.0)
    if isinstance(spec.generator, Gaussian):
        psi = np.exp(-q / 2)
    elif spec.generator.nu == 1:
        psi = np.exp(-np.sqrt(q))
    else:
        raise UnsupportedGenerator(f"no closed-form characteristic function for t with {spec.generator.nu} df")
    return complex(np.exp(1j * float(spec.mu @ xi)) * psi)


def is_nondegenerate(spec):
    # every implemented generator has a non-constant psi
    w = _eigvalsh(spec.sigma)
    return bool(w[-1] > 0 and w[0] > EIG_RTOL * w[-1])


def choose_epsilon(sigma1, a):
    """Step size keeping ``sigma1 + eps*a`` at least half as positive as ``sigma1``.

    ``eps = lambda_min(sigma1) / (2 * spectral_radius(a))``.
    """
    s1 = _as_matrix(sigma1)
    am = _as_matrix(a)
    if not np.any(am):
        raise ZeroWitness("perturbation matrix is zero")
    w = _eigvalsh(s1)
    if not (w[-1] > 0 and w[0] > EIG_RTOL * w[-1]):
        raise NotPd("reference scale matrix is not strictly positive definite")
    rho = np.max(np.abs(_eigvalsh(am)))
    return float(0.5 * w[0] / rho)


def matched_alternative(spec, s):
    """A different elliptical law with the same marginals along every vector of ``s``.

    Returns a spec with the same location and generator and scale
    ``sigma + eps * A`` where ``A`` is a null witness of ``s``.
    """
    s = as_direction_set(s)
    if s.dim != spec.dim:
        raise DimensionMismatch("direction set and distribution dimensions differ")
    if not is_nondegenerate(spec):
        raise NotPd("reference distribution is degenerate")
    a = null_witness(s).dense()
    eps = choose_epsilon(spec.sigma, a)
    return spec.replace(sigma=spec.sigma + eps * a)


def affine_transport(sample, source, target):
    """Map a sample of ``source`` to one of ``target`` (same generator).

    Applies ``x -> S2^T S1^{-T} (x - mu1) + mu2`` with ``Sigma_k = L_k L_k^T``,
    the row-vector form of the map pushing ``source`` onto ``target``.
    """
    if source.dim != target.dim:
        raise DimensionMismatch("source and target dimensions differ")
    if not is_nondegenerate(source):
        raise NotPd("source distribution is degenerate")
    x = as_sample(sample, source.dim)
    l1 = cholesky_factor(source.sigma)
    l2 = cholesky_factor(target.sigma)
    t = np.linalg.solve(l1, (x - source.mu).T)
    return (l2 @ t).T + target.mu
