"""Seeded Monte Carlo experiments: power curves, baseline comparison,
the sharpness demonstration and the classification study.

Repetition ``r`` draws all of its randomness from ``RngSeed(seed).child(r)``
regardless of the grid point, so grid points share common random numbers,
and running more repetitions never changes the earlier ones.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import baselines, classify, elliptical, rpt
from .elliptical import EllipticalSpec, Gaussian, MixtureSpec, StudentT
from .errors import InvalidInput
from .rng import RngSeed
from .smset import canonical_sm_set

SCENARIOS = ("1", "2", "3", "mixture", "classify", "sharpness")

_DEFAULT_GRIDS = {
    "1": [1, 2, 3, 4],
    "2": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
    "3": [0.0, 0.25, 0.5, 0.75, 1.0],
    "mixture": [0.0, 0.2, 0.4, 0.6],
    "classify": [3.0],
    "sharpness": [0],
}
_DEFAULT_N = {"mixture": 100, "classify": 500, "sharpness": 2000}
_DEFAULT_DIM = {"sharpness": 3, "classify": 10}


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    dim: int = 5
    n: int = 500
    grid: tuple = ()
    reps: int = 200
    alpha: float = 0.05
    B: int = 500
    seed: int = 0
    scheme: str = "separate"
    mixture_weights: tuple = None
    permutations: int = 299
    eta_active: int = 3
    k: int = None
    omega: float = 0.25
    delta: float = 0.5
    train_fraction: float = 0.75

    def __post_init__(self):
        sc = str(self.scenario)
        object.__setattr__(self, "scenario", sc)
        if sc not in SCENARIOS:
            raise InvalidInput(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        object.__setattr__(self, "grid", tuple(self.grid) or tuple(_DEFAULT_GRIDS[sc]))
        _require(self.reps >= 1, "reps must be >= 1")
        _require(self.dim >= 1 and self.n >= 1, "dim and n must be positive")
        _require(0 < self.alpha < 1, "alpha must lie in (0, 1)")
        _require(self.B >= 100, "B must be >= 100")
        _require(self.scheme in rpt.SCHEMES, f"unknown bootstrap scheme {self.scheme!r}")
        _require(0 <= self.seed < 2**64, "seed must be an unsigned 64-bit integer")
        if sc == "1":
            _require(all(float(v).is_integer() and v >= 1 for v in self.grid),
                     "scenario 1 grid values are degrees of freedom (positive integers)")
        if sc == "3":
            _require(all(v >= 0 for v in self.grid), "scenario 3 grid values must be >= 0")
        if sc == "mixture":
            _require(self.mixture_weights is not None, "mixture scenario needs mixture_weights")
            MixtureSpec(self.dim, 0.0, tuple(self.mixture_weights))
            object.__setattr__(self, "mixture_weights", tuple(float(a) for a in self.mixture_weights))
            _require(self.permutations >= 99, "permutations must be >= 99")
        if sc == "sharpness":
            _require(self.dim >= 2, "sharpness demo needs dim >= 2")
        if sc == "classify":
            _require(all(v >= 0 for v in self.grid), "classification grid holds shift bounds >= 0")
            _require(0 <= self.eta_active <= self.dim, "eta_active must lie in [0, dim]")
            _require(0 < self.train_fraction < 1, "train_fraction must lie in (0, 1)")

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise InvalidInput("experiment config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in obj:
            raise InvalidInput("config needs a 'scenario' key")
        sc = str(obj["scenario"])
        kw = dict(obj)
        kw["scenario"] = sc
        kw.setdefault("n", _DEFAULT_N.get(sc, 500))
        kw.setdefault("dim", _DEFAULT_DIM.get(sc, 5))
        for key in ("dim", "n", "reps", "B", "seed", "permutations", "eta_active"):
            if key in kw and not _is_int(kw[key]):
                raise InvalidInput(f"{key} must be an integer")
        if kw.get("k") is not None and not _is_int(kw["k"]):
            raise InvalidInput("k must be an integer or null")
        if "grid" in kw:
            if not isinstance(kw["grid"], list) or not kw["grid"] or not all(_is_num(v) for v in kw["grid"]):
                raise InvalidInput("grid must be a nonempty list of numbers")
            kw["grid"] = tuple(kw["grid"])
        try:
            return cls(**kw)
        except TypeError as exc:
            raise InvalidInput(str(exc)) from exc

    def to_json(self):
        out = asdict(self)
        out["grid"] = list(self.grid)
        if self.mixture_weights is not None:
            out["mixture_weights"] = list(self.mixture_weights)
        return out


def _require(cond, msg):
    if not cond:
        raise InvalidInput(msg)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


@dataclass
class PowerCurve:
    parameter: list
    rejections: list
    reps: int
    label: str = "RPT"

    @property
    def fractions(self):
        return [r / self.reps for r in self.rejections]

    @property
    def mc_se(self):
        return [math.sqrt(f * (1 - f) / self.reps) for f in self.fractions]

    def rows(self):
        for p, r, f, se in zip(self.parameter, self.rejections, self.fractions, self.mc_se):
            yield {"test": self.label, "parameter": p, "rejections": r,
                   "reps": self.reps, "fraction": f, "mc_se": se}


@dataclass
class SharpnessResult:
    deficient: PowerCurve
    full: PowerCurve
    epsilon: float
    sigma_alternative: np.ndarray = field(repr=False)

    @property
    def fractions(self):
        return self.deficient.fractions[0], self.full.fractions[0]


@dataclass
class AccuracySummary:
    parameter: float
    accuracies: list

    @property
    def mean(self):
        return float(np.mean(self.accuracies))

    @property
    def sd(self):
        return float(np.std(self.accuracies, ddof=1)) if len(self.accuracies) > 1 else 0.0


def _map(fn, items, workers):
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
    return [fn(it) for it in items]


def _pair_for(spec, value):
    d = spec.dim
    eye = np.eye(d)
    if spec.scenario == "1":
        return (EllipticalSpec(np.zeros(d), eye, StudentT(1)),
                EllipticalSpec(np.zeros(d), eye, StudentT(int(value))))
    if spec.scenario == "2":
        return (EllipticalSpec(np.zeros(d), eye, StudentT(2)),
                EllipticalSpec(np.full(d, float(value)), eye, StudentT(2)))
    if spec.scenario == "3":
        return (EllipticalSpec(np.zeros(d), eye, StudentT(2)),
                EllipticalSpec(np.zeros(d), eye + float(value) * np.ones((d, d)), StudentT(2)))
    raise InvalidInput(f"scenario {spec.scenario} is not a power study")


def _power_rep(args):
    spec, rep = args
    seed = RngSeed(spec.seed).child(rep)
    s = canonical_sm_set(spec.dim)
    cfg = rpt.RptConfig(s, spec.B, spec.alpha, seed.child(2), spec.scheme)
    out = []
    for value in spec.grid:
        p, q = _pair_for(spec, value)
        x = elliptical.sample_elliptical(p, spec.n, seed.child(0))
        y = elliptical.sample_elliptical(q, spec.n, seed.child(1))
        out.append(rpt.rpt_test(x, y, cfg).reject)
    return out


def _tally(per_rep):
    return [int(v) for v in np.sum(np.asarray(per_rep, dtype=int), axis=0)]


def run_power_study(spec, workers=1):
    """Rejection fractions of the projection test along the scenario grid."""
    if spec.scenario not in ("1", "2", "3"):
        raise InvalidInput("run_power_study handles scenarios 1, 2 and 3")
    per_rep = _map(_power_rep, [(spec, r) for r in range(spec.reps)], workers)
    return PowerCurve(list(spec.grid), _tally(per_rep), spec.reps)


def _mixture_rep(args):
    spec, rep = args
    seed = RngSeed(spec.seed).child(rep)
    s = canonical_sm_set(spec.dim)
    cfg = rpt.RptConfig(s, spec.B, spec.alpha, seed.child(2), spec.scheme)
    x = elliptical.sample_mixture(MixtureSpec(spec.dim, 0.0, spec.mixture_weights), spec.n, seed.child(0))
    out = []
    for value in spec.grid:
        y = elliptical.sample_mixture(MixtureSpec(spec.dim, float(value), spec.mixture_weights),
                                      spec.n, seed.child(1))
        e = baselines.energy_test(x, y, spec.permutations, spec.alpha, seed.child(3))
        out.append((rpt.rpt_test(x, y, cfg).reject, e.reject))
    return out


def run_mixture_comparison(spec, workers=1):
    """Power of the projection test and of the energy test on mixture data."""
    if spec.scenario != "mixture":
        raise InvalidInput("run_mixture_comparison needs the mixture scenario")
    per_rep = np.asarray(_map(_mixture_rep, [(spec, r) for r in range(spec.reps)], workers), dtype=int)
    grid = list(spec.grid)
    return {
        "RPT": PowerCurve(grid, [int(v) for v in per_rep[:, :, 0].sum(axis=0)], spec.reps, "RPT"),
        "eDistance": PowerCurve(grid, [int(v) for v in per_rep[:, :, 1].sum(axis=0)], spec.reps, "eDistance"),
    }


def sharpness_setup(d):
    """Reference law, deficient set and matched alternative for the demo."""
    p = EllipticalSpec(np.zeros(d), np.eye(d), Gaussian())
    full = canonical_sm_set(d)
    deficient = full.without(len(full) - 1)
    q = elliptical.matched_alternative(p, deficient)
    return p, q, deficient, full


def _sharpness_rep(args):
    spec, rep = args
    seed = RngSeed(spec.seed).child(rep)
    p, q, deficient, full = sharpness_setup(spec.dim)
    x = elliptical.sample_elliptical(p, spec.n, seed.child(0))
    y = elliptical.sample_elliptical(q, spec.n, seed.child(1))
    return [rpt.rpt_test(x, y, rpt.RptConfig(s, spec.B, spec.alpha, seed.child(2), spec.scheme)).reject
            for s in (deficient, full)]


def run_sharpness_demo(d=3, n=2000, reps=200, seed=0, alpha=0.05, B=500, workers=1):
    """Test a law against its matched alternative with a deficient and a full set."""
    spec = ScenarioSpec("sharpness", dim=d, n=n, reps=reps, alpha=alpha, B=B,
                        seed=seed.seed if isinstance(seed, RngSeed) else int(seed))
    return _sharpness(spec, workers)


def _sharpness(spec, workers):
    p, q, deficient, full = sharpness_setup(spec.dim)
    a = q.sigma - p.sigma
    eps = float(np.max(np.abs(a)))  # witness has unit max-abs entry
    counts = _tally(_map(_sharpness_rep, [(spec, r) for r in range(spec.reps)], workers))
    return SharpnessResult(PowerCurve(["deficient"], counts[:1], spec.reps, "deficient"),
                           PowerCurve(["full"], counts[1:], spec.reps, "full"), eps, q.sigma)


def classification_task(d, class_size, eta_max, eta_active, seed):
    """Two classes of independent standard Cauchy coordinates; class 1 shifted by eta."""
    rng = seed.generator()
    eta = np.zeros(d)
    eta[:eta_active] = rng.uniform(0.0, eta_max, eta_active)
    x = np.vstack([rng.standard_cauchy((class_size, d)), rng.standard_cauchy((class_size, d)) + eta])
    y = np.r_[np.zeros(class_size, dtype=np.int64), np.ones(class_size, dtype=np.int64)]
    perm = rng.permutation(2 * class_size)
    return x[perm], y[perm]


def _classify_rep(args):
    spec, rep = args
    seed = RngSeed(spec.seed).child(rep)
    s = canonical_sm_set(spec.dim)
    out = []
    for eta_max in spec.grid:
        x, y = classification_task(spec.dim, spec.n, float(eta_max), spec.eta_active, seed.child(0))
        n_train = int(round(spec.train_fraction * len(y)))
        model = classify.fit(classify.LabeledSample(x[:n_train], y[:n_train]), s,
                             spec.k, spec.omega, spec.delta, seed.child(1))
        out.append(float(np.mean(classify.predict_many(model, x[n_train:]) == y[n_train:])))
    return out


def run_classification_experiment(spec, workers=1):
    """Per-repetition test accuracies, one summary per shift bound in the grid."""
    if spec.scenario != "classify":
        raise InvalidInput("run_classification_experiment needs the classify scenario")
    acc = np.asarray(_map(_classify_rep, [(spec, r) for r in range(spec.reps)], workers))
    return [AccuracySummary(float(v), acc[:, i].tolist()) for i, v in enumerate(spec.grid)]


def run_experiment(spec, workers=1):
    """Dispatch on the scenario; returns ``(csv header, rows, summary dict)``."""
    if spec.scenario in ("1", "2", "3"):
        curve = run_power_study(spec, workers)
        return _POWER_HEADER, list(curve.rows()), {}
    if spec.scenario == "mixture":
        curves = run_mixture_comparison(spec, workers)
        rows = [row for c in curves.values() for row in c.rows()]
        return _POWER_HEADER, rows, {}
    if spec.scenario == "sharpness":
        res = _sharpness(spec, workers)
        rows = [dict(r, parameter=r["test"]) for c in (res.deficient, res.full) for r in c.rows()]
        return _POWER_HEADER, rows, {"epsilon": res.epsilon,
                                     "sigma_alternative": res.sigma_alternative.tolist()}
    summaries = run_classification_experiment(spec, workers)
    rows = [{"parameter": s.parameter, "rep": i, "accuracy": a}
            for s in summaries for i, a in enumerate(s.accuracies)]
    return ["parameter", "rep", "accuracy"], rows, {
        "accuracy": [{"parameter": s.parameter, "mean": s.mean, "sd": s.sd} for s in summaries]}


_POWER_HEADER = ["test", "parameter", "rejections", "reps", "fraction", "mc_se"]
