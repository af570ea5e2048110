import numpy as np
import pytest
from scipy.stats import special_ortho_group

from cwelliptical.baselines import energy_statistic, energy_test
from cwelliptical.elliptical import EllipticalSpec, sample_elliptical
from cwelliptical.errors import DimensionMismatch, EmptySample, InvalidInput
from cwelliptical.rng import RngSeed


def _energy_loops(x, y):
    n, m = len(x), len(y)
    dist = lambda a, b: float(np.sqrt(np.sum((a - b) ** 2)))
    sxy = sum(dist(a, b) for a in x for b in y)
    sxx = sum(dist(a, b) for a in x for b in x)
    syy = sum(dist(a, b) for a in y for b in y)
    return n * m / (n + m) * (2 * sxy / (n * m) - sxx / n**2 - syy / m**2)


@pytest.mark.parametrize("x, y, expected", [
    ([[0.0]], [[1.0]], 1.0),
    ([[0.0], [0.0]], [[1.0], [1.0]], 2.0),
])
def test_examples(x, y, expected):
    assert energy_statistic(x, y) == pytest.approx(expected, abs=1e-15)


def test_identical_samples():
    x = np.random.default_rng(0).standard_normal((20, 3))
    assert energy_statistic(x, x) == 0.0
    assert not energy_test(x, x, 99, seed=RngSeed(1)).reject


def test_matches_loops_and_symmetry():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal((12, 3)), rng.standard_normal((9, 3)) + 0.3
    e = energy_statistic(x, y)
    assert e == pytest.approx(_energy_loops(x, y), rel=1e-12)
    assert energy_statistic(y, x) == e
    assert energy_statistic(x[::-1], y[rng.permutation(9)]) == e


def test_rotation_invariance():
    rng = np.random.default_rng(2)
    x, y = rng.standard_normal((30, 4)), rng.standard_normal((25, 4))
    q = special_ortho_group.rvs(4, random_state=3)
    assert energy_statistic(x @ q.T, y @ q.T) == pytest.approx(energy_statistic(x, y), rel=1e-9)


def test_errors():
    with pytest.raises(DimensionMismatch):
        energy_statistic(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(EmptySample):
        energy_statistic(np.zeros((0, 2)), np.zeros((2, 2)))
    with pytest.raises(InvalidInput):
        energy_test([[0.0]], [[1.0]], permutations=10)


def test_permutation_statistics_match_direct():
    # p-value from the indicator shortcut agrees with recomputing each relabelling
    rng = np.random.default_rng(4)
    x, y = rng.standard_normal((10, 2)), rng.standard_normal((8, 2)) + 0.5
    seed = RngSeed(5)
    report = energy_test(x, y, 99, seed=seed)
    pooled = np.vstack([x, y])
    observed = energy_statistic(x, y)
    count = 0
    for r in range(99):
        idx = seed.child(r).generator().permutation(18)
        count += energy_statistic(pooled[idx[:10]], pooled[idx[10:]]) >= observed * (1 - 1e-12)
    assert report.p_value == (1 + count) / 100
    assert energy_test(x, y, 99, seed=seed) == report


def _rejections(shift, reps, seed):
    spec = EllipticalSpec.standard(5)
    hits = 0
    for r in range(reps):
        s = RngSeed(seed).child(r)
        x = sample_elliptical(spec, 100, s.child(0))
        y = sample_elliptical(spec, 100, s.child(1)) + shift
        hits += energy_test(x, y, 199, 0.05, s.child(2)).reject
    return hits / reps


@pytest.mark.slow
def test_level():
    assert 0.02 <= _rejections(0.0, 200, 11) <= 0.09


def test_power_mean_shift():
    assert _rejections(1.0, 30, 12) >= 0.9
