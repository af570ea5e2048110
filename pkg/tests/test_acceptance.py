"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or ``python3 tests/test_acceptance.py``.  Monte Carlo
criteria use fixed seeds and spread repetitions over all CPUs.
"""

import json
import math
import os
import subprocess
import sys
import tempfile
import time
from itertools import combinations_with_replacement

import numpy as np
import pytest

from cwelliptical.elliptical import EllipticalSpec, Gaussian, StudentT, sample_elliptical
from cwelliptical.harness import (ScenarioSpec, run_classification_experiment,
                                  run_mixture_comparison, run_power_study, run_sharpness_demo)
from cwelliptical.kstest import ks_two_sample
from cwelliptical.rng import RngSeed
from cwelliptical.rpt import rpt_statistic
from cwelliptical.smset import (DirectionSet, canonical_sm_set, is_sm_uniqueness_set,
                                null_witness, packed_size)

from acceptance_log import record
from oracles import exact_is_sm_set

WORKERS = os.cpu_count() or 1
SEED = 1

pytestmark = pytest.mark.slow


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_01_uniqueness_suite():
    def body():
        canon = all(is_sm_uniqueness_set(canonical_sm_set(d)) for d in range(2, 9))
        flips, worst = True, 0.0
        for d in (2, 3, 4):
            s = canonical_sm_set(d)
            for i in range(len(s)):
                sub = s.without(i)
                flips &= not is_sm_uniqueness_set(sub)
                a = null_witness(sub).dense()
                worst = max(worst, max(abs(x @ a @ x) for x in sub.vectors.astype(float)))
        return canon, flips, worst

    (canon, flips, worst), secs = _timed(body)
    ok = canon and flips and worst <= 1e-10 and secs < 5
    record(1, ok, f"canonical d=2..8 {canon}, all removals flip {flips}, "
                  f"max|x'Ax|={worst:.1e} (<=1e-10)", secs)
    assert ok


def test_criterion_02_rank_matches_exact_oracle():
    def body():
        rng = np.random.default_rng(SEED)
        agree = unique = 0
        for _ in range(500):
            d = int(rng.integers(2, 5))
            size = packed_size(d) + int(rng.integers(-2, 3))
            rows = rng.integers(-2, 3, (size, d))
            while np.any(np.all(rows == 0, axis=1)):
                bad = np.all(rows == 0, axis=1)
                rows[bad] = rng.integers(-2, 3, (int(bad.sum()), d))
            got = is_sm_uniqueness_set(DirectionSet(rows))
            agree += got == exact_is_sm_set(rows)
            unique += got
        return agree, unique

    (agree, unique), secs = _timed(body)
    ok = agree == 500 and secs < 10
    record(2, ok, f"{agree}/500 agree with exact rank ({unique} unique, {500 - unique} deficient)", secs)
    assert ok


def _count_oracle(counts_a, counts_b):
    """max over pooled support points of |F - G| via cumulative counts, as n*m*gap."""
    ca, cb = np.cumsum(counts_a, axis=1), np.cumsum(counts_b, axis=1)
    n, m = ca[:, -1:], cb[:, -1:]
    gaps = np.abs(ca[:, None, :] * m.T[:, :, None] - cb[None, :, :] * n[:, :, None])
    present = (counts_a[:, None, :] + counts_b[None, :, :]) > 0
    return np.where(present, gaps, 0).max(axis=2), n * m.T


def test_criterion_03_exhaustive_ks():
    def body():
        # the ECDF of a sample depends only on its multiset, so every
        # multiset of size 1..8 over {0,1,2,3} covers every sample
        sets = [c for n in range(1, 9) for c in combinations_with_replacement(range(4), n)]
        counts = np.array([np.bincount(c, minlength=4) for c in sets])
        numer, denom = _count_oracle(counts, counts)
        rng = np.random.default_rng(SEED)
        samples = [rng.permutation(np.array(c, dtype=float)) for c in sets]
        bad = 0
        for i, a in enumerate(samples):
            for j, b in enumerate(samples):
                bad += ks_two_sample(a, b) != numer[i, j] / denom[i, j]
        return len(sets) ** 2, bad

    (pairs, bad), secs = _timed(body)
    ok = bad == 0 and secs < 60
    record(3, ok, f"{pairs} multiset pairs, {bad} disagreements with counting oracle", secs)
    assert ok


def test_criterion_04_null_level():
    def body():
        spec = ScenarioSpec("1", dim=5, n=500, grid=(1,), reps=500, B=500, seed=SEED)
        return run_power_study(spec, WORKERS).fractions[0]

    frac, secs = _timed(body)
    ok = 0.03 <= frac <= 0.08 and secs < 900
    record(4, ok, f"null rejection {frac:.3f} in [0.03, 0.08] (d=5, n=500, B=500, 500 reps)", secs)
    assert ok


def test_criterion_05_power_monotone():
    def body():
        spec = ScenarioSpec("1", dim=5, n=1000, grid=(2, 4), reps=200, B=500, seed=SEED)
        return run_power_study(spec, WORKERS).fractions

    (f2, f4), secs = _timed(body)
    ok = f4 - f2 >= 0.1 and f4 >= 0.9 and secs < 900
    record(5, ok, f"scenario 1, n=1000: nu2=4 {f4:.3f} (>=0.9), nu2=2 {f2:.3f}, "
                  f"gap {f4 - f2:.3f} (>=0.1)", secs)
    assert ok


def test_criterion_06_sharpness():
    res, secs = _timed(lambda: run_sharpness_demo(3, 2000, 200, RngSeed(SEED), 0.05, 500, WORKERS))
    low, high = res.fractions
    ok = low <= 0.10 and high >= 0.8 and secs < 600
    record(6, ok, f"deficient set {low:.3f} (<=0.10), full set {high:.3f} (>=0.8), "
                  f"eps={res.epsilon:.3g}", secs)
    assert ok


def test_criterion_07_consistency():
    def body():
        p = EllipticalSpec.standard(2, Gaussian())
        q = EllipticalSpec.standard(2, StudentT(1))
        s = canonical_sm_set(2)
        medians = []
        for n in (100, 400, 1600):
            stats = []
            for r in range(50):
                seed = RngSeed(SEED).child(r)
                x = sample_elliptical(p, n, seed.child(0))
                y = sample_elliptical(q, n, seed.child(1))
                stats.append(rpt_statistic(x, y, s)[0])
            medians.append(float(np.median(stats)))
        return medians

    med, secs = _timed(body)
    ok = med[0] < med[1] < med[2] and secs < 300
    record(7, ok, "median statistic at n=100,400,1600: " + ", ".join(f"{v:.3f}" for v in med), secs)
    assert ok


def test_criterion_08_mixture_comparison():
    def body():
        spec = ScenarioSpec("mixture", dim=5, n=100, grid=(0.0, 0.6), reps=200, B=500,
                            mixture_weights=(0, 1, 0), seed=SEED)
        curves = run_mixture_comparison(spec, WORKERS)
        return curves["RPT"].fractions, curves["eDistance"].fractions

    ((r0, r6), (e0, e6)), secs = _timed(body)
    ok = (r6 >= e6 - 0.05 and 0.02 <= r0 <= 0.09 and 0.02 <= e0 <= 0.09 and secs < 1200)
    record(8, ok, f"alpha=(0,1,0) mu2=0.6: RPT {r6:.3f} vs eDistance {e6:.3f} (-0.05 slack); "
                  f"level RPT {r0:.3f}, eDistance {e0:.3f} in [0.02, 0.09]", secs)
    assert ok


def test_criterion_09_classifier():
    def body():
        shifted = ScenarioSpec("classify", dim=10, n=500, grid=(3.0,), reps=20, seed=SEED)
        null = ScenarioSpec("classify", dim=10, n=500, grid=(0.0,), reps=20, seed=SEED)
        return (run_classification_experiment(shifted, WORKERS)[0],
                run_classification_experiment(null, WORKERS)[0])

    (acc, chance), secs = _timed(body)
    ok = acc.mean > 0.70 and min(acc.accuracies) > 0.5 and 0.42 <= chance.mean <= 0.58 and secs < 300
    record(9, ok, f"mean accuracy {acc.mean:.3f} (>0.70, min {min(acc.accuracies):.3f}); "
                  f"eta=0 {chance.mean:.3f} in [0.42, 0.58]", secs)
    assert ok


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "cwelliptical", *args], cwd=cwd,
                          capture_output=True)
    return proc.returncode, proc.stdout


def _tree(path):
    return {name: open(os.path.join(path, name), "rb").read() for name in sorted(os.listdir(path))}


def test_criterion_10_cli_determinism():
    def body():
        with tempfile.TemporaryDirectory() as tmp:
            rng = np.random.default_rng(SEED)
            x = rng.standard_normal((300, 3))
            y = rng.standard_normal((300, 3)) + 0.2
            np.savetxt(os.path.join(tmp, "x.csv"), x, delimiter=",", fmt="%.17g")
            np.savetxt(os.path.join(tmp, "y.csv"), y, delimiter=",", fmt="%.17g")
            lab = np.c_[np.r_[x, y], np.r_[np.zeros(300), np.ones(300)]]
            np.savetxt(os.path.join(tmp, "train.csv"), lab, delimiter=",", fmt="%.17g")
            with open(os.path.join(tmp, "cfg.json"), "w") as fh:
                json.dump({"scenario": "2", "dim": 2, "n": 80, "reps": 6, "B": 100,
                           "grid": [0, 0.5], "seed": 3}, fh)
            commands = {
                "gen-smset": ["gen-smset", "--dim", "4"],
                "check-smset": ["check-smset", "--in", "x.csv"],
                "rpt": ["rpt", "--x", "x.csv", "--y", "y.csv", "--B", "300", "--seed", "5"],
                "classify": ["classify", "--train", "train.csv", "--predict", "y.csv", "--seed", "5"],
                "classify-model": ["classify", "--train", "train.csv", "--seed", "5"],
            }
            mismatched = []
            for name, argv in commands.items():
                runs = {_cli(argv + ["--threads", str(t)], tmp) for t in (1, 2, 4, 1)}
                if len(runs) != 1:
                    mismatched.append(name)
            trees = []
            for t in (1, 2, 4):
                out = os.path.join(tmp, f"exp{t}")
                code, _ = _cli(["experiment", "--config", "cfg.json", "--out", out,
                                "--threads", str(t)], tmp)
                trees.append((code, _tree(out)))
            if any(tr != trees[0] for tr in trees):
                mismatched.append("experiment")
            return len(commands) + 1, mismatched

    (n_cmd, mismatched), secs = _timed(body)
    ok = not mismatched and secs < 60
    record(10, ok, f"{n_cmd} CLI invocations byte-identical across reruns and --threads 1/2/4"
                   + (f"; differing: {mismatched}" if mismatched else ""), secs)
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
