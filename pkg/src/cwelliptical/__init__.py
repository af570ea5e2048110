"""Finite-projection Cramer-Wold tools for elliptical distributions."""

from .baselines import EnergyReport, energy_statistic, energy_test
from .classify import LabeledSample, RpClassifier, fit, knn_posterior, predict, predict_many
from .elliptical import (Cauchy, EllipticalSpec, Gaussian, MixtureSpec, StudentT,
                         affine_transport, characteristic_function, cholesky_factor,
                         choose_epsilon, is_nondegenerate, matched_alternative, project,
                         sample_elliptical, sample_mixture)
from .errors import *  # noqa: F401,F403
from .kstest import EmpiricalCdf, ks_two_sample
from .rng import RngSeed
from .rpt import RptConfig, TestReport, bootstrap_distribution, rpt_statistic, rpt_test
from .smset import (DirectionSet, SymmetricMatrix, canonical_sm_set, half_vectorize,
                    is_sm_uniqueness_set, null_witness, spans_space, sum_basis_sm_set)

__version__ = "0.1.0"
