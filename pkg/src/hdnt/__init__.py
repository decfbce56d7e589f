"""Nearest-neighbor normality test for high-dimensional data."""

__version__ = "0.1.0"

from .baselines import efr_test, euclidean_mst, mardia_tests  # noqa: E402
from .covariance import adaptive_threshold_cov, fit_gaussian_model, sample_moments  # noqa: E402
from .linalg import mvn_sample, psd_repair, psd_sqrt, sym_eigen  # noqa: E402
from .nnstat import nn_fraction, nn_indices, pool  # noqa: E402
from .normtest import TestReport, nn_normality_test, two_sided_pvalue  # noqa: E402
from .simlab import (AltSpec, CovSpec, ExperimentSpec, draw_sample,  # noqa: E402
                     make_covariance, run_experiment)

__all__ = [
    "AltSpec", "CovSpec", "ExperimentSpec", "TestReport", "adaptive_threshold_cov",
    "draw_sample", "efr_test", "euclidean_mst", "fit_gaussian_model", "make_covariance",
    "mardia_tests", "mvn_sample", "nn_fraction", "nn_indices", "nn_normality_test", "pool",
    "psd_repair", "psd_sqrt", "run_experiment", "sample_moments", "sym_eigen",
    "two_sided_pvalue",
]
