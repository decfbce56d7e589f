"""Mean and covariance estimation.

Two estimators are available for the Gaussian fit: the raw sample covariance
(``"sample"``) and the entry-adaptive thresholding estimator (``"adaptive"``),
which zeroes each off-diagonal sample covariance whose magnitude falls below

    lambda_ij = delta * sqrt(theta_ij * log(d) / n),
    theta_ij  = mean_k [ (X_ki - xbar_i) (X_kj - xbar_j) - S_ij ]^2 .

All covariances use divisor ``n``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptySample, InsufficientSample, InvalidConfig
from .linalg import as_sample, as_symmetric, repair_and_sqrt, sym_eigen

ESTIMATORS = ("adaptive", "sample")
DEFAULT_DELTA = 2.0


@dataclass(frozen=True)
class CovarianceEstimate:
    """Thresholded covariance.

    ``zeroed_fraction`` is the share of off-diagonal entries set to zero
    (0 when ``d == 1``).
    """

    matrix: np.ndarray
    zeroed_fraction: float
    delta: float


@dataclass(frozen=True)
class GaussianModel:
    mean: np.ndarray
    cov: np.ndarray
    sqrt_cov: np.ndarray
    repaired: bool
    estimator: str
    lam_min: float
    zeroed_fraction: float = 0.0

    @property
    def d(self):
        return self.mean.size


def estimator_tag(estimator, delta=DEFAULT_DELTA):
    check_estimator(estimator)
    if estimator == "adaptive":
        return f"adaptive_threshold({delta:g})"
    return "sample"


def check_estimator(estimator):
    if estimator not in ESTIMATORS:
        raise InvalidConfig(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


def sample_moments(x):
    """Sample mean and divisor-``n`` covariance of the rows of ``x``."""
    x = as_sample(x)
    n = x.shape[0]
    if n == 0:
        raise EmptySample("cannot estimate moments from an empty sample")
    mean = x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / n
    return mean, 0.5 * (cov + cov.T)


def _threshold(x, delta):
    # returns (mean, thresholded matrix, zeroed fraction)
    n, d = x.shape
    mean = x.mean(axis=0)
    xc = x - mean
    s = xc.T @ xc / n
    s = 0.5 * (s + s.T)
    if delta == 0 or d == 1:
        return mean, s, 0.0
    sq = xc * xc
    # mean_k (a_k b_k - s)^2 == mean_k a_k^2 b_k^2 - s^2 since mean_k a_k b_k == s
    theta = sq.T @ sq / n - s * s
    theta = np.clip(0.5 * (theta + theta.T), 0.0, None)
    lam = delta * np.sqrt(theta * (np.log(d) / n))
    keep = np.abs(s) >= lam
    np.fill_diagonal(keep, True)
    out = np.where(keep, s, 0.0)
    zeroed = (d * d - np.count_nonzero(keep)) / (d * (d - 1))
    return mean, out, float(zeroed)


def adaptive_threshold_cov(x, delta=DEFAULT_DELTA):
    """Adaptive entrywise thresholding of the sample covariance.

    Parameters
    ----------
    x : array_like, shape (n, d)
    delta : float
        Threshold constant; ``0`` returns the sample covariance unchanged.

    Returns
    -------
    CovarianceEstimate
    """
    x = as_sample(x)
    if x.shape[0] < 2:
        raise InsufficientSample(f"need at least 2 observations, got {x.shape[0]}")
    if not delta >= 0:
        raise InvalidConfig(f"delta must be nonnegative, got {delta}")
    _, out, zeroed = _threshold(x, float(delta))
    return CovarianceEstimate(matrix=out, zeroed_fraction=zeroed, delta=float(delta))


def fit_gaussian_model(x, estimator="adaptive", delta=DEFAULT_DELTA):
    """Fit mean and a positive-definite covariance to ``x``.

    The covariance from the chosen estimator goes through ``psd_repair`` and
    its square root is cached on the model.
    """
    check_estimator(estimator)
    x = as_sample(x)
    n = x.shape[0]
    if n == 0:
        raise EmptySample("cannot fit a model to an empty sample")
    if n < 2:
        raise InsufficientSample(f"need at least 2 observations, got {n}")
    if estimator == "adaptive":
        if not delta >= 0:
            raise InvalidConfig(f"delta must be nonnegative, got {delta}")
        mean, raw, zeroed = _threshold(x, float(delta))
    else:
        mean, raw = sample_moments(x)
        zeroed = 0.0
    cov, root, repaired, lam_min = repair_and_sqrt(raw)
    return GaussianModel(mean=mean, cov=cov, sqrt_cov=root, repaired=repaired,
                         estimator=estimator_tag(estimator, delta), lam_min=lam_min,
                         zeroed_fraction=zeroed)


def assumption_diagnostics(x, model):
    """Spectral diagnostics of a fitted model against the raw sample covariance.

    Reported quantities: the extreme eigenvalues and condition number of the
    fitted covariance, and the spectral-norm distance between the fitted and
    the sample covariance.  Nothing here is a pass/fail check.
    """
    _, s = sample_moments(x)
    w, _ = sym_eigen(model.cov)
    dist = np.abs(sym_eigen(as_symmetric(model.cov - s))[0])
    return {
        "lambda_min": float(w[0]),
        "lambda_max": float(w[-1]),
        "condition_number": float(w[-1] / w[0]) if w[0] > 0 else float("inf"),
        "spectral_distance_to_sample_cov": float(dist.max()),
        "repaired": bool(model.repaired),
        "zeroed_fraction": float(model.zeroed_fraction),
    }
