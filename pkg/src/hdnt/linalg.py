"""Dense symmetric linear algebra and Gaussian sampling.

Matrices are plain ``numpy`` arrays.  :func:`as_symmetric` is the single entry
point that validates a square matrix and forces exact symmetry by averaging it
with its transpose; every routine here calls it on input.
"""

import numpy as np
from scipy import linalg

from .errors import (DimensionMismatch, InvalidMatrix, NotPositiveSemidefinite,
                     NumericalFailure)

#: relative threshold below which negative eigenvalues count as round-off
CLAMP_RTOL = 1e-10
#: constant added to ``|lambda_min|`` by :func:`psd_repair`
REPAIR_MARGIN = 0.05


def as_symmetric(a):
    """Return ``a`` as a float array with ``a[i, j] == a[j, i]`` exactly."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def as_sample(x, d=None):
    """Validate an ``n x d`` observation matrix (rows are observations)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and d is not None and x.size == 0:
        x = x.reshape(0, d)
    if x.ndim != 2 or x.shape[1] < 1:
        raise DimensionMismatch(f"expected an n x d sample with d >= 1, got shape {x.shape}")
    if d is not None and x.shape[1] != d:
        raise DimensionMismatch(f"expected {d} columns, got {x.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise InvalidMatrix("sample has non-finite entries")
    return x


def sym_eigen(a):
    """Eigendecomposition of a symmetric matrix.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    u : ndarray
        Orthonormal eigenvectors, one per column, so that ``a = u @ diag(w) @ u.T``.
    """
    a = as_symmetric(a)
    try:
        return linalg.eigh(a, driver="evd", check_finite=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc


def _clamp_threshold(w):
    return CLAMP_RTOL * max(1.0, float(w[-1]))


def sqrt_from_eigen(w, u):
    """Assemble ``u diag(sqrt(w)) u^T`` after clamping round-off negatives."""
    if w[0] < -_clamp_threshold(w):
        raise NotPositiveSemidefinite(
            f"smallest eigenvalue {w[0]:.3e} is below tolerance -{_clamp_threshold(w):.1e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    r = (u * root) @ u.T
    return 0.5 * (r + r.T)


def psd_sqrt(a):
    """Symmetric PSD square root ``R`` with ``R @ R == a`` (up to round-off).

    Eigenvalues in ``[-1e-10 * max(1, lambda_max), 0)`` are treated as zero;
    anything more negative raises :class:`NotPositiveSemidefinite`.
    """
    w, u = sym_eigen(a)
    return sqrt_from_eigen(w, u)


def repair_shift(lam_min):
    """Shift ``delta`` used by :func:`psd_repair`, or ``None`` if no repair is needed."""
    if lam_min > 0:
        return None
    return abs(lam_min) + REPAIR_MARGIN


def psd_repair(a):
    """Force positive definiteness with the blend ``(a + delta I) / (1 + delta)``.

    ``delta = |lambda_min(a)| + 0.05``.  Already positive-definite input is
    returned unchanged.

    Returns
    -------
    out : ndarray
    repaired : bool
    """
    a = as_symmetric(a)
    w, _ = sym_eigen(a)
    delta = repair_shift(w[0])
    if delta is None:
        return a, False
    out = (a + delta * np.eye(a.shape[0])) / (1.0 + delta)
    return out, True


def repair_and_sqrt(a):
    """:func:`psd_repair` followed by :func:`psd_sqrt` using one eigendecomposition.

    The repair is an affine map of the spectrum, so the eigenvectors of ``a``
    are reused for the square root.

    Returns
    -------
    cov, sqrt_cov, repaired, lam_min
        ``lam_min`` is the smallest eigenvalue of the returned ``cov``.
    """
    a = as_symmetric(a)
    w, u = sym_eigen(a)
    delta = repair_shift(w[0])
    if delta is None:
        return a, sqrt_from_eigen(w, u), False, float(w[0])
    w = (w + delta) / (1.0 + delta)
    cov = (a + delta * np.eye(a.shape[0])) / (1.0 + delta)
    return cov, sqrt_from_eigen(w, u), True, float(w[0])


def mvn_sample(rng, mean, sqrt_cov, n):
    """Draw ``n`` rows ``mean + sqrt_cov @ z`` with ``z`` standard normal.

    ``sqrt_cov`` must be a symmetric square root (see :func:`psd_sqrt`), so
    ``z @ sqrt_cov`` gives the same rows without a transpose.
    """
    mean = np.asarray(mean, dtype=float)
    sqrt_cov = np.asarray(sqrt_cov, dtype=float)
    if mean.ndim != 1 or sqrt_cov.shape != (mean.size, mean.size):
        raise DimensionMismatch(
            f"mean has shape {mean.shape} but sqrt_cov has shape {sqrt_cov.shape}")
    z = rng.standard_normal((int(n), mean.size))
    return z @ sqrt_cov + mean
