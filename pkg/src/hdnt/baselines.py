"""Comparison tests: Mardia's skewness and kurtosis tests and the extended
Friedman-Rafsky (eFR) minimum-spanning-tree test."""

from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import stats

from .covariance import DEFAULT_DELTA, fit_gaussian_model, sample_moments
from .errors import InsufficientPoints, InsufficientSample, InvalidConfig, SingularCovariance
from .linalg import as_sample, mvn_sample
from .normtest import exceed_count
from .parallel import map_indexed, substream

METHODS = ("mardia_skew", "mardia_kurt", "bonferroni", "efr", "efr0")


@dataclass(frozen=True)
class BaselineReport:
    method: str
    statistic: float
    p_value: float
    reject: bool


@dataclass(frozen=True)
class MstEdgeList:
    """Edges ``(i, j)`` with ``i < j`` and their squared-Euclidean weights."""

    m: int
    edges: np.ndarray
    weights: np.ndarray

    @property
    def total_weight(self):
        return float(self.weights.sum())


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise InvalidConfig(f"alpha must lie in (0, 1), got {alpha}")


def mardia_moments(x):
    """Mardia's multivariate skewness ``b1`` and kurtosis ``b2``.

    ``g = Xc S^{-1} Xc^T`` with the divisor-``n`` covariance ``S``;
    ``b1 = sum(g**3) / n**2`` and ``b2 = sum(diag(g)**2) / n``.
    """
    x = as_sample(x)
    n, d = x.shape
    if n < 2:
        raise InsufficientSample(f"need at least 2 observations, got {n}")
    if n <= d:
        raise SingularCovariance(f"sample covariance is singular for n={n} <= d={d}")
    mean, s = sample_moments(x)
    xc = x - mean
    try:
        c = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("sample covariance is not positive definite") from exc
    z = np.linalg.solve(c, xc.T)  # columns are whitened observations
    g = z.T @ z
    b1 = float((g ** 3).sum() / n ** 2)
    b2 = float((np.diag(g) ** 2).sum() / n)
    return b1, b2


def mardia_tests(x, alpha=0.05):
    """Mardia skewness, kurtosis and Bonferroni-combined tests.

    Skewness: ``n b1 / 6`` against chi-square with ``d(d+1)(d+2)/6`` degrees
    of freedom.  Kurtosis: ``(b2 - d(d+2)) / sqrt(8 d (d+2) / n)`` against a
    two-sided standard normal.  Bonferroni: ``min(1, 2 min(p_skew, p_kurt))``.

    Returns
    -------
    skew, kurt, bonf : BaselineReport
    """
    _check_alpha(alpha)
    x = as_sample(x)
    n, d = x.shape
    b1, b2 = mardia_moments(x)
    skew_stat = n * b1 / 6.0
    p_skew = float(stats.chi2.sf(skew_stat, d * (d + 1) * (d + 2) / 6.0))
    kurt_stat = (b2 - d * (d + 2)) / np.sqrt(8.0 * d * (d + 2) / n)
    p_kurt = float(2.0 * stats.norm.sf(abs(kurt_stat)))
    p_bonf = min(1.0, 2.0 * min(p_skew, p_kurt))
    return (
        BaselineReport("mardia_skew", float(skew_stat), p_skew, p_skew <= alpha),
        BaselineReport("mardia_kurt", float(kurt_stat), p_kurt, p_kurt <= alpha),
        BaselineReport("bonferroni", min(p_skew, p_kurt), p_bonf, p_bonf <= alpha),
    )


def _pair_key(i, j, m):
    lo = np.minimum(i, j)
    return lo * m + np.maximum(i, j)


def euclidean_mst(points):
    """Minimum spanning tree of the complete squared-Euclidean graph (dense Prim).

    Ties are broken towards the lexicographically smallest ``(i, j)`` pair,
    both when choosing the next vertex and when updating a vertex's best edge.
    """
    p = as_sample(points)
    m = p.shape[0]
    if m < 2:
        raise InsufficientPoints(f"need at least 2 points, got {m}")
    in_tree = np.zeros(m, dtype=bool)
    key = np.full(m, np.inf)
    parent = np.full(m, -1, dtype=np.intp)
    edges = np.empty((m - 1, 2), dtype=np.intp)
    weights = np.empty(m - 1)
    u = 0
    in_tree[0] = True
    for k in range(m - 1):
        w = ((p - p[u]) ** 2).sum(axis=1)
        better = ~in_tree & ((w < key) | ((w == key) & (
            _pair_key(u, np.arange(m), m) < _pair_key(parent, np.arange(m), m))))
        key[better] = w[better]
        parent[better] = u
        cand_key = np.where(in_tree, np.inf, key)
        best = cand_key.min()
        ties = np.flatnonzero(cand_key == best)
        if ties.size > 1:
            v = ties[np.argmin(_pair_key(parent[ties], ties, m))]
        else:
            v = ties[0]
        edges[k] = sorted((int(parent[v]), int(v)))
        weights[k] = key[v]
        in_tree[v] = True
        u = v
    return MstEdgeList(m=m, edges=edges, weights=weights)


def cross_edge_count(edges, labels):
    """Number of edges whose endpoints carry different labels."""
    labels = np.asarray(labels)
    return int(np.count_nonzero(labels[edges[:, 0]] != labels[edges[:, 1]]))


def _perm_count(b, *, edges, n, seed):
    lab = np.zeros(2 * n, dtype=bool)
    lab[substream(seed, 1, b).permutation(2 * n)[:n]] = True
    return cross_edge_count(edges, lab)


def efr_test(x, estimator="adaptive", n_perm=500, alpha=0.05, seed=0,
             delta=DEFAULT_DELTA, threads=1):
    """Extended Friedman-Rafsky test against a synthetic Gaussian sample.

    A Gaussian is fitted to ``x`` (``estimator="adaptive"`` gives eFR,
    ``"sample"`` gives eFR0), ``Y`` is drawn from the fit and the MST of the
    pooled ``2n`` points is built.  The statistic is the number of X-Y edges,
    calibrated by ``n_perm`` random relabelings on the fixed tree with the
    same two-sided deviation rule as the nearest-neighbor test.
    """
    x = as_sample(x)
    n = x.shape[0]
    if isinstance(n_perm, bool) or int(n_perm) != n_perm or n_perm < 1:
        raise InvalidConfig(f"n_perm must be a positive integer, got {n_perm}")
    n_perm = int(n_perm)
    _check_alpha(alpha)
    if n < 2:
        raise InsufficientSample(f"need at least 2 observations, got {n}")
    model = fit_gaussian_model(x, estimator, delta)
    y = mvn_sample(substream(seed, 0), model.mean, model.sqrt_cov, n)
    tree = euclidean_mst(np.vstack([x, y]))
    labels = np.repeat([False, True], n)
    r_obs = cross_edge_count(tree.edges, labels)
    counts = map_indexed(partial(_perm_count, edges=tree.edges, n=n, seed=seed), n_perm, threads)
    count, _ = exceed_count(r_obs, np.asarray(counts, dtype=float))
    p = count / n_perm
    method = "efr" if estimator == "adaptive" else "efr0"
    return BaselineReport(method, float(r_obs), p, p <= alpha)
