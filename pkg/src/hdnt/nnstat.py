"""Nearest neighbors in a pooled two-group sample and the YY / XX fractions."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, InsufficientPoints, InvalidConfig
from .linalg import as_sample

VARIANTS = ("YY", "XX")
BLOCK_ROWS = 128
# Gram-trick distances are within this relative error of the exact ones.
_REFINE_RTOL = 1e-9


@dataclass(frozen=True)
class PooledSample:
    """First ``n`` rows come from X, the last ``n`` from Y."""

    points: np.ndarray
    n: int

    @property
    def labels(self):
        return np.repeat(np.array(["X", "Y"]), self.n)


@dataclass(frozen=True)
class NnStat:
    count: int
    n: int
    variant: str

    @property
    def r(self):
        return self.count / self.n

    @property
    def fraction(self):
        return Fraction(self.count, self.n)


def pool(x, y):
    x = as_sample(x)
    y = as_sample(y, d=x.shape[1])
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"groups differ in size: {x.shape[0]} vs {y.shape[0]}")
    return PooledSample(points=np.vstack([x, y]), n=x.shape[0])


def nn_indices_bruteforce(points):
    """Reference scan: exact squared distances, one row at a time."""
    p = as_sample(points)
    m = p.shape[0]
    if m < 2:
        raise InsufficientPoints(f"need at least 2 points, got {m}")
    out = np.empty(m, dtype=np.intp)
    for i in range(m):
        dist = ((p - p[i]) ** 2).sum(axis=1)
        dist[i] = np.inf
        out[i] = np.argmin(dist)
    return out


def nn_indices(points, rows=None, block=BLOCK_ROWS):
    """Index of each point's nearest other point (squared Euclidean distance).

    Ties go to the smallest index.  Distances are screened with the Gram
    identity ``|a|^2 + |b|^2 - 2 a.b`` in row blocks; any near-tie that the
    screen cannot resolve is recomputed exactly, so the result agrees with
    :func:`nn_indices_bruteforce`.

    Parameters
    ----------
    points : array_like, shape (m, d)
    rows : array_like of int, optional
        Only compute neighbors for these query rows.
    block : int
        Query rows per block.
    """
    p = as_sample(points)
    m = p.shape[0]
    if m < 2:
        raise InsufficientPoints(f"need at least 2 points, got {m}")
    rows = np.arange(m) if rows is None else np.asarray(rows, dtype=np.intp)
    sq = np.einsum("ij,ij->i", p, p)
    out = np.empty(rows.size, dtype=np.intp)
    for start in range(0, rows.size, block):
        idx = rows[start:start + block]
        dist = sq[idx, None] + sq[None, :] - 2.0 * (p[idx] @ p.T)
        dist[np.arange(idx.size), idx] = np.inf
        best = dist.min(axis=1)
        tol = _REFINE_RTOL * (sq[idx] + sq.max()) + 1e-300
        near = dist <= (best + tol)[:, None]
        ambiguous = np.count_nonzero(near, axis=1) > 1
        out[start:start + idx.size] = np.argmin(dist, axis=1)
        for k in np.flatnonzero(ambiguous):
            cand = np.flatnonzero(near[k])
            exact = ((p[cand] - p[idx[k]]) ** 2).sum(axis=1)
            # flatnonzero is ascending, so argmin keeps the smallest index on ties
            out[start + k] = cand[np.argmin(exact)]
    return out


def nn_fraction(pooled, variant="YY"):
    """Share of one group's points whose nearest neighbor is in the same group.

    ``variant="YY"`` counts Y points (the last ``n`` rows), ``"XX"`` counts X
    points.
    """
    if variant not in VARIANTS:
        raise InvalidConfig(f"unknown variant {variant!r}; choose from {VARIANTS}")
    n = pooled.n
    if variant == "YY":
        rows = np.arange(n, 2 * n)
        count = np.count_nonzero(nn_indices(pooled.points, rows) >= n)
    else:
        rows = np.arange(n)
        count = np.count_nonzero(nn_indices(pooled.points, rows) < n)
    return NnStat(count=int(count), n=n, variant=variant)
