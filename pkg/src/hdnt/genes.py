"""Random column-subset protocol for very wide data (e.g. gene expression).

A normality test on all columns rejects if any subset of columns is
non-Gaussian, so the test is applied repeatedly to random column subsets.
"""

import numpy as np

from .covariance import DEFAULT_DELTA
from .errors import InvalidConfig
from .io import GeneSubsetResult
from .linalg import as_sample
from .normtest import DEFAULT_ALPHA, DEFAULT_B, nn_normality_test
from .parallel import derive_seed, substream


def gene_subset_protocol(data, subset_size=200, repeats=100, B=DEFAULT_B, alpha=DEFAULT_ALPHA,
                         seed=0, estimator="adaptive", delta=DEFAULT_DELTA, threads=1):
    """Test ``repeats`` random subsets of ``subset_size`` distinct columns.

    ``data`` is a :class:`~hdnt.io.CsvDataset` or an ``n x d`` array.  Each
    repeat ``i`` draws its columns from substream ``(0, i)`` of ``seed``
    without replacement, independently of the other repeats, and tests them
    with seed ``derive_seed(seed, 1, i)``.
    """
    x = as_sample(getattr(data, "matrix", data))
    d = x.shape[1]
    if int(subset_size) != subset_size or not 1 <= subset_size <= d:
        raise InvalidConfig(f"subset_size must be in [1, {d}], got {subset_size}")
    if int(repeats) != repeats or repeats < 1:
        raise InvalidConfig(f"repeats must be a positive integer, got {repeats}")
    subsets, reports = [], []
    for i in range(int(repeats)):
        cols = np.sort(substream(seed, 0, i).choice(d, size=int(subset_size), replace=False))
        subsets.append(cols)
        reports.append(nn_normality_test(x[:, cols], B=B, alpha=alpha, estimator=estimator,
                                         seed=derive_seed(seed, 1, i), delta=delta,
                                         threads=threads))
    frac = sum(r.reject for r in reports) / len(reports)
    return GeneSubsetResult(subset_size=int(subset_size), repeats=int(repeats), alpha=float(alpha),
                            subsets=subsets, reports=reports, rejected_fraction=frac)
