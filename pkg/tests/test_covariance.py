import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose, assert_array_equal

from hdnt.covariance import (adaptive_threshold_cov, assumption_diagnostics,
                             fit_gaussian_model, sample_moments)
from hdnt.errors import EmptySample, InsufficientSample, InvalidConfig
from hdnt.linalg import mvn_sample

from oracles import adaptive_threshold_oracle, moments_oracle


def test_moments_two_points():
    mean, cov = sample_moments([[0.0, 0.0], [2.0, 2.0]])
    assert_allclose(mean, [1, 1])
    assert_allclose(cov, [[1, 1], [1, 1]])


def test_moments_single_row():
    mean, cov = sample_moments([[3.0, -1.0, 2.0]])
    assert_allclose(mean, [3, -1, 2])
    assert_array_equal(cov, np.zeros((3, 3)))


def test_moments_empty():
    with pytest.raises(EmptySample):
        sample_moments(np.zeros((0, 4)))


def test_moments_match_oracle(rng):
    x = rng.standard_normal((9, 4))
    mean, cov = sample_moments(x)
    m2, c2 = moments_oracle(x)
    assert_allclose(mean, m2, atol=1e-14)
    assert_allclose(cov, c2, atol=1e-14)


def test_moments_converge():
    x = np.random.default_rng(3).standard_normal((50000, 10))
    _, cov = sample_moments(x)
    assert np.abs(cov - np.eye(10)).max() <= 0.06


def test_moments_translation(rng):
    x = rng.standard_normal((30, 5))
    c = rng.standard_normal(5) * 10
    m1, c1 = sample_moments(x)
    m2, c2 = sample_moments(x + c)
    assert_allclose(m2, m1 + c, atol=1e-12)
    assert_allclose(c2, c1, atol=1e-12)


def test_threshold_zero_delta(rng):
    x = rng.standard_normal((20, 6))
    est = adaptive_threshold_cov(x, 0.0)
    assert_array_equal(est.matrix, sample_moments(x)[1])
    assert est.zeroed_fraction == 0


def test_threshold_sparsifies_null():
    x = np.random.default_rng(4).standard_normal((200, 50))
    est = adaptive_threshold_cov(x, 2.0)
    assert est.zeroed_fraction >= 0.95


def test_threshold_hand_dataset():
    x = np.array([[0.0, 1.0], [1.0, 3.0], [2.0, 2.0], [5.0, 6.0]])
    for delta in (0.0, 0.5, 1.0, 2.0, 3.0):
        got = adaptive_threshold_cov(x, delta).matrix
        assert_allclose(got, adaptive_threshold_oracle(x, delta), atol=1e-14)


def test_threshold_invariants(rng):
    x = rng.standard_normal((25, 8))
    s = sample_moments(x)[1]
    out = adaptive_threshold_cov(x, 1.0).matrix
    assert_array_equal(np.diag(out), np.diag(s))
    off = ~np.eye(8, dtype=bool)
    assert np.all((out[off] == 0) | (out[off] == s[off]))
    assert_array_equal(out, out.T)


def test_threshold_errors():
    with pytest.raises(InsufficientSample):
        adaptive_threshold_cov(np.zeros((1, 3)))
    with pytest.raises(InvalidConfig):
        adaptive_threshold_cov(np.zeros((4, 3)), -1.0)


def test_threshold_d1_no_thresholding(rng):
    x = rng.standard_normal((10, 1))
    assert_array_equal(adaptive_threshold_cov(x, 5.0).matrix, sample_moments(x)[1])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(2, 8)),
              elements=st.floats(-100, 100, allow_nan=False)))
def test_zeroed_fraction_monotone(x):
    fracs = [adaptive_threshold_cov(x, d).zeroed_fraction for d in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(a <= b for a, b in zip(fracs, fracs[1:]))


def test_fit_null_model():
    x = np.random.default_rng(5).standard_normal((100, 20))
    model = fit_gaussian_model(x, "adaptive", 2.0)
    w = np.linalg.eigvalsh(model.cov)
    assert w[0] > 0
    assert np.linalg.norm(model.cov - np.eye(20), 2) <= 0.8
    assert np.linalg.norm(model.sqrt_cov @ model.sqrt_cov - model.cov) <= 1e-8 * max(
        1, np.linalg.norm(model.cov))


def test_fit_rank_deficient_is_repaired():
    rows = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 7.0]])
    x = np.vstack([rows, rows])
    model = fit_gaussian_model(x, "sample")
    assert model.repaired
    assert np.linalg.eigvalsh(model.cov)[0] > 0
    assert model.lam_min > 0


def test_fit_round_trip():
    rng = np.random.default_rng(6)
    g = rng.standard_normal((5, 5))
    sigma = g @ g.T / 5 + 0.5 * np.eye(5)
    x = mvn_sample(rng, np.zeros(5), _sqrt(sigma), 2000)
    model = fit_gaussian_model(x, "sample")
    y = mvn_sample(rng, model.mean, model.sqrt_cov, 100000)
    refit = fit_gaussian_model(y, "sample")
    assert np.linalg.norm(refit.cov - model.cov, 2) <= 0.1


def _sqrt(a):
    w, u = np.linalg.eigh(a)
    return (u * np.sqrt(w)) @ u.T


def test_fit_errors():
    with pytest.raises(EmptySample):
        fit_gaussian_model(np.zeros((0, 2)))
    with pytest.raises(InsufficientSample):
        fit_gaussian_model(np.zeros((1, 2)))
    with pytest.raises(InvalidConfig):
        fit_gaussian_model(np.zeros((4, 2)), "banding")


def test_diagnostics(rng):
    x = rng.standard_normal((40, 10))
    model = fit_gaussian_model(x)
    diag = assumption_diagnostics(x, model)
    assert diag["lambda_min"] > 0
    assert diag["lambda_max"] >= diag["lambda_min"]
    s = sample_moments(x)[1]
    assert_allclose(diag["spectral_distance_to_sample_cov"], np.linalg.norm(model.cov - s, 2),
                    rtol=1e-10)
