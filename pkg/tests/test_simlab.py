import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hdnt.errors import InvalidConfig
from hdnt.simlab import (AltSpec, CovSpec, ExperimentSpec, draw_sample, format_config,
                         make_covariance, model3_components, parse_config, run_experiment, wilson_interval)


def test_model1():
    assert_array_equal(make_covariance(CovSpec("model1", 7)), np.eye(7))


def test_model2():
    want = [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]]
    assert_allclose(make_covariance(CovSpec("model2", 3)), want)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_model3_positive(seed):
    d = 50
    cov = make_covariance(CovSpec("model3", d, seed))
    star, delta = model3_components(d, seed)
    lam_star = np.linalg.eigvalsh(star)[0]
    assert delta == pytest.approx(abs(lam_star) + 0.05, abs=1e-12)
    assert_allclose(cov, (star + delta * np.eye(d)) / (1 + delta), atol=1e-15)
    assert_array_equal(cov, cov.T)
    assert np.linalg.eigvalsh(cov)[0] >= 0.05 / (1 + delta) - 1e-12


def test_model3_sparse_uniform_offdiagonals():
    d = 200
    star, _ = model3_components(d, 5)
    assert_array_equal(np.diag(star), 1.0)
    off = star[np.triu_indices(d, k=1)]
    nz = off[off != 0]
    assert np.all((nz > 0) & (nz < 1))
    # Bernoulli(0.02) over 19900 entries: mean 398, sd ~ 19.7
    assert 300 <= nz.size <= 500


def test_model3_reproducible():
    a = make_covariance(CovSpec("model3", 30, 4))
    b = make_covariance(CovSpec("model3", 30, 4))
    c = make_covariance(CovSpec("model3", 30, 5))
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


def test_covspec_validation():
    with pytest.raises(InvalidConfig):
        CovSpec("model4", 3)
    with pytest.raises(InvalidConfig):
        CovSpec("model1", 0)


def test_alt_parameters():
    assert AltSpec.nu(10) == 5
    assert AltSpec.mixture_a(100) == pytest.approx(0.18)
    assert all(AltSpec.nu(d) > 2 for d in range(5, 400))
    assert all(0 < AltSpec.mixture_a(d) < 1 for d in range(4, 400))


def test_gaussian_null_covariance():
    x = draw_sample(AltSpec(), np.eye(3), 50000, np.random.default_rng(1))
    assert np.abs(np.cov(x.T, bias=True) - np.eye(3)).max() <= 0.06


def test_mixture_covariance():
    sigma = make_covariance(CovSpec("model2", 6))
    x = draw_sample(AltSpec("mixture_gaussian"), sigma, 50000, np.random.default_rng(2))
    assert np.abs(np.cov(x.T, bias=True) - sigma).max() <= 0.08


def test_t_heavy_tails():
    x = draw_sample(AltSpec("multivariate_t"), np.eye(8), 50000, np.random.default_rng(3))
    z = (x - x.mean(axis=0)) / x.std(axis=0)
    assert np.all((z ** 4).mean(axis=0) > 3.5)


def test_t_covariance_reading():
    d = 12
    scale = draw_sample(AltSpec("multivariate_t"), np.eye(d), 100000, np.random.default_rng(4))
    cov = draw_sample(AltSpec("multivariate_t", "covariance"), np.eye(d), 100000,
                      np.random.default_rng(4))
    nu = d / 2
    assert np.diag(np.cov(scale.T)).mean() == pytest.approx(nu / (nu - 2), rel=0.05)
    assert np.diag(np.cov(cov.T)).mean() == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("family", ["gaussian_null", "multivariate_t", "mixture_gaussian"])
@pytest.mark.parametrize("model", ["model1", "model2", "model3"])
def test_draws_have_zero_mean(family, model):
    n, d = 50000, 20
    cov = make_covariance(CovSpec(model, d, 1))
    x = draw_sample(AltSpec(family), cov, n, np.random.default_rng(5))
    assert np.abs(x.mean(axis=0)).max() <= 5 / np.sqrt(n)


def test_mixture_needs_d_at_least_4():
    with pytest.raises(InvalidConfig):
        draw_sample(AltSpec("mixture_gaussian"), np.eye(3), 10, np.random.default_rng(0))


def test_wilson():
    lo, hi = wilson_interval(10, 200)
    assert lo < 0.05 < hi
    assert lo == pytest.approx(0.02744, abs=1e-4)
    assert hi == pytest.approx(0.08949, abs=1e-4)


def test_experiment_shape_and_determinism():
    spec = ExperimentSpec(model="model2", d=10, n=40, B=20, replications=12, seed=3)
    a = run_experiment(spec)
    b = run_experiment(spec)
    c = run_experiment(spec, threads=3)
    assert a.per_replicate_pvalues.size == 12
    assert a.per_replicate_pvalues.tobytes() == b.per_replicate_pvalues.tobytes()
    assert a.per_replicate_pvalues.tobytes() == c.per_replicate_pvalues.tobytes()
    assert a.rejection_rate == np.count_nonzero(a.per_replicate_pvalues <= 0.05) / 12
    assert float(a.rejection_rate * a.replications).is_integer()


@pytest.mark.parametrize("method", ["efr", "efr0", "mardia_skew", "mardia_kurt", "bonferroni"])
def test_experiment_other_methods(method):
    spec = ExperimentSpec(model="model1", d=5, n=40, method=method, B=30, replications=5, seed=1)
    res = run_experiment(spec)
    assert res.per_replicate_pvalues.size == 5
    assert np.all((0 <= res.per_replicate_pvalues) & (res.per_replicate_pvalues <= 1))


def test_redraw_cov_changes_data():
    base = dict(model="model3", d=15, n=30, B=10, replications=4, seed=2)
    fixed = run_experiment(ExperimentSpec(**base))
    redraw = run_experiment(ExperimentSpec(**base, redraw_cov=True))
    assert fixed.per_replicate_pvalues.size == redraw.per_replicate_pvalues.size == 4


def test_experiment_validation():
    with pytest.raises(InvalidConfig):
        ExperimentSpec(replications=0)
    with pytest.raises(InvalidConfig):
        ExperimentSpec(method="royston")
    with pytest.raises(InvalidConfig):
        ExperimentSpec(alt="cauchy")


def test_config_round_trip():
    spec = ExperimentSpec(model="model3", d=300, n=150, alt="multivariate_t", method="efr",
                          variant="XX", B=250, alpha=0.01, replications=77, seed=12,
                          delta=1.5, cov_seed=9, redraw_cov=True)
    assert parse_config(format_config(spec)) == spec


def test_config_grammar():
    text = """
    # a comment
    model = model2   # trailing comment
    d = 30
    redraw_cov = yes
    cov_seed = none
    """
    spec = parse_config(text)
    assert spec.model == "model2" and spec.d == 30 and spec.redraw_cov and spec.cov_seed is None
    with pytest.raises(InvalidConfig):
        parse_config("model model2")
    with pytest.raises(InvalidConfig):
        parse_config("colour = red")
    with pytest.raises(InvalidConfig):
        parse_config("d = many")
