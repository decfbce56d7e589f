"""Data-generating models and the size/power experiment harness.

Covariance models
    ``model1``  identity;
    ``model2``  ``0.5 ** |i - j|``;
    ``model3``  unit diagonal plus sparse ``Uniform(0, 1) * Bernoulli(0.02)``
                off-diagonals, shifted to ``(S + delta I) / (1 + delta)`` with
                ``delta = |lambda_min(S)| + 0.05``.

Distributions
    ``gaussian_null``     ``N(0, Sigma)``;
    ``multivariate_t``    ``Z / sqrt(W / nu)``, ``Z ~ N(0, Sigma)``,
                          ``W ~ chi2(nu)``, ``nu = d / 2``;
    ``mixture_gaussian``  ``N(0, (1 - a) Sigma)`` or ``N(0, (1 + a) Sigma)``
                          with probability 1/2 each, ``a = 1.8 / sqrt(d)``.
"""

import dataclasses
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from .baselines import efr_test, mardia_tests
from .covariance import DEFAULT_DELTA
from .errors import DimensionMismatch, InvalidConfig
from .linalg import as_symmetric, psd_sqrt, sym_eigen
from .normtest import DEFAULT_ALPHA, DEFAULT_B, nn_normality_test
from .parallel import derive_seed, map_indexed, substream

MODELS = ("model1", "model2", "model3")
FAMILIES = ("gaussian_null", "multivariate_t", "mixture_gaussian")
METHODS = ("nn", "efr", "efr0", "mardia_skew", "mardia_kurt", "bonferroni")
T_READINGS = ("scale", "covariance")
MODEL3_DENSITY = 0.02


@dataclass(frozen=True)
class CovSpec:
    model: str
    d: int
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidConfig(f"unknown model {self.model!r}; choose from {MODELS}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidConfig(f"d must be a positive integer, got {self.d}")


@dataclass(frozen=True)
class AltSpec:
    """Sampling distribution.

    ``t_reading="scale"`` uses ``Sigma`` as the t scale matrix (covariance
    ``Sigma nu / (nu - 2)``); ``"covariance"`` rescales so the covariance is
    ``Sigma``.
    """

    family: str = "gaussian_null"
    t_reading: str = "scale"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfig(f"unknown distribution {self.family!r}; choose from {FAMILIES}")
        if self.t_reading not in T_READINGS:
            raise InvalidConfig(f"unknown t reading {self.t_reading!r}; choose from {T_READINGS}")

    @staticmethod
    def nu(d):
        return d / 2.0

    @staticmethod
    def mixture_a(d):
        return 1.8 / np.sqrt(d)


def make_covariance(spec):
    """Population covariance for ``spec``; ``model3`` is random given ``spec.seed``."""
    d = int(spec.d)
    if spec.model == "model1":
        return np.eye(d)
    if spec.model == "model2":
        idx = np.arange(d)
        return 0.5 ** np.abs(idx[:, None] - idx[None, :])
    s, delta = model3_components(d, spec.seed)
    return as_symmetric((s + delta * np.eye(d)) / (1.0 + delta))


def model3_components(d, seed):
    """Unshifted sparse matrix of ``model3`` and its shift ``delta``."""
    rng = substream(seed, 0)
    iu = np.triu_indices(d, k=1)
    vals = rng.uniform(0.0, 1.0, iu[0].size) * (rng.uniform(0.0, 1.0, iu[0].size) < MODEL3_DENSITY)
    s = np.eye(d)
    s[iu] = vals
    s.T[iu] = vals
    return s, abs(sym_eigen(s)[0][0]) + 0.05


def draw_sample(alt, cov, n, rng, sqrt_cov=None):
    """``n`` observations from ``alt`` with mean zero and matrix ``cov``."""
    cov = as_symmetric(cov)
    d = cov.shape[0]
    if sqrt_cov is None:
        sqrt_cov = psd_sqrt(cov)
    elif np.shape(sqrt_cov) != cov.shape:
        raise DimensionMismatch(f"sqrt_cov has shape {np.shape(sqrt_cov)}, expected {cov.shape}")
    n = int(n)
    if n < 1:
        raise InvalidConfig(f"n must be >= 1, got {n}")
    z = rng.standard_normal((n, d)) @ sqrt_cov
    if alt.family == "gaussian_null":
        return z
    if alt.family == "multivariate_t":
        nu = alt.nu(d)
        w = rng.chisquare(nu, size=n)
        x = z / np.sqrt(w / nu)[:, None]
        if alt.t_reading == "covariance":
            if nu <= 2:
                raise InvalidConfig(f"t covariance undefined for nu={nu} <= 2")
            x *= np.sqrt((nu - 2.0) / nu)
        return x
    a = alt.mixture_a(d)
    if not a < 1:
        raise InvalidConfig(f"mixture needs a = 1.8/sqrt(d) < 1, got d={d}")
    scale = np.where(rng.uniform(size=n) < 0.5, np.sqrt(1.0 - a), np.sqrt(1.0 + a))
    return z * scale[:, None]


@dataclass(frozen=True)
class ExperimentSpec:
    model: str = "model1"
    d: int = 20
    n: int = 100
    alt: str = "gaussian_null"
    method: str = "nn"
    variant: str = "YY"
    estimator: str = "adaptive"
    B: int = DEFAULT_B
    alpha: float = DEFAULT_ALPHA
    replications: int = 1000
    seed: int = 0
    delta: float = DEFAULT_DELTA
    cov_seed: int = None
    redraw_cov: bool = False
    t_reading: str = "scale"
    conservative: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}; choose from {METHODS}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidConfig(f"replications must be a positive integer, got {self.replications}")
        if int(self.n) != self.n or self.n < 2:
            raise InvalidConfig(f"n must be an integer >= 2, got {self.n}")
        if int(self.B) != self.B or self.B < 1:
            raise InvalidConfig(f"B must be a positive integer, got {self.B}")
        if not 0 < self.alpha < 1:
            raise InvalidConfig(f"alpha must lie in (0, 1), got {self.alpha}")
        CovSpec(self.model, self.d)
        AltSpec(self.alt, self.t_reading)

    def cov_spec(self, replicate=None):
        if self.redraw_cov and replicate is not None:
            seed = derive_seed(self.seed, 3, replicate)
        elif self.cov_seed is not None:
            seed = self.cov_seed
        else:
            seed = derive_seed(self.seed, 0)
        return CovSpec(self.model, self.d, seed)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rejection_rate: float
    rejections: int
    replications: int
    wilson_ci_95: tuple
    per_replicate_pvalues: np.ndarray
    total_time: float = 0.0
    extra: dict = field(default_factory=dict)


def wilson_interval(k, n, level=0.95):
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def run_test(spec, x, seed):
    """p-value of ``spec.method`` on one dataset."""
    if spec.method == "nn":
        return nn_normality_test(x, B=spec.B, alpha=spec.alpha, estimator=spec.estimator,
                                 variant=spec.variant, seed=seed, delta=spec.delta,
                                 conservative=spec.conservative).p_value
    if spec.method in ("efr", "efr0"):
        estimator = "adaptive" if spec.method == "efr" else "sample"
        return efr_test(x, estimator=estimator, n_perm=spec.B, alpha=spec.alpha,
                        seed=seed, delta=spec.delta).p_value
    skew, kurt, bonf = mardia_tests(x, spec.alpha)
    return {"mardia_skew": skew, "mardia_kurt": kurt, "bonferroni": bonf}[spec.method].p_value


def _replicate(r, *, spec, cov, sqrt_cov):
    if spec.redraw_cov:
        cov = make_covariance(spec.cov_spec(r))
        sqrt_cov = psd_sqrt(cov)
    x = draw_sample(AltSpec(spec.alt, spec.t_reading), cov, spec.n, substream(spec.seed, 1, r),
                    sqrt_cov=sqrt_cov)
    return run_test(spec, x, derive_seed(spec.seed, 2, r))


def run_experiment(spec, threads=1):
    """Apply ``spec.method`` to ``spec.replications`` independent datasets.

    Replicate ``r`` draws its data from substream ``(1, r)`` of ``spec.seed``
    and runs its test with seed ``derive_seed(spec.seed, 2, r)``, so the
    result is identical for any ``threads``.  ``B`` doubles as the
    permutation count for eFR.
    """
    t0 = time.perf_counter()
    cov = make_covariance(spec.cov_spec())
    sqrt_cov = psd_sqrt(cov)
    task = partial(_replicate, spec=spec, cov=cov, sqrt_cov=sqrt_cov)
    pvals = np.array(map_indexed(task, spec.replications, threads), dtype=float)
    k = int(np.count_nonzero(pvals <= spec.alpha))
    return ExperimentResult(spec=spec, rejection_rate=k / spec.replications, rejections=k,
                            replications=spec.replications,
                            wilson_ci_95=wilson_interval(k, spec.replications),
                            per_replicate_pvalues=pvals, total_time=time.perf_counter() - t0)


# --- config files -----------------------------------------------------------

def _coerce(name, text, ftype):
    text = text.strip()
    try:
        if name == "cov_seed" and text.lower() in ("none", ""):
            return None
        if ftype is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if ftype is int:
            return int(text)
        if ftype is float:
            return float(text)
    except ValueError as exc:
        raise InvalidConfig(f"bad value {text!r} for {name}") from exc
    return text


def parse_config(text):
    """Parse ``key = value`` lines (``#`` starts a comment) into an ExperimentSpec."""
    types = {f.name: f.type for f in dataclasses.fields(ExperimentSpec)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value, types[key])
    return ExperimentSpec(**values)


def format_config(spec):
    lines = []
    for f in dataclasses.fields(spec):
        value = getattr(spec, f.name)
        lines.append(f"{f.name} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
