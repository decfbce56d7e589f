"""CSV ingestion, report serialization and run manifests.

JSON key order
--------------
TestReport
    kind, variant, estimator, n, r_obs, r_count, B, alpha, seed, null_mean,
    exceed_count, p_value, conservative, reject, null_draws, diagnostics,
    wall_time
ExperimentResult
    kind, config, replications, rejections, rejection_rate, wilson_ci_95,
    per_replicate_pvalues, total_time
BaselineReport
    kind, method, statistic, p_value, reject
GeneSubsetResult
    kind, subset_size, repeats, alpha, rejected_fraction, subsets, reports
"""

import csv
import datetime as _dt
import io as _io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .baselines import BaselineReport
from .errors import DataIOError, InvalidConfig, ParseError, ShapeError
from .nnstat import NnStat
from .normtest import TestReport
from .simlab import ExperimentResult, ExperimentSpec

ORIENTATIONS = ("rows", "columns")
FORMATS = ("json", "csv", "text")


@dataclass
class CsvDataset:
    path: str
    has_header: bool
    orientation: str
    matrix: np.ndarray
    column_names: list = None

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def d(self):
        return self.matrix.shape[1]


def load_csv(path, has_header=False, orientation="rows"):
    """Read a comma-separated numeric matrix.

    ``orientation="columns"`` means each file column is one observation (the
    usual genes-by-samples layout); the result is transposed so that rows are
    always observations.  With a header, ``column_names`` holds the header
    cells of the file as written.  Errors report 1-based file positions.
    """
    if orientation not in ORIENTATIONS:
        raise InvalidConfig(f"unknown orientation {orientation!r}; choose from {ORIENTATIONS}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    names = None
    rows = [(i, r) for i, r in enumerate(rows, 1) if r and any(c.strip() for c in r)]
    if has_header and rows:
        names = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    width = len(names) if names is not None else (len(rows[0][1]) if rows else 0)
    values = np.empty((len(rows), width))
    for k, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise ShapeError(f"row {lineno} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(lineno, j + 1, cell) from None
            if not math.isfinite(v):
                raise ParseError(lineno, j + 1, cell)
            values[k, j] = v
    if width == 0:
        raise ShapeError(f"{path} contains no data")
    if orientation == "columns":
        values = values.T
    return CsvDataset(path=str(path), has_header=has_header, orientation=orientation,
                      matrix=values, column_names=names)


def write_csv(matrix, path, column_names=None):
    """Write rows of ``matrix`` with round-trip exact float formatting."""
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if column_names is not None:
            w.writerow(column_names)
        for row in matrix:
            w.writerow([repr(float(v)) for v in row])


# --- reports ----------------------------------------------------------------

@dataclass
class GeneSubsetResult:
    subset_size: int
    repeats: int
    alpha: float
    subsets: list
    reports: list
    rejected_fraction: float = 0.0


def _test_report_dict(rep):
    return {
        "kind": "test_report",
        "variant": rep.variant,
        "estimator": rep.estimator,
        "n": rep.r_obs.n,
        "r_obs": rep.r_obs.r,
        "r_count": rep.r_obs.count,
        "B": rep.B,
        "alpha": rep.alpha,
        "seed": rep.seed,
        "null_mean": rep.null_mean,
        "exceed_count": rep.exceed_count,
        "p_value": rep.p_value,
        "conservative": rep.conservative,
        "reject": rep.reject,
        "null_draws": [float(v) for v in rep.null_draws],
        "diagnostics": rep.diagnostics,
        "wall_time": rep.wall_time,
    }


def _experiment_dict(res):
    return {
        "kind": "experiment_result",
        "config": asdict(res.spec),
        "replications": res.replications,
        "rejections": res.rejections,
        "rejection_rate": res.rejection_rate,
        "wilson_ci_95": list(res.wilson_ci_95),
        "per_replicate_pvalues": [float(v) for v in res.per_replicate_pvalues],
        "total_time": res.total_time,
    }


def _baseline_dict(rep):
    return {"kind": "baseline_report", "method": rep.method, "statistic": rep.statistic,
            "p_value": rep.p_value, "reject": bool(rep.reject)}


def to_dict(obj):
    if isinstance(obj, TestReport):
        return _test_report_dict(obj)
    if isinstance(obj, ExperimentResult):
        return _experiment_dict(obj)
    if isinstance(obj, BaselineReport):
        return _baseline_dict(obj)
    if isinstance(obj, GeneSubsetResult):
        return {"kind": "gene_subset_result", "subset_size": obj.subset_size,
                "repeats": obj.repeats, "alpha": obj.alpha,
                "rejected_fraction": obj.rejected_fraction,
                "subsets": [list(map(int, s)) for s in obj.subsets],
                "reports": [_test_report_dict(r) for r in obj.reports]}
    if isinstance(obj, (list, tuple)) and all(isinstance(o, BaselineReport) for o in obj):
        return {"kind": "baseline_reports", "reports": [_baseline_dict(o) for o in obj]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_dict(data):
    """Inverse of :func:`to_dict` for test reports and experiment results."""
    kind = data.get("kind")
    if kind == "test_report":
        return TestReport(
            r_obs=NnStat(count=data["r_count"], n=data["n"], variant=data["variant"]),
            null_draws=np.asarray(data["null_draws"], dtype=float),
            null_mean=data["null_mean"], exceed_count=data["exceed_count"],
            p_value=data["p_value"], alpha=data["alpha"], reject=data["reject"],
            seed=data["seed"], B=data["B"], variant=data["variant"],
            estimator=data["estimator"], conservative=data["conservative"],
            wall_time=data["wall_time"], diagnostics=data["diagnostics"])
    if kind == "experiment_result":
        return ExperimentResult(
            spec=ExperimentSpec(**data["config"]), rejection_rate=data["rejection_rate"],
            rejections=data["rejections"], replications=data["replications"],
            wilson_ci_95=tuple(data["wilson_ci_95"]),
            per_replicate_pvalues=np.asarray(data["per_replicate_pvalues"], dtype=float),
            total_time=data["total_time"])
    if kind == "baseline_report":
        return BaselineReport(data["method"], data["statistic"], data["p_value"], data["reject"])
    raise ValueError(f"unknown report kind {kind!r}")


def _csv_text(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    return repr(float(v))


def _decision(reject):
    return "REJECT" if reject else "RETAIN"


def _text(obj):
    if isinstance(obj, TestReport):
        lines = [
            f"nearest-neighbor normality test ({obj.variant}, {obj.estimator})",
            f"  r_obs       = {obj.r_obs.count}/{obj.r_obs.n} = {obj.r_obs.r:.4f}",
            f"  null mean   = {obj.null_mean:.4f} over B = {obj.B}",
            f"  p-value     = {obj.p_value:.4f}{' (conservative)' if obj.conservative else ''}",
            f"  decision    = {_decision(obj.reject)} at alpha = {obj.alpha:g}",
            f"  seed        = {obj.seed}",
        ]
        for k, v in obj.diagnostics.items():
            lines.append(f"  {k:<11} = {v}")
        return "\n".join(lines) + "\n"
    if isinstance(obj, ExperimentResult):
        s = obj.spec
        lo, hi = obj.wilson_ci_95
        return (f"experiment {s.method}/{s.variant} {s.model} {s.alt} n={s.n} d={s.d} "
                f"B={s.B} alpha={s.alpha:g}\n"
                f"  rejection rate = {obj.rejections}/{obj.replications} = "
                f"{obj.rejection_rate:.4f}  (Wilson 95% CI {lo:.4f}-{hi:.4f})\n"
                f"  seed = {s.seed}\n")
    if isinstance(obj, BaselineReport):
        return (f"{obj.method}: statistic = {obj.statistic:.6g}, p-value = {obj.p_value:.4f}, "
                f"{_decision(obj.reject)}\n")
    if isinstance(obj, GeneSubsetResult):
        head = (f"gene-subset protocol: {obj.repeats} repeats of {obj.subset_size} columns, "
                f"rejected fraction = {obj.rejected_fraction:.4f} at alpha = {obj.alpha:g}\n")
        body = "".join(f"  repeat {i}: p = {r.p_value:.4f} {_decision(r.reject)} (seed {r.seed})\n"
                       for i, r in enumerate(obj.reports))
        return head + body
    if isinstance(obj, (list, tuple)):
        return "".join(_text(o) for o in obj)
    raise TypeError(f"cannot format {type(obj).__name__}")


def _csv(obj):
    if isinstance(obj, TestReport):
        return _csv_text(["b", "r_null"], [[b, _fmt(v)] for b, v in enumerate(obj.null_draws)])
    if isinstance(obj, ExperimentResult):
        a = obj.spec.alpha
        return _csv_text(["replicate", "p_value", "reject"],
                         [[r, _fmt(p), int(p <= a)] for r, p in enumerate(obj.per_replicate_pvalues)])
    if isinstance(obj, BaselineReport):
        obj = [obj]
    if isinstance(obj, (list, tuple)):
        return _csv_text(["method", "statistic", "p_value", "reject"],
                         [[o.method, _fmt(o.statistic), _fmt(o.p_value), int(o.reject)] for o in obj])
    if isinstance(obj, GeneSubsetResult):
        return _csv_text(["repeat", "r_obs", "p_value", "reject", "seed"],
                         [[i, _fmt(r.r_obs.r), _fmt(r.p_value), int(r.reject), r.seed]
                          for i, r in enumerate(obj.reports)])
    raise TypeError(f"cannot format {type(obj).__name__}")


def emit_report(obj, fmt="text"):
    """Serialize a report or result as ``json``, ``csv`` or ``text`` bytes."""
    if fmt == "json":
        return (json.dumps(to_dict(obj), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        return _csv(obj).encode("utf-8")
    if fmt == "text":
        return _text(obj).encode("utf-8")
    raise InvalidConfig(f"unknown format {fmt!r}; choose from {FORMATS}")


# --- manifests --------------------------------------------------------------

@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    seed: int
    version: str = __version__
    started: str = ""
    finished: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def now_iso():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def write_output(data, out=None):
    if out in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    with open(out, "wb") as fh:
        fh.write(data)
