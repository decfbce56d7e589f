"""Command-line interface.

Subcommands
    test      run the nearest-neighbor test on one dataset (CSV or synthetic)
    size      rejection rate under the Gaussian null
    power     rejection rate under a non-Gaussian alternative
    genes     random column-subset protocol on a wide CSV
    baseline  Mardia or eFR tests on one dataset
    replay    rerun the command recorded in a manifest

Exit codes: 0 completed, 2 configuration error, 3 data error, 4 numerical
failure.
"""

import argparse
import json
import sys

from . import __version__
from .baselines import efr_test, mardia_tests
from .covariance import DEFAULT_DELTA, ESTIMATORS
from .errors import ConfigError, HdntError, InvalidConfig
from .genes import gene_subset_protocol
from .io import (FORMATS, ORIENTATIONS, RunManifest, emit_report, load_csv, now_iso,
                 write_output)
from .nnstat import VARIANTS
from .normtest import DEFAULT_ALPHA, DEFAULT_B, nn_normality_test
from .parallel import derive_seed, resolve_threads, substream
from .simlab import (FAMILIES, METHODS, MODELS, T_READINGS, AltSpec, CovSpec, ExperimentSpec,
                     draw_sample, load_config, make_covariance, run_experiment)


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default $HDNT_THREADS or 1)")
    p.add_argument("--manifest", default=None, help="also write the run manifest here")
    p.add_argument("--quiet", action="store_true", help="do not print the manifest to stderr")


def _estimation(p):
    p.add_argument("--estimator", choices=ESTIMATORS, default="adaptive")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA,
                   help="adaptive threshold constant (default 2)")
    p.add_argument("--B", type=int, default=DEFAULT_B, help="bootstrap replicates (default 500)")
    p.add_argument("--variant", choices=VARIANTS, default="YY")
    p.add_argument("--conservative-p", action="store_true",
                   help="report (count + 1) / (B + 1) instead of count / B")


def _data(p, synthetic=True):
    p.add_argument("--csv", default=None, help="input CSV")
    p.add_argument("--header", action="store_true", help="CSV has a header row")
    p.add_argument("--orientation", choices=ORIENTATIONS, default="rows",
                   help="'rows' if rows are observations, 'columns' otherwise")
    if synthetic:
        _model(p)


def _model(p, alt_default="gaussian_null"):
    p.add_argument("--model", choices=MODELS, default="model1")
    p.add_argument("--alt", choices=FAMILIES, default=alt_default)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=20)
    p.add_argument("--t-reading", choices=T_READINGS, default="scale")
    p.add_argument("--cov-seed", type=int, default=None,
                   help="seed of the random model3 covariance")


def build_parser():
    parser = argparse.ArgumentParser(prog="hdnt", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"hdnt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="nearest-neighbor normality test on one dataset")
    _common(p)
    _estimation(p)
    _data(p)
    p.add_argument("--diagnostics", action="store_true",
                   help="report spectral diagnostics of the fitted covariance")

    for name, alt in (("size", None), ("power", "multivariate_t")):
        p = sub.add_parser(name, help=f"empirical {name} experiment")
        _common(p)
        _estimation(p)
        _model(p, alt_default=alt or "gaussian_null")
        p.add_argument("--method", choices=METHODS, default="nn")
        p.add_argument("--reps", type=int, default=1000, help="replications (default 1000)")
        p.add_argument("--redraw-cov", action="store_true",
                       help="redraw the model3 covariance for every replication")
        p.add_argument("--config", default=None,
                       help="key = value experiment file; explicit flags are ignored")

    p = sub.add_parser("genes", help="random column-subset protocol")
    _common(p)
    _estimation(p)
    _data(p, synthetic=False)
    p.add_argument("--subset-size", type=int, default=200)
    p.add_argument("--repeats", type=int, default=100)

    p = sub.add_parser("baseline", help="Mardia or eFR test on one dataset")
    _common(p)
    _data(p)
    p.add_argument("--method", choices=("mardia", "efr", "efr0"), default="mardia")
    p.add_argument("--n-perm", type=int, default=500)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)

    p = sub.add_parser("replay", help="rerun a recorded manifest")
    p.add_argument("manifest_path")
    p.add_argument("--out", default=None, help="override the recorded output path")
    return parser


def _load_data(args):
    if args.csv:
        return load_csv(args.csv, has_header=args.header, orientation=args.orientation).matrix
    if not hasattr(args, "model"):
        raise InvalidConfig("--csv is required")
    cov = make_covariance(CovSpec(args.model, args.d,
                                  args.cov_seed if args.cov_seed is not None
                                  else derive_seed(args.seed, 0)))
    return draw_sample(AltSpec(args.alt, args.t_reading), cov, args.n, substream(args.seed, 1))


def _experiment_spec(args):
    if args.config:
        return load_config(args.config)
    if args.command == "size":
        alt = "gaussian_null"
    else:
        alt = args.alt
        if alt == "gaussian_null":
            raise InvalidConfig("power needs a non-Gaussian --alt")
    return ExperimentSpec(model=args.model, d=args.d, n=args.n, alt=alt, method=args.method,
                          variant=args.variant, estimator=args.estimator, B=args.B,
                          alpha=args.alpha, replications=args.reps, seed=args.seed,
                          delta=args.delta, cov_seed=args.cov_seed, redraw_cov=args.redraw_cov,
                          t_reading=args.t_reading, conservative=args.conservative_p)


def _run(args, threads):
    if args.command == "test":
        x = _load_data(args)
        return nn_normality_test(x, B=args.B, alpha=args.alpha, estimator=args.estimator,
                                 variant=args.variant, seed=args.seed, delta=args.delta,
                                 conservative=args.conservative_p, threads=threads,
                                 diagnostics=args.diagnostics)
    if args.command in ("size", "power"):
        return run_experiment(_experiment_spec(args), threads=threads)
    if args.command == "genes":
        if not args.csv:
            raise InvalidConfig("genes needs --csv")
        data = load_csv(args.csv, has_header=args.header, orientation=args.orientation)
        return gene_subset_protocol(data, subset_size=args.subset_size, repeats=args.repeats,
                                    B=args.B, alpha=args.alpha, seed=args.seed,
                                    estimator=args.estimator, delta=args.delta, threads=threads)
    if args.command == "baseline":
        x = _load_data(args)
        if args.method == "mardia":
            return list(mardia_tests(x, args.alpha))
        estimator = "adaptive" if args.method == "efr" else "sample"
        return efr_test(x, estimator=estimator, n_perm=args.n_perm, alpha=args.alpha,
                        seed=args.seed, delta=args.delta, threads=threads)
    raise InvalidConfig(f"unknown command {args.command!r}")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            with open(args.manifest_path, encoding="utf-8") as fh:
                manifest = RunManifest.from_json(fh.read())
            replay = list(manifest.extra["argv"])
            if args.out is not None:
                replay = _override_out(replay, args.out)
            return main(replay)
        threads = resolve_threads(args.threads)
        manifest = RunManifest(subcommand=args.command, flags=vars(args).copy(), seed=args.seed,
                               started=now_iso(), extra={"argv": argv, "threads": threads})
        result = _run(args, threads)
        write_output(emit_report(result, args.format), args.out)
        manifest.finished = now_iso()
        text = manifest.to_json()
        if args.manifest:
            with open(args.manifest, "w", encoding="utf-8") as fh:
                fh.write(text)
        if not args.quiet:
            sys.stderr.write("# manifest " + json.dumps(json.loads(text)) + "\n")
        return 0
    except HdntError as exc:
        sys.stderr.write(f"hdnt: error: {exc}\n")
        return exc.exit_code
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"hdnt: error: {exc}\n")
        return ConfigError.exit_code


def _override_out(argv, out):
    argv = list(argv)
    if "--out" in argv:
        argv[argv.index("--out") + 1] = out
    else:
        argv += ["--out", out]
    return argv
