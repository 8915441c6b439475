"""Command-line interface: ``mixcit <subcommand> ...``.

Exit codes: 0 success, 1 domain or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from importlib.metadata import PackageNotFoundError, version as _dist_version
from .bench import SweepSpec, run_cit_sweep, run_cmi_sweep, write_report
from .cit import CitConfig, run_cit
from .data import Preprocessing, VariablePartition, apply_preprocessing, load_dataset
from .errors import ConfigurationError, MixcitError
from .estimators import EstimatorConfig, EstimatorKind, estimate, kl_entropy
from .models import Family, ModelSpec, generate, write_sample

try:
    __version__ = _dist_version("mixcit")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

TYPES_HELP = "comma-separated column types: c (continuous), dn (discrete numeric), cat (categorical)"
UNITS = "All information quantities are in nats."


def _indices(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of column indices, got {text!r}")
    if any(i < 0 for i in out):
        raise argparse.ArgumentTypeError("column indices must be non-negative")
    return out


def _unit_interval(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"value must lie in (0, 1), got {v}")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"value must be a positive integer, got {v}")
    return v


def _add_estimation_flags(p):
    p.add_argument("--data", required=True, type=Path, help="CSV file with a header row")
    p.add_argument("--types", required=True, help=TYPES_HELP)
    p.add_argument("--x", required=True, type=_indices, help="X column indices, e.g. 0 or 0,3")
    p.add_argument("--y", required=True, type=_indices, help="Y column indices")
    p.add_argument("--z", default=(), type=_indices, help="Z column indices (default: empty)")
    p.add_argument("--estimator", default="msinf", choices=[k.value for k in EstimatorKind],
                   help="estimator (default: msinf)")
    p.add_argument("--kc", type=_unit_interval, default=0.2,
                   help="neighbour fraction k_c in (0, 1) (default: 0.2)")
    p.add_argument("--k", type=_positive, default=None, help="explicit neighbour count, overrides --kc")
    p.add_argument("--heuristic", default="local", choices=["local", "global", "cluster"],
                   help="k rule for msinf (default: local)")
    p.add_argument("--prep", default="none", choices=["none", "std", "scale", "rank"],
                   help="transform of continuous columns (default: none)")
    p.add_argument("--clamp", action="store_true", help="report max(estimate, 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixcit",
        description="Conditional mutual information estimation and conditional independence "
                    f"testing for mixed continuous and categorical data. {UNITS}",
    )
    parser.add_argument("--version", action="version", version=f"mixcit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    g = sub.add_parser("gen", help="generate a synthetic dataset",
                       description=f"Write a synthetic dataset as CSV plus a JSON sidecar holding the "
                                   f"model spec, column types and ground truth. {UNITS}")
    g.add_argument("--model", required=True, choices=[f.value for f in Family])
    g.add_argument("--n", required=True, type=_positive, help="sample size")
    g.add_argument("--c", type=_positive, help="values of X (indepz-est)")
    g.add_argument("--d", type=_positive, help="dimension of Z (indepz-est, chainstruct-est)")
    g.add_argument("--m", type=_positive, help="largest Z value (confgauss-est)")
    g.add_argument("--p", type=_unit_interval, help="discrete-component probability (mixture-est)")
    g.add_argument("--dim-c", type=int, help="continuous Z dimensions (confounder-cit)")
    g.add_argument("--dim-d", type=int, help="discrete Z dimensions (confounder-cit, indepz-cit)")
    g.add_argument("--n-classes", type=int, help="classes per discrete Z component (testing models)")
    g.add_argument("--w", type=float, help="coupling strength, 0 means conditional independence")
    g.add_argument("--z-type", choices=("dn", "cat"),
                   help="type of binomial Z components (default: dn for indepz-cit, cat otherwise)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, type=Path, help="CSV path; the sidecar replaces the suffix with .json")

    e = sub.add_parser("estimate", help="estimate I(X;Y|Z) on a CSV file",
                       description=f"Estimate I(X;Y|Z), I(X;Y) or, for kl, the entropy of the X columns. "
                                   f"Prints JSON with value, zero_rows and runtime_s. {UNITS} "
                                   f"Type codes: {TYPES_HELP}.")
    _add_estimation_flags(e)

    c = sub.add_parser("citest", help="permutation test of X independent of Y given Z",
                       description=f"Local permutation test with a CMI statistic. Prints t_obs, t_perm, "
                                   f"p_value and reject as JSON. {UNITS} Type codes: {TYPES_HELP}.")
    _add_estimation_flags(c)
    c.add_argument("--perms", type=_positive, default=100, help="number of surrogates B (default: 100)")
    c.add_argument("--k-perm", type=_positive, default=5, help="Z neighbourhood size (default: 5)")
    c.add_argument("--alpha", type=_unit_interval, default=0.05, help="significance level (default: 0.05)")
    c.add_argument("--seed", type=int, default=0)

    for name, what in (("sweep-cmi", "estimator bias/variance sweep"), ("sweep-cit", "CIT FPR/TPR sweep")):
        s = sub.add_parser(name, help=what,
                           description=f"Run the {what} described by a JSON sweep spec and write "
                                       f"<name>_<timestamp>.csv and .json. {UNITS} Set MIXCIT_THREADS "
                                       f"to cap worker processes.")
        s.add_argument("--spec", required=True, type=Path, help="sweep spec JSON")
        s.add_argument("--out-dir", type=Path, default=Path("."), help="output directory (default: .)")

    sub.add_parser("selftest", help="run the built-in example checks",
                   description="Run quick checks of the special functions, estimators, permutation "
                               "scheme and confidence intervals; exits 1 on any failure.")
    return parser


def _estimator_config(args) -> EstimatorConfig:
    return EstimatorConfig(kind=args.estimator, k_c=args.kc, heuristic=args.heuristic,
                           explicit_k=args.k, clamp_nonnegative=args.clamp)


def _load(args):
    ds = load_dataset(args.data, args.types)
    part = VariablePartition(args.x, args.y, args.z)
    part.validate(ds)
    return apply_preprocessing(ds, Preprocessing.parse(args.prep)), part


def _emit(obj):
    sys.stdout.write(json.dumps(obj) + "\n")


def _cmd_gen(args):
    names = {"c": "c", "d": "d", "m": "m", "p": "p", "dim_c": "dim_c", "dim_d": "dim_d",
             "n_classes": "n_c", "w": "w"}
    params = {key: getattr(args, attr) for attr, key in names.items() if getattr(args, attr) is not None}
    if args.z_type is not None:
        params["z_discrete_numeric"] = args.z_type == "dn"
    sample = generate(ModelSpec(args.model, args.n, params, args.seed))
    sidecar = write_sample(sample, args.out)
    _emit({"data": str(args.out), "sidecar": str(sidecar), "truth": sample.truth,
           "h0_holds": sample.h0_holds})


def _cmd_estimate(args):
    ds, part = _load(args)
    cfg = _estimator_config(args)
    t0 = time.perf_counter()
    if cfg.kind is EstimatorKind.KL:
        bad = [ds.names[i] for i in part.x if not ds.kinds[i].is_numeric]
        if bad:
            raise ConfigurationError(f"kl needs numeric X columns, got categorical {bad}")
        value = kl_entropy(ds.numeric(part.x), cfg.global_k(ds.n_rows))
        zero_rows = 0
    else:
        res = estimate(ds, part, cfg)
        value, zero_rows = res.value, res.zero_rows
    _emit({"value": value, "zero_rows": zero_rows, "runtime_s": time.perf_counter() - t0})


def _cmd_citest(args):
    ds, part = _load(args)
    cfg = CitConfig(B=args.perms, k_perm=args.k_perm, alpha=args.alpha, seed=args.seed,
                    estimator=_estimator_config(args))
    _emit(run_cit(ds, part, cfg).to_dict())


def _cmd_sweep(args, runner):
    spec = SweepSpec.load(args.spec)
    csv_path, json_path = write_report(runner(spec), args.out_dir)
    _emit({"csv": str(csv_path), "json": str(json_path)})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "gen":
            _cmd_gen(args)
        elif args.command == "estimate":
            _cmd_estimate(args)
        elif args.command == "citest":
            _cmd_citest(args)
        elif args.command == "sweep-cmi":
            _cmd_sweep(args, run_cmi_sweep)
        elif args.command == "sweep-cit":
            _cmd_sweep(args, run_cit_sweep)
        elif args.command == "selftest":
            from .selftest import run_selftest
            return 0 if run_selftest() else 1
    except (MixcitError, OSError) as exc:
        sys.stderr.write(f"mixcit {args.command}: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
