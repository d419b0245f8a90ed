"""Command-line interface.

Subcommands: ``integrals`` (Green integrals at one z), ``classify`` and
``summarize`` (region/spectrum at one coupling pair), ``scan`` (CSV region
map over a coupling rectangle), ``eigenfunction`` (CSV samples of a bound
or threshold state) and ``verify`` (self-check suites).

Every command is deterministic: identical flags produce byte-identical
output.  Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numeric failure, 4 empty result.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .classify import (
    ConsistencyError,
    RootScanError,
    cell_label,
    eigenstates,
    negative_eigenvalues,
    snap_params,
    summarize,
)
from .green import (
    DEFAULT_CONFIG,
    DivergentIntegralError,
    QuadratureConfig,
    green_threshold,
    green_values,
)
from .lattice import DEFAULT_THETA, compare
from .quadrature import QuadratureError
from .reduction import ModelParams, build_bs_matrix, delta_c, delta_r
from .states import residual

SCHEMA_VERSION = "1"

USAGE_ERROR, VERIFY_FAILED, NUMERIC_ERROR, EMPTY_RESULT = 2, 1, 3, 4


def _emit_json(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"range must be lo:hi:count, got {text!r}") from exc
    if count < 2 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise argparse.ArgumentTypeError(f"malformed range {text!r}")
    return np.linspace(lo, hi, count)


def _parse_nrange(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _config(args) -> QuadratureConfig:
    kwargs = {}
    if getattr(args, "method", None):
        kwargs["method"] = args.method
    if getattr(args, "tol", None):
        kwargs["rtol"] = args.tol
        kwargs["rtol_near_threshold"] = max(args.tol, 1e-8)
    if getattr(args, "grid_points", None):
        kwargs["grid_points"] = args.grid_points
    return QuadratureConfig(**kwargs) if kwargs else DEFAULT_CONFIG


def _params(args) -> ModelParams:
    return ModelParams(n=args.n, lam=args.lam, mu=args.mu)


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------

def cmd_integrals(args) -> int:
    cfg = _config(args)
    if args.z > 0.0:
        raise ValueError(f"--z must be <= 0, got {args.z}")
    g = green_values(args.n, args.z, cfg) if args.z < 0.0 else \
        green_threshold(args.n, cfg)
    flags = {}
    values = {}
    for name in ("a", "b", "c", "d", "s"):
        v = getattr(g, name)
        if name == "d" and args.n == 1:
            flags[name] = "undefined"
        else:
            flags[name] = "finite" if v is not None else "divergent"
        values[name] = v
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": args.n,
        "z": args.z,
        **values,
        "cd": g.cd,
        "alpha": g.alpha if (g.c is not None and (args.n == 1 or g.d is not None)) else None,
        "gamma": g.gamma if g.a is not None and g.c is not None else None,
        "flags": flags,
        "method": cfg.method,
    }
    _emit_json(doc)
    return 0


# ---------------------------------------------------------------------------
# classify / summarize
# ---------------------------------------------------------------------------

def _region_doc(params: ModelParams, tol: float, cfg: QuadratureConfig) -> dict:
    snapped, even, odd = snap_params(params, tol, cfg)
    name, expected = cell_label(params.n, even, odd)
    return {
        "even": {"curve": even.curve, "strip": even.strip,
                 "point": even.point, "near_boundary": even.near_boundary},
        "odd": odd.label,
        "cell": name,
        "table_count": expected,
        "snapped": {"lambda": snapped.lam, "mu": snapped.mu},
    }


def cmd_classify(args) -> int:
    cfg = _config(args)
    params = _params(args)
    doc = {"schema_version": SCHEMA_VERSION, "n": args.n,
           "lambda": args.lam, "mu": args.mu,
           **_region_doc(params, args.region_tol, cfg)}
    _emit_json(doc)
    return 0


def cmd_summarize(args) -> int:
    cfg = _config(args)
    params = _params(args)
    summary = summarize(params, tol=args.region_tol, cfg=cfg)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": args.n,
        "lambda": args.lam,
        "mu": args.mu,
        "cell": summary.cell,
        "region": {
            "even": {"curve": summary.even.curve, "strip": summary.even.strip,
                     "point": summary.even.point,
                     "near_boundary": summary.even.near_boundary},
            "odd": summary.odd.label,
        },
        "eigenvalues": [
            {"z": r.z, "multiplicity": r.multiplicity,
             "sector": r.sector, "origin": r.origin}
            for r in summary.eigenvalues
        ],
        "negative_count": summary.negative_count,
        "threshold": {
            "kind": summary.threshold.kind,
            "entries": [
                {"kind": e.kind, "sector": e.sector,
                 "multiplicity": e.multiplicity, "formula": e.formula}
                for e in summary.threshold.entries
            ],
        },
        "essential_spectrum": list(summary.essential_spectrum),
    }
    _emit_json(doc)
    return 0


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def cmd_scan(args) -> int:
    cfg = _config(args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["lambda", "mu", "region_label", "eigencount"])
    for lam in args.lambda_range:
        for mu in args.mu_range:
            params = ModelParams(args.n, float(lam), float(mu))
            _, even, odd = snap_params(params, args.region_tol, cfg)
            name, count = cell_label(args.n, even, odd)
            writer.writerow([repr(float(lam)), repr(float(mu)), name, count])
    return 0


# ---------------------------------------------------------------------------
# eigenfunction
# ---------------------------------------------------------------------------

def _select_state(params: ModelParams, selector: str, tol: float,
                  cfg: QuadratureConfig):
    records = negative_eigenvalues(params, tol=tol, cfg=cfg)
    if selector == "ground" or selector.startswith("neg:"):
        index = 0 if selector == "ground" else int(selector.split(":")[1])
        if index >= len(records):
            return None
        return eigenstates(params, records[index], cfg)[0]
    if selector.startswith("threshold:"):
        from .classify import threshold_report
        report = threshold_report(params, tol=tol, cfg=cfg)
        index = int(selector.split(":")[1])
        if index >= len(report.entries):
            return None
        return report.entries[index].states[0]
    raise ValueError(f"unknown selector {selector!r}; use ground, neg:K or "
                     "threshold:K")


def cmd_eigenfunction(args) -> int:
    cfg = _config(args)
    params = _params(args)
    state = _select_state(params, args.selector, args.region_tol, cfg)
    if state is None:
        print("no state matches the selector at these couplings",
              file=sys.stderr)
        return EMPTY_RESULT
    res = residual(params, state, cfg)
    out = sys.stdout
    out.write(f"# n={params.n} lambda={params.lam!r} mu={params.mu!r}\n")
    out.write(f"# sector={state.sector} z={state.z!r} formula={state.formula}\n")
    out.write("# w=" + ",".join(repr(float(x)) for x in state.w) + "\n")
    out.write(f"# residual={res!r}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"p{j + 1}" for j in range(params.n)] + ["f"])
    # half-offset grid: no node hits p = 0, where threshold states have
    # their (integrable) singularity
    step = 2.0 * math.pi / args.grid
    axis = -math.pi + step * (np.arange(args.grid) + 0.5)
    mesh = np.stack(np.meshgrid(*([axis] * params.n), indexing="ij"), axis=-1)
    pts = mesh.reshape(-1, params.n)
    vals = state.evaluate(pts)
    for p, f in zip(pts, vals):
        writer.writerow([repr(float(x)) for x in p] + [repr(float(f))])
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_identities(args, cfg) -> dict:
    checks = []
    zs = np.geomspace(1e-4, 50.0, args.samples)
    for n in args.nrange:
        worst = {"alg1": 0.0, "alg2": 0.0, "alg3": 0.0, "as_b": 0.0, "app_a": 0.0}
        for zz in zs:
            z = -float(zz)
            g = green_values(n, z, cfg)
            worst["alg1"] = max(worst["alg1"],
                                abs(g.a - g.b - (1.0 + z * g.a) / n))
            worst["alg2"] = max(worst["alg2"], abs(g.alpha - (n - z) * g.b))
            worst["alg3"] = max(worst["alg3"], abs(g.gamma - g.b))
            if n == 1:
                worst["as_b"] = max(worst["as_b"], abs(g.a * g.s - g.b))
                worst["app_a"] = max(worst["app_a"],
                                     abs(g.s - (1.0 + z * (g.a + g.b))))
            else:
                # strict inequality a*s < b: the error is any violation
                worst["as_b"] = max(worst["as_b"], max(0.0, g.a * g.s - g.b))
        for key, err in worst.items():
            if key == "app_a" and n > 1:
                continue
            checks.append({"name": f"{key}[n={n}]", "max_error": err,
                           "passed": err <= 1e-9})
    return {"suite": "identities", "checks": checks}


def _verify_factorization(args, cfg) -> dict:
    rng = np.random.default_rng(args.seed)
    checks = []
    for n in args.nrange:
        worst = 0.0
        for _ in range(args.samples):
            lam, mu = rng.uniform(-5.0, 5.0, size=2)
            z = -float(np.exp(rng.uniform(np.log(1e-3), np.log(10.0))))
            params = ModelParams(n, float(lam), float(mu))
            g = green_values(n, z, cfg)
            direct = float(np.linalg.det(
                build_bs_matrix(params, z, "even", g).entries - np.eye(n + 1)))
            product = delta_r(params, z, g) * delta_c(params, z, g)
            rel = abs(direct - product) / max(abs(direct), abs(product), 1e-12)
            worst = max(worst, rel)
        checks.append({"name": f"factorization[n={n}]", "max_error": worst,
                       "passed": worst <= 1e-8})
    return {"suite": "factorization", "checks": checks}


def _verify_oracle(args, cfg) -> dict:
    params = ModelParams(args.n, args.lam, args.mu)
    report = compare(params, args.L, theta=args.theta, cfg=cfg)
    checks = [{
        "name": f"count[L={L}]",
        "oracle_count": count,
        "predicted_count": report.predicted_count,
        "passed": count == report.predicted_count,
        "matched_errors": list(report.matched_errors[L]),
    } for L, count in report.oracle_counts.items()]
    return {"suite": "oracle", "theta": args.theta, "checks": checks}


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.suite == "identities":
        doc = _verify_identities(args, cfg)
    elif args.suite == "factorization":
        doc = _verify_factorization(args, cfg)
    else:
        doc = _verify_oracle(args, cfg)
    doc["schema_version"] = SCHEMA_VERSION
    doc["passed"] = all(c["passed"] for c in doc["checks"])
    _emit_json(doc)
    return 0 if doc["passed"] else VERIFY_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p, couplings: bool = True) -> None:
    p.add_argument("--n", type=int, required=True, help="lattice dimension")
    if couplings:
        p.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="neighbor coupling")
        p.add_argument("--mu", type=float, required=True,
                       help="origin coupling")
    p.add_argument("--tol", type=float, default=None,
                   help="quadrature relative tolerance")
    p.add_argument("--region-tol", type=float, default=1e-9,
                   help="snap distance onto region curves")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belowband",
        description="Below-band spectrum of lattice Schrodinger operators "
                    "with point impurities")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrals", help="Green integrals at one z")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--method", choices=("tensor-trapezoid", "laplace-bessel",
                                        "both"), default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)
    p.set_defaults(func=cmd_integrals)

    p = sub.add_parser("classify", help="region labels at one coupling pair")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("summarize", help="full spectral summary")
    _add_common(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("scan", help="CSV region map over a coupling box")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda-range", dest="lambda_range", type=_parse_range,
                   required=True, metavar="LO:HI:COUNT")
    p.add_argument("--mu-range", dest="mu_range", type=_parse_range,
                   required=True, metavar="LO:HI:COUNT")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--region-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("eigenfunction", help="CSV samples of one state")
    _add_common(p)
    p.add_argument("--selector", default="ground",
                   help="ground | neg:K | threshold:K")
    p.add_argument("--grid", type=int, default=33,
                   help="grid points per dimension")
    p.set_defaults(func=cmd_eigenfunction)

    p = sub.add_parser("verify", help="self-check suites")
    p.add_argument("suite", choices=("identities", "factorization", "oracle"))
    p.add_argument("--n", dest="nrange", type=_parse_nrange, default=[1, 2, 3, 4],
                   help="dimension or inclusive range a..b")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--L", type=_parse_int_list, default=[50, 100],
                   help="comma-separated box radii")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and isinstance(args.nrange, list) and \
            args.suite == "oracle":
        args.n = args.nrange[0]
    try:
        return args.func(args)
    except (ValueError, DivergentIntegralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (QuadratureError, RootScanError, ConsistencyError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
