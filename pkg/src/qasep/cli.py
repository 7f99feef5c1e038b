"""Command-line front end.

Exit status: 0 when every requested residual is under tolerance, 1 when
one is not (or a computation fails to converge), 2 for usage and domain
errors.  Structured output is JSON with ``schema_version`` and an echo of
the parsed inputs; tabular output is CSV.  Every float is written with 17
significant digits so that reruns with the same flags are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bethe, matansatz, markov_oracle
from .config import BetheConfig, BoundaryRates, SystemSpec
from .errors import ConvergenceError, DomainError
from .qspecial import ab_from_rates
from .transfer import kplus, rmatrix, verify

SCHEMA_VERSION = 1
OUT_ENV = "QASEP_OUT_DIR"
ORACLE_MAX_L = 12

# residual tolerances per check; --tol overrides all of them
TOLERANCES = {
    "commutation": 1e-8,
    "exchange": 1e-8,
    "decomposition": 1e-7,
    "t2_symmetry": 1e-8,
    "tq": 1e-7,
    "fusion": 1e-6,
    "markov": 1e-5,
    "rmatrix": 1e-7,
    "truncation_vanish": 1e-12,
    "truncation_ratio": 1e-8,
    "mu_zero": 0.25,
    "matansatz": 1e-9,
}


# ----------------------------------------------------------------------------
# individual checks; each returns {residual_name: (value, tolerance_key)}


def _check_commutation(spec, a):
    return {"commutation": (verify.verify_commutation(spec, a.x, a.y, a.N), "commutation")}


def _check_exchange(spec, a):
    out = verify.verify_exchange(spec, a.x, a.y, a.N)
    return {f"exchange_{k}": (v, "exchange") for k, v in out.items()}


def _check_decomposition(spec, a):
    ks = (1, 2) if spec.is_open else (1, 2, 3)
    return {f"decomposition_k{k}": (verify.verify_decomposition(k, a.x, spec, a.N), "decomposition")
            for k in ks}


def _check_t2_symmetry(spec, a):
    if not spec.is_open:
        raise DomainError("t2_symmetry concerns the open chain")
    return {"t2_symmetry": (verify.verify_t2_symmetry(a.x, spec), "t2_symmetry")}


def _check_tq_fusion(spec, a):
    out = verify.verify_tq_and_fusion(a.x, spec, a.N)
    return {k: (v, "tq" if k.startswith("tq") else "fusion") for k, v in out.items()}


def _check_markov(spec, a):
    points = [-1.0] + ([-1.0 / spec.q] if spec.q > 0 else [])
    out = {}
    for p in points:
        _, res = verify.markov_from_t2(spec, p)
        out[f"markov_at_{p:.6g}"] = (float(res), "markov")
    return out


def _check_rmatrix(spec, a):
    ab = ab_from_rates(spec.rates, spec.q)
    N = a.N or 24
    out = {f"rmatrix_{k}": (v, "rmatrix")
           for k, v in rmatrix.exchange_residuals(a.x, a.y, a.xp, a.yp, spec.q, N).items()}
    r1, r2 = rmatrix.boundary_action_residuals(a.x, a.y, ab, spec.q, N)
    out["rmatrix_boundary_V"] = (r1, "rmatrix")
    out["rmatrix_boundary_Vt"] = (r2, "rmatrix")
    return out


def _check_truncation(spec, a):
    ab = ab_from_rates(spec.rates, spec.q)
    out = {}
    for p, y in ((1, 0.7), (2, 1.3)):
        vanish, err = kplus.truncation_checks(p, y, ab, spec.q)
        out[f"truncation_p{p}_vanish"] = (vanish, "truncation_vanish")
        out[f"truncation_p{p}_ratio"] = (err, "truncation_ratio")
    return out


def _check_mu_zero(spec, a):
    data = verify.mu_zero_limit_checks(spec)
    # halving mu should halve the deviation
    return {"mu_zero_linearity": (max(abs(r / 2 - 1) for r in data["ratios"]), "mu_zero")}


def _check_matansatz(spec, a):
    if not spec.is_open:
        raise DomainError("the matrix-product state concerns the open chain")
    res = matansatz.verify_stationarity(spec.L, spec.rates, spec.q)
    ang = matansatz.oracle_angle(spec.L, spec.rates, spec.q)
    return {"matansatz_stationarity": (res, "matansatz"), "matansatz_angle": (ang, "matansatz")}


CHECKS = {
    "commutation": (_check_commutation, "both"),
    "exchange": (_check_exchange, "open"),
    "decomposition": (_check_decomposition, "both"),
    "t2_symmetry": (_check_t2_symmetry, "open"),
    "tq_fusion": (_check_tq_fusion, "both"),
    "markov": (_check_markov, "both"),
    "rmatrix": (_check_rmatrix, "open"),
    "truncation": (_check_truncation, "open"),
    "mu_zero": (_check_mu_zero, "both"),
    "matansatz": (_check_matansatz, "open"),
}


# ----------------------------------------------------------------------------
# serialization


_MARK = "@@num@@"


def _encode(obj):
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return _MARK + format(v, ".17g") + _MARK if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_encode(obj.real), _encode(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_encode(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc):
    """JSON text with every finite float at 17 significant digits."""
    text = json.dumps(_encode(doc), indent=2, sort_keys=False)
    return text.replace(f'"{_MARK}', "").replace(f'{_MARK}"', "") + "\n"


def _fmt(v):
    return format(float(v), ".17g")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _out_dir(args, required=False):
    path = args.out or os.environ.get(OUT_ENV)
    if path is None and required:
        path = "."
    if path is None:
        return None
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DomainError(f"output directory {path!r} is not writable: {exc}") from exc
    return p


def _write(directory, name, text):
    try:
        (directory / name).write_text(text)
    except OSError as exc:
        raise DomainError(f"cannot write {directory / name}: {exc}") from exc


# ----------------------------------------------------------------------------
# argument handling


def _parse_rates(args):
    if args.rates is not None:
        try:
            vals = [float(v) for v in args.rates.split(",")]
        except ValueError:
            raise DomainError(f"--rates expects comma-separated numbers, got {args.rates!r}")
        if len(vals) == 2:
            vals += [0.0, 0.0]
        if len(vals) != 4:
            raise DomainError(f"--rates expects 2 or 4 values, got {len(vals)}")
    elif args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise DomainError("both --alpha and --beta are needed")
        vals = [args.alpha, args.beta, args.gamma or 0.0, args.delta or 0.0]
    else:
        return None
    if args.tasep:
        if vals[2] or vals[3]:
            raise DomainError("--tasep forbids nonzero gamma and delta")
    return BoundaryRates(*vals)


def _spec(args, mu):
    rates = _parse_rates(args) if args.geometry == "open" else None
    if args.tasep:
        args.q = 0.0
    q = args.q
    if args.geometry == "open" and rates is None:
        raise DomainError("open geometry needs --rates or --alpha/--beta")
    return SystemSpec(args.L, q, mu, args.geometry, args.sector, rates)


def _echo(args):
    skip = {"func", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _document(args, **body):
    return {"schema_version": SCHEMA_VERSION, "command": args.command, "input": _echo(args),
            **body}


# ----------------------------------------------------------------------------
# commands


def cmd_verify(args):
    spec = _spec(args, args.mu)
    if args.all:
        wanted = [k for k, (_, g) in CHECKS.items() if g in ("both", spec.geometry)]
    else:
        wanted = args.check or []
        if not wanted:
            raise DomainError("choose --all or at least one --check")
    residuals, tolerances, timings = {}, {}, {}
    for name in wanted:
        fn, geometry = CHECKS[name]
        if geometry not in ("both", spec.geometry):
            raise DomainError(f"check {name!r} is not defined for the {spec.geometry} geometry")
        t0 = time.perf_counter()
        for key, (value, tol_key) in fn(spec, args).items():
            residuals[key] = float(value)
            tolerances[key] = args.tol if args.tol is not None else TOLERANCES[tol_key]
        timings[name] = time.perf_counter() - t0
    failed = sorted(k for k, v in residuals.items() if not v < tolerances[k])
    doc = _document(args, residuals=residuals, tolerances=tolerances, failed=failed,
                    passed=not failed)
    if args.timing:
        doc["timing"] = timings
    return doc, (1 if failed else 0)


def cmd_cumulants(args):
    spec = _spec(args, 0.0)
    n = args.orders
    if n < 0:
        raise DomainError(f"--orders must be non-negative, got {n}")
    t0 = time.perf_counter()
    table = {"bethe": [], "oracle": [], "rel_diff": []}
    if n > 0:
        cfg = BetheConfig(grid=args.grid)
        table["bethe"] = [float(np.real(v))
                          for v in bethe.bethe_cumulants(spec, n, cfg).values[1:]]
        if spec.L <= ORACLE_MAX_L and not args.no_oracle:
            table["oracle"] = [float(np.real(v))
                               for v in markov_oracle.cumulants_oracle(spec, n).values[1:]]
            table["rel_diff"] = [abs(b - o) / max(abs(o), 1e-300)
                                 for b, o in zip(table["bethe"], table["oracle"])]
    tol = args.tol if args.tol is not None else 1e-6
    failed = [k + 1 for k, d in enumerate(table["rel_diff"]) if not d < tol]
    doc = _document(args, cumulants=table, tolerance=tol, failed_orders=failed,
                    passed=not failed)
    if args.timing:
        doc["timing"] = {"total": time.perf_counter() - t0}
    return doc, (1 if failed else 0)


def cmd_steady(args):
    spec = _spec(args, 0.0)
    if not spec.is_open:
        raise DomainError("steady computes the open-chain matrix-product state")
    sw = matansatz.steady_weights(spec.L, spec.q, spec.rates, args.x, args.N)
    probs = sw.probabilities
    rows = [(c, _fmt(w), _fmt(p)) for c, (w, p) in enumerate(zip(sw.weights, probs))]
    out = _out_dir(args, required=True)
    _write(out, "steady.csv", _csv_text(["config", "weight", "probability"], rows))
    residual = matansatz.verify_stationarity(spec.L, spec.rates, spec.q, args.N, args.x)
    tol = args.tol if args.tol is not None else TOLERANCES["matansatz"]
    doc = _document(args, Z=sw.Z, stationarity_residual=residual, tolerance=tol,
                    current=matansatz.boundary_current(probs, spec.L, spec.rates),
                    files=["steady.csv"], passed=residual < tol)
    _write(out, "steady.json", dumps(doc))
    return doc, (0 if residual < tol else 1)


def cmd_export(args):
    spec = _spec(args, 0.0)
    n = max(args.orders, 1)
    cfg = BetheConfig(grid=args.grid)
    if spec.is_open:
        W = bethe.solve_W_series(spec.L, ab_from_rates(spec.rates, spec.q), spec.q, n, config=cfg)
    else:
        W = bethe.solve_W_series(spec.L, None, spec.q, n, geometry="periodic",
                                 N=spec.sector_N, config=cfg)
    z = W.z
    header = ["j", "z_re", "z_im"] + [f"W{k}_{part}" for k in range(1, n + 1)
                                      for part in ("re", "im")]
    rows = [[j, _fmt(z[j].real), _fmt(z[j].imag)]
            + [_fmt(getattr(W.W[k, j], part)) for k in range(1, n + 1) for part in ("real", "imag")]
            for j in range(len(z))]
    out = _out_dir(args, required=True)
    _write(out, "export_W.csv", _csv_text(header, rows))
    mu, E = bethe.mu_and_E_of_B(W)
    doc = _document(args, grid=len(z), mu_of_B=mu[1:].real, E_of_B=E[1:].real,
                    files=["export_W.csv"])
    _write(out, "export.json", dumps(doc))
    return doc, 0


def _common(p):
    g = p.add_argument_group("system")
    g.add_argument("--L", type=int, default=2, help="number of sites (default 2)")
    g.add_argument("--q", type=float, default=0.5, help="backward hop rate (default 0.5)")
    g.add_argument("--geometry", choices=("open", "periodic"), default="open")
    g.add_argument("--sector", type=int, default=None, help="particle number on the ring")
    g.add_argument("--rates", default=None, help="alpha,beta[,gamma,delta]")
    for name in ("alpha", "beta", "gamma", "delta"):
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--tasep", action="store_true", help="force q=0 and gamma=delta=0")
    n = p.add_argument_group("numerics")
    n.add_argument("--N", type=int, default=None, help="auxiliary truncation (default: automatic)")
    n.add_argument("--grid", type=int, default=512, help="initial circle grid size (default 512)")
    n.add_argument("--orders", type=int, default=3, help="number of cumulants (default 3)")
    n.add_argument("--tol", type=float, default=None, help="override every residual tolerance")
    n.add_argument("--x", type=float, default=0.2, help="spectral parameter x (default 0.2)")
    n.add_argument("--y", type=float, default=0.3, help="spectral parameter y (default 0.3)")
    n.add_argument("--xp", type=float, default=0.15, help="second x for R checks (default 0.15)")
    n.add_argument("--yp", type=float, default=0.25, help="second y for R checks (default 0.25)")
    o = p.add_argument_group("output")
    o.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV}, then .)")
    o.add_argument("--timing", action="store_true", help="include wall-clock timings")


def build_parser():
    parser = argparse.ArgumentParser(prog="qasep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run algebraic identity checks")
    _common(p)
    p.add_argument("--mu", type=float, default=0.3, help="counting field (default 0.3)")
    p.add_argument("--all", action="store_true", help="every check valid for the geometry")
    p.add_argument("--check", action="append", choices=sorted(CHECKS), help="repeatable")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cumulants", help="current cumulants, functional equation vs diagonalization")
    _common(p)
    p.add_argument("--no-oracle", action="store_true", help="skip the diagonalization column")
    p.set_defaults(func=cmd_cumulants)

    p = sub.add_parser("steady", help="write the stationary state as CSV")
    _common(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("export", help="write W_n(z) grid samples as CSV")
    _common(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc, status = args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"qasep: error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"qasep: not converged: {exc}", file=sys.stderr)
        return 1
    text = dumps(doc)
    if args.command in ("verify", "cumulants"):
        out = _out_dir(args)
        if out is not None:
            _write(out, f"{args.command}.json", text)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
