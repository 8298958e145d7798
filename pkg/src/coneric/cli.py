"""Command-line interface: ``coneric gen | solve | check``.

Exit codes of ``solve``: 0 certificate, 1 I/O or schema error,
2 equivalence-negative (L cross-positive but unstable), 3 hypothesis failure,
4 non-convergence, 5 inconclusive at the stability margin, 6 numerical
consistency failure. ``check`` exits 0 when every recomputed check passes
and 1 otherwise.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from .blocks import BlockSystem
from .cones import ConeSpec, block_cross_positive
from .errors import (
    ConericError,
    EquivalenceNegative,
    HypothesisFailure,
    InconclusiveAtMargin,
    NonConvergence,
    NumericalConsistencyError,
)
from .instances import InstanceRecipe, Kind, generate
from .riccati import CHECK_TOL, SolveOptions, solve, sufficiency_checks, verify_necessity
from .spectral import DEFAULT_MARGIN, eigenvalues

SCHEMA_VERSION = "1.0"
TOL_ENV = "CONERIC_TOL"

EXIT = {
    "certificate": 0,
    "io-error": 1,
    "equivalence-negative": 2,
    "hypothesis-failure": 3,
    "non-converged": 4,
    "inconclusive-at-margin": 5,
    "numerical-inconsistency": 6,
}


class SchemaError(ValueError):
    pass


def _reject_constant(name):
    raise SchemaError(f"non-finite number {name} is not allowed")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh, parse_constant=_reject_constant)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return _finite(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump(obj, path=None):
    text = json.dumps(_jsonable(obj), indent=1, allow_nan=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _spectrum(ev):
    return [[float(z.real), float(z.imag)] for z in np.asarray(ev)]


def _check_version(obj, what):
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{what} has schema_version {version!r}; this version of coneric "
                          f"reads {SCHEMA_VERSION!r}")


def problem_to_json(cone, sys_, recipe=None):
    out = {
        "schema_version": SCHEMA_VERSION,
        "n": sys_.n,
        "cone": cone.to_json(),
        "A": sys_.A, "B": sys_.B, "C": sys_.C, "D": sys_.D,
    }
    if recipe is not None:
        out["recipe"] = recipe.to_json()
    return _jsonable(out)


def parse_problem(obj, tol=None):
    """Validate a problem JSON object; return ``(cone, system)``."""
    if not isinstance(obj, dict):
        raise SchemaError("problem file must hold a JSON object")
    _check_version(obj, "problem file")
    try:
        n = int(obj["n"])
        blocks = {}
        for k in "ABCD":
            M = np.array(obj[k], dtype=float)
            if M.shape != (n, n):
                raise SchemaError(f"block {k} has shape {M.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(M)):
                raise SchemaError(f"block {k} has non-finite entries")
            blocks[k] = M
        cone = ConeSpec.from_json(obj["cone"], **({} if tol is None else {"tol": tol}))
    except KeyError as exc:
        raise SchemaError(f"problem file is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from None
    if cone.dim != n:
        raise SchemaError(f"cone dimension {cone.dim} does not match n = {n}")
    return cone, BlockSystem(blocks["A"], blocks["B"], blocks["C"], blocks["D"])


def problem_digest(cone, sys_):
    payload = {"cone": cone.to_json(), **{k: getattr(sys_, k).tolist() for k in "ABCD"}}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _base_report(verdict, cone, sys_, opts, message):
    return {
        "schema_version": SCHEMA_VERSION,
        "verdict": verdict,
        "exit_code": EXIT[verdict],
        "message": message,
        "problem_sha256": problem_digest(cone, sys_),
        "options": {"tol": opts.tol, "max_iter": opts.max_iter, "margin": opts.margin},
        "solution": None,
        "eigenvalues": {"L": _spectrum(eigenvalues(sys_.L).eigenvalues)},
    }


def certificate_report(cert, include_iterates=False):
    sol, wit = cert.solution, cert.witness
    report = _base_report("certificate", cert.cone, cert.system, cert.options,
                          f"stabilizing K-nonnegative solution after {sol.iterations} iterations")
    trace = cert.trace.summary()
    if include_iterates and cert.iterates is not None:
        trace["iterates"] = [X.tolist() for X in cert.iterates]
    report.update({
        "solution": {"X": sol.X_star, "residual": sol.residual, "iterations": sol.iterations},
        "residual": sol.residual,
        "iterations": sol.iterations,
        "eigenvalues": {
            "L": _spectrum(cert.L_report.eigenvalues),
            "closed_loop_A": _spectrum(cert.closed_loop_A_report.eigenvalues),
            "closed_loop_D": _spectrum(cert.closed_loop_D_report.eigenvalues),
        },
        "spectral_abscissa": {
            "L": cert.L_report.spectral_abscissa,
            "closed_loop_A": cert.closed_loop_A_report.spectral_abscissa,
            "closed_loop_D": cert.closed_loop_D_report.spectral_abscissa,
        },
        "witness": {"v1": wit.v1, "v2": wit.v2, "u1": wit.u1, "u2": wit.u2,
                    "w": wit.source_w, "residual": wit.residual},
        "bound_s": cert.bound_s,
        "verdicts": cert.verdicts,
        "necessity": {
            "L_stable_implied": cert.necessity.L_stable_implied,
            "block_inverse_nonneg": cert.necessity.block_inverse_nonneg,
            "inverse_rel_error": cert.necessity.inverse_rel_error,
        },
        "trace": trace,
    })
    return report


def run_solve(cone, sys_, opts, include_iterates=False):
    """Solve and map every outcome onto a report dict."""
    try:
        cert = solve(cone, sys_, opts)
    except HypothesisFailure as exc:
        rep = _base_report("hypothesis-failure", cone, sys_, opts, str(exc))
        rep["hypothesis"] = {"violated": exc.hypothesis.split(", "),
                             "condition": "cross-positivity of L on K x K"}
        return rep
    except EquivalenceNegative as exc:
        rep = _base_report("equivalence-negative", cone, sys_, opts, str(exc))
        ev = exc.report.eigenvalues
        rep["spectral_abscissa"] = {"L": exc.report.spectral_abscissa}
        rep["unstable_eigenvalues"] = _spectrum(ev[ev.real >= -opts.margin])
        return rep
    except InconclusiveAtMargin as exc:
        rep = _base_report("inconclusive-at-margin", cone, sys_, opts, str(exc))
        rep["spectral_abscissa"] = {"L": exc.report.spectral_abscissa}
        return rep
    except NonConvergence as exc:
        rep = _base_report("non-converged", cone, sys_, opts, str(exc))
        rep["iterations"] = exc.iterations
        rep["residual"] = exc.residual
        if exc.trace is not None:
            rep["trace"] = exc.trace.summary()
        return rep
    except NumericalConsistencyError as exc:
        return _base_report("numerical-inconsistency", cone, sys_, opts, str(exc))
    return certificate_report(cert, include_iterates)


def _default_tol():
    value = os.environ.get(TOL_ENV)
    return float(value) if value else SolveOptions.tol


def cmd_solve(args):
    t0 = time.perf_counter()
    try:
        cone, sys_ = parse_problem(_load_json(args.input))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["io-error"]
    opts = SolveOptions(max_iter=args.max_iter, tol=args.tol, margin=args.margin,
                        record_trace=args.trace)
    t1 = time.perf_counter()
    report = run_solve(cone, sys_, opts, include_iterates=args.trace)
    t2 = time.perf_counter()
    report["timings"] = {"load_seconds": t1 - t0, "solve_seconds": t2 - t1}
    try:
        _dump(report, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT["io-error"]
    stream = sys.stdout if args.out not in (None, "-") else sys.stderr
    print(f"{report['verdict']}: {report['message']}", file=stream)
    if report.get("unstable_eigenvalues"):
        eig = ", ".join(f"{re:.6g}{im:+.6g}j" for re, im in report["unstable_eigenvalues"])
        print(f"unstable eigenvalues of L: {eig}", file=stream)
    return report["exit_code"]


def check_report(report, cone, sys_):
    """Recompute the claims of a report against a problem; return named checks."""
    if not isinstance(report, dict):
        raise SchemaError("report file must hold a JSON object")
    _check_version(report, "report file")
    checks = {"problem_digest": report.get("problem_sha256") == problem_digest(cone, sys_)}
    verdict = report.get("verdict")
    opts = report.get("options") or {}
    margin = float(opts.get("margin", DEFAULT_MARGIN))
    tol = max(CHECK_TOL, float(opts.get("tol", CHECK_TOL)))
    if verdict == "certificate":
        sol = report.get("solution") or {}
        try:
            X = np.array(sol["X"], dtype=float)
        except (KeyError, TypeError, ValueError):
            return {**checks, "solution_present": False}
        suff = sufficiency_checks(cone, sys_, X, tol, margin)
        checks.update({f"sufficiency.{k}": v for k, v in suff.items()})
        if all(suff.values()):
            try:
                nec = verify_necessity(cone, sys_, X, tol=tol, margin=margin)
                checks["necessity.block_inverse_nonneg"] = nec.block_inverse_nonneg
                checks["necessity.L_stable"] = nec.L_stable_implied
            except ConericError:
                checks["necessity"] = False
        else:
            checks["necessity"] = False
    elif verdict == "equivalence-negative":
        rep = eigenvalues(sys_.L, margin)
        checks["L_cross_positive"] = block_cross_positive(cone, sys_).verdict
        checks["L_unstable"] = rep.spectral_abscissa > margin
    elif verdict == "hypothesis-failure":
        checks["L_not_cross_positive"] = not block_cross_positive(cone, sys_).verdict
    elif verdict == "inconclusive-at-margin":
        checks["L_marginal"] = eigenvalues(sys_.L, margin).marginal
    else:
        checks["verdict_certifiable"] = False
    return checks


def cmd_check(args):
    try:
        report = _load_json(args.report)
        cone, sys_ = parse_problem(_load_json(args.problem))
        checks = check_report(report, cone, sys_)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    passed = all(checks.values())
    print("check passed" if passed else "check FAILED")
    return 0 if passed else 1


def cmd_gen(args):
    try:
        recipe = InstanceRecipe(args.seed, args.n, Kind(args.kind), args.shift, args.cond_cap)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cone, sys_ = generate(recipe)
    try:
        _dump(problem_to_json(cone, sys_, recipe), args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coneric",
        description="Stabilizing cone-preserving solutions of XBX + DX + XA + C = 0.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file and write a report")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=_default_tol(),
                   help=f"relative residual tolerance (env {TOL_ENV})")
    p.add_argument("--max-iter", type=int, default=SolveOptions.max_iter)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN,
                   help="L counts as stable when its spectral abscissa is below -margin")
    p.add_argument("--trace", action="store_true", help="store every iterate in the report")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="re-verify a report against its problem file")
    p.add_argument("report")
    p.add_argument("problem")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a seeded problem file")
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.ORTHANT_MMATRIX.value)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shift", type=float, default=1.0)
    p.add_argument("--cond-cap", type=float, default=50.0)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
