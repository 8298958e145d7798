"""Monotone fixed-point solver for ``XBX + DX + XA + C = 0`` and the
certificates for both directions of the stability equivalence.

Starting from ``X_0 = 0`` the iteration solves the Sylvester equation

    D X_{i+1} + X_{i+1} A = -X_i B X_i - C

which, when ``L = [[A, B], [C, D]]`` is cross-positive on ``K x K`` and
stable, produces a K-monotone sequence bounded by ``X_i v1 <=_K v2 - D^-1 u2``
for the witness vectors of ``L``.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from .blocks import BlockSystem
from .cones import (
    BlockCrossPositivity,
    ConeOrder,
    CrossPositivity,
    ProductCone,
    block_cross_positive,
    cross_positive,
    dual,
    leq_vec,
    matrix_nonneg,
)
from .errors import (
    IllPosedSylvester,
    NonConvergence,
    NumericalConsistencyError,
    PreconditionError,
)
from .monotone import DEFAULT_STALL_WINDOW, SequenceCertificate, SequenceChecker
from .spectral import DEFAULT_MARGIN, StabilityReport, Witness, check_hypotheses, eigenvalues, witness
from .sylvester import SylvesterSolver

CHECK_TOL = 1e-10


@dataclass
class SolveOptions:
    max_iter: int = 10000
    tol: float = 1e-12
    margin: float = DEFAULT_MARGIN
    record_trace: bool = False
    stall_window: int = DEFAULT_STALL_WINDOW
    # interior point of K x K for the witness; None uses stacked generator sums
    w: np.ndarray | None = None


def residual(sys: BlockSystem, X):
    """Frobenius norm of ``XBX + DX + XA + C``."""
    X = np.asarray(X, dtype=float)
    return float(np.linalg.norm(X @ sys.B @ X + sys.D @ X + X @ sys.A + sys.C))


def residual_scale(sys: BlockSystem, X):
    nx = float(np.linalg.norm(X))
    nrm = np.linalg.norm
    return (nrm(sys.A) + nrm(sys.B) * nx + nrm(sys.C) + nrm(sys.D)) * max(1.0, nx)


def sylvester_step(sys: BlockSystem, X, solver=None):
    """One step of the fixed-point recursion from ``X``."""
    solver = solver or SylvesterSolver(sys.A, sys.D)
    return solver.solve(X @ sys.B @ X + sys.C)


@dataclass(frozen=True, eq=False)
class Solution:
    X_star: np.ndarray
    closed_loop_A: np.ndarray
    closed_loop_D: np.ndarray
    residual: float
    iterations: int

    @classmethod
    def from_X(cls, sys, X, iterations=0):
        X = np.asarray(X, dtype=float)
        return cls(X, sys.A + sys.B @ X, sys.D + X @ sys.B, residual(sys, X), iterations)


@dataclass(frozen=True, eq=False)
class NecessityReport:
    L_stable_implied: bool
    block_inverse_nonneg: bool
    inverse_rel_error: float
    assembled: np.ndarray = field(repr=False)

    @property
    def passed(self):
        return self.L_stable_implied and self.block_inverse_nonneg


@dataclass(frozen=True, eq=False)
class Certificate:
    cone: object
    system: BlockSystem
    solution: Solution
    X_nonneg: ConeOrder
    closed_loop_A_cp: CrossPositivity
    closed_loop_D_cp: CrossPositivity
    closed_loop_A_report: StabilityReport
    closed_loop_D_report: StabilityReport
    L_report: StabilityReport
    block: BlockCrossPositivity
    witness: Witness
    bound_s: np.ndarray
    limit_bound: ConeOrder
    trace: SequenceCertificate
    iterates: list | None
    necessity: NecessityReport
    options: SolveOptions
    elapsed: float = 0.0

    @property
    def necessity_check(self):
        return self.necessity.passed

    @property
    def verdicts(self):
        return {
            "X_nonneg": self.X_nonneg.in_cone,
            "closed_loop_A_cross_positive": self.closed_loop_A_cp.ok,
            "closed_loop_D_cross_positive": self.closed_loop_D_cp.ok,
            "closed_loop_A_stable": self.closed_loop_A_report.stable,
            "closed_loop_D_stable": self.closed_loop_D_report.stable,
            "trace_monotone": self.trace.monotone,
            "trace_bounded": self.trace.bounded,
            "limit_bound": self.limit_bound.in_cone,
            "necessity": self.necessity_check,
        }


def solve(cone, sys: BlockSystem, options: SolveOptions | None = None, **kwargs) -> Certificate:
    """Run the fixed-point iteration and certify the limit.

    Raises ``HypothesisFailure`` when L is not cross-positive on K x K,
    ``EquivalenceNegative`` when it is cross-positive but unstable (then no
    stabilizing K-nonnegative solution exists), ``InconclusiveAtMargin`` when
    its spectral abscissa is inside the margin, and ``NonConvergence`` when
    the iteration exhausts ``max_iter`` or stalls.
    """
    opts = options or SolveOptions(**kwargs)
    t0 = time.perf_counter()
    block, L_report = check_hypotheses(cone, sys, opts.margin)
    wit = witness(cone, sys, opts.w, opts.margin)
    A, B, C, D = sys.blocks()
    s = wit.v2 - np.linalg.solve(D, wit.u2)
    try:
        solver = SylvesterSolver(A, D)
    except IllPosedSylvester as exc:
        raise NumericalConsistencyError(
            f"Sylvester step ill-posed although A and D are stable: {exc}") from exc

    checker = SequenceChecker(cone, r=wit.v1, s=s, matrix=True,
                              stall_window=opts.stall_window, keep=opts.record_trace)
    X = np.zeros_like(A)
    checker.push(X)
    res = residual(sys, X)
    it = 0
    while True:
        if it >= opts.max_iter:
            raise NonConvergence(f"no convergence in {opts.max_iter} iterations "
                                 f"(residual {res:.3e})", X, it, checker.cert, res)
        X = solver.solve(X @ B @ X + C)
        it += 1
        checker.push(X)
        res = residual(sys, X)
        if res <= opts.tol * residual_scale(sys, X):
            break
        if checker.cert.stalled:
            raise NonConvergence(f"iteration stalled after {it} steps (residual {res:.3e})",
                                 X, it, checker.cert, res)

    sol = Solution.from_X(sys, X, it)
    cert = Certificate(
        cone=cone,
        system=sys,
        solution=sol,
        X_nonneg=matrix_nonneg(cone, X),
        closed_loop_A_cp=cross_positive(cone, sol.closed_loop_A),
        closed_loop_D_cp=cross_positive(cone, sol.closed_loop_D),
        closed_loop_A_report=eigenvalues(sol.closed_loop_A, opts.margin),
        closed_loop_D_report=eigenvalues(sol.closed_loop_D, opts.margin),
        L_report=L_report,
        block=block,
        witness=wit,
        bound_s=s,
        limit_bound=leq_vec(cone, X @ wit.v1, wit.v2),
        trace=checker.cert,
        iterates=checker.elements,
        necessity=verify_necessity(cone, sys, X, tol=max(CHECK_TOL, opts.tol), margin=opts.margin),
        options=opts,
        elapsed=time.perf_counter() - t0,
    )
    failed = [k for k, ok in cert.verdicts.items() if not ok]
    if failed:
        raise NumericalConsistencyError("certificate checks failed: " + ", ".join(failed))
    return cert


def sufficiency_checks(cone, sys: BlockSystem, X, tol=CHECK_TOL, margin=DEFAULT_MARGIN):
    """Named pass/fail checks that ``X`` is a stabilizing K-nonnegative solution."""
    X = np.asarray(X, dtype=float)
    if X.shape != (sys.n, sys.n) or sys.n != cone.dim:
        return {"dimensions": False}
    sol = Solution.from_X(sys, X)
    return {
        "residual": sol.residual <= tol * residual_scale(sys, X),
        "X_nonneg": matrix_nonneg(cone, X).in_cone,
        "closed_loop_A_cross_positive": cross_positive(cone, sol.closed_loop_A).ok,
        "closed_loop_A_stable": eigenvalues(sol.closed_loop_A, margin).stable,
        "closed_loop_D_cross_positive": cross_positive(cone, sol.closed_loop_D).ok,
        "closed_loop_D_stable": eigenvalues(sol.closed_loop_D, margin).stable,
    }


def verify_sufficiency(cone, cert: Certificate, tol=CHECK_TOL, margin=None):
    """Recheck a certificate's solution from its stored data only."""
    margin = cert.options.margin if margin is None else margin
    tol = max(tol, cert.options.tol)
    checks = sufficiency_checks(cone, cert.system, cert.solution.X_star, tol, margin)
    return all(checks.values())


def assemble_neg_inverse(sys: BlockSystem, X):
    """``-L^-1`` rebuilt from a stabilizing solution ``X``::

        [[I, 0], [X, I]] @ [[P X - Ab^-1, P], [-Db^-1 X, -Db^-1]]

    with ``Ab = A + B X``, ``Db = D + X B`` and ``P = Ab^-1 B Db^-1``.
    """
    n = sys.n
    Ab_inv = np.linalg.inv(sys.A + sys.B @ X)
    Db_inv = np.linalg.inv(sys.D + X @ sys.B)
    P = Ab_inv @ sys.B @ Db_inv
    I, Z = np.eye(n), np.zeros((n, n))
    inner = np.block([[P @ X - Ab_inv, P], [-Db_inv @ X, -Db_inv]])
    return np.block([[I, Z], [X, I]]) @ inner


def verify_necessity(cone, sys: BlockSystem, X, tol=CHECK_TOL, margin=DEFAULT_MARGIN,
                     inverse_rtol=None, strict=True):
    """From a stabilizing K-nonnegative solution, rebuild ``-L^-1`` and check
    it is (K x K)-nonnegative, which forces a cross-positive L to be stable."""
    X = np.asarray(X, dtype=float)
    if inverse_rtol is None:
        # the block identity holds only up to the Riccati residual
        inverse_rtol = max(1e-8, 100 * tol)
    checks = sufficiency_checks(cone, sys, X, tol, margin)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise PreconditionError("X is not a stabilizing K-nonnegative solution: "
                                + ", ".join(failed))
    if not block_cross_positive(cone, sys).verdict:
        raise PreconditionError("L is not cross-positive on K x K")
    try:
        assembled = assemble_neg_inverse(sys, X)
        direct = -np.linalg.inv(sys.L)
    except np.linalg.LinAlgError as exc:
        raise NumericalConsistencyError(f"singular matrix in the block inverse: {exc}") from exc
    rel = float(np.linalg.norm(assembled - direct) / np.linalg.norm(direct))
    if strict and not rel <= inverse_rtol:
        raise NumericalConsistencyError(
            f"assembled block inverse differs from -L^-1 by {rel:.3e} (relative)")
    return NecessityReport(
        L_stable_implied=eigenvalues(sys.L, margin).stable,
        block_inverse_nonneg=matrix_nonneg(ProductCone(cone), assembled).in_cone,
        inverse_rel_error=rel,
        assembled=assembled,
    )


@dataclass(frozen=True, eq=False)
class DualSolve:
    Z_star: np.ndarray
    X_star: np.ndarray
    difference: float
    matches_transpose: bool
    iterates_match: bool | None
    primal: Certificate
    dual: Certificate


def transpose_dual_solve(cone, sys: BlockSystem, options: SolveOptions | None = None,
                         rtol=1e-8, **kwargs):
    """Solve ``Z B^T Z + A^T Z + Z D^T + C^T = 0`` on the dual cone with the
    same recursion and compare ``Z`` with ``X^T``."""
    opts = options or SolveOptions(**kwargs)
    primal = solve(cone, sys, opts)
    dual_opts = SolveOptions(**{**opts.__dict__, "w": None})
    dual_cert = solve(dual(cone), sys.transposed_dual(), dual_opts)
    X, Z = primal.solution.X_star, dual_cert.solution.X_star
    diff = float(np.linalg.norm(Z - X.T))
    iterates_match = None
    if primal.iterates is not None and dual_cert.iterates is not None:
        m = min(len(primal.iterates), len(dual_cert.iterates))
        iterates_match = all(
            np.linalg.norm(Zi - Xi.T) <= rtol * max(1.0, np.linalg.norm(Xi))
            for Xi, Zi in zip(primal.iterates[:m], dual_cert.iterates[:m])
        )
    return DualSolve(Z, X, diff, diff <= rtol * max(1.0, float(np.linalg.norm(X))),
                     iterates_match, primal, dual_cert)
