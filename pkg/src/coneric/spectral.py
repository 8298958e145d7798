"""Eigenvalues, stability margins, the matrix exponential and the
stability tests available for cross-positive matrices."""

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg as sla

from .blocks import BlockSystem
from .cones import ProductCone, block_cross_positive, cross_positive, matrix_nonneg, member
from .errors import (
    DimensionError,
    EigenSolverError,
    EquivalenceNegative,
    HypothesisFailure,
    InconclusiveAtMargin,
    NumericalConsistencyError,
)

DEFAULT_MARGIN = 1e-9
SINGULAR_COND = 1e13


@dataclass(frozen=True, eq=False)
class StabilityReport:
    eigenvalues: np.ndarray
    spectral_abscissa: float
    stable: bool
    margin_tol: float

    @property
    def marginal(self):
        """Abscissa inside the dead-band ``[-margin, margin]``."""
        return abs(self.spectral_abscissa) <= self.margin_tol


def _as_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def sort_spectrum(ev):
    ev = np.asarray(ev, dtype=complex)
    return ev[np.lexsort((ev.imag, ev.real))]


def eigenvalues(M, margin_tol=DEFAULT_MARGIN):
    M = _as_square(M)
    try:
        # LAPACK geev: Hessenberg reduction then real Schur QR iteration
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration did not converge: {exc}") from exc
    ev = sort_spectrum(ev)
    alpha = float(ev.real.max())
    return StabilityReport(ev, alpha, alpha < -margin_tol, margin_tol)


# Pade degrees and the 1-norm bounds below which each reaches unit roundoff
# (Higham 2005).
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
         33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0),
}


def _pade_uv(A, m):
    b = _PADE[m]
    I = np.eye(A.shape[0])
    A2 = A @ A
    if m < 13:
        powers = [I, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = A @ sum(b[2 * k + 1] * P for k, P in enumerate(powers))
        V = sum(b[2 * k] * P for k, P in enumerate(powers))
        return U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I)
    return U, V


def expm(M, t=1.0):
    """``exp(M t)`` by scaling and squaring with a diagonal Pade approximant."""
    M = _as_square(M)
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError("t must be finite and nonnegative")
    A = M * t
    n = A.shape[0]
    if n == 0:
        return A.copy()
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return np.eye(n)
    s = 0
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            break
    else:
        m = 13
        s = max(0, math.ceil(math.log2(norm / _THETA[13])))
        A = A / 2.0**s
    U, V = _pade_uv(A, m)
    R = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise FloatingPointError(f"matrix exponential overflowed (||M t||_1 = {norm:.3e})")
    return R


@dataclass(frozen=True, eq=False)
class CrossPositiveStability:
    """Three equivalent stability tests for a cross-positive matrix.

    ``neg_inverse_nonneg`` is ``None`` when A is numerically singular.
    """

    cross_positive: bool
    stable: bool
    witness_exists: bool
    neg_inverse_nonneg: bool | None
    interior_witness: np.ndarray | None
    report: StabilityReport

    @property
    def consistent(self):
        if not self.cross_positive:
            return True
        verdicts = {self.stable, self.witness_exists}
        if self.neg_inverse_nonneg is not None:
            verdicts.add(self.neg_inverse_nonneg)
        return len(verdicts) == 1


def stable_cross_positive_checks(cone, A, margin_tol=DEFAULT_MARGIN, w=None, strict=True):
    """Evaluate stability, existence of ``x >_K 0`` with ``Ax <_K 0`` and
    K-nonnegativity of ``-A^-1`` independently.

    The candidate ``x = -A^-1 w`` for an interior ``w`` is used for the
    middle test; if any such ``x`` exists for a cross-positive A, this one is
    interior too.
    """
    A = _as_square(A)
    if A.shape[0] != cone.dim:
        raise DimensionError("matrix and cone dimensions differ")
    cp = cross_positive(cone, A).ok
    rep = eigenvalues(A, margin_tol)
    w = cone.interior_point() if w is None else np.asarray(w, dtype=float)
    if not member(cone, w).interior:
        raise ValueError("w must lie in the interior of the cone")

    if np.linalg.cond(A) > SINGULAR_COND:
        witness_ok, neg_inv, x = False, None, None
    else:
        Ainv = np.linalg.inv(A)
        x = -Ainv @ w
        witness_ok = member(cone, x).interior and member(cone, -(A @ x)).interior
        neg_inv = matrix_nonneg(cone, -Ainv).in_cone
    out = CrossPositiveStability(cp, rep.stable, witness_ok, neg_inv,
                                 x if witness_ok else None, rep)
    if strict and not out.consistent:
        raise NumericalConsistencyError(
            f"stability verdicts disagree for a cross-positive matrix: stable={rep.stable}, "
            f"witness={witness_ok}, -A^-1 nonnegative={neg_inv} "
            f"(abscissa {rep.spectral_abscissa:.3e})"
        )
    return out


@dataclass(frozen=True, eq=False)
class Witness:
    """Interior vectors with ``A v1 + B v2 = u1`` and ``C v1 + D v2 = u2``,
    where ``v1, v2 >_K 0`` and ``u1, u2 <_K 0``."""

    v1: np.ndarray
    v2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    source_w: np.ndarray
    A_report: StabilityReport
    D_report: StabilityReport
    residual: float

    @property
    def v(self):
        return np.concatenate([self.v1, self.v2])

    @property
    def u(self):
        return np.concatenate([self.u1, self.u2])


def check_hypotheses(cone, sys, margin_tol=DEFAULT_MARGIN):
    """Raise unless ``L`` is cross-positive on ``K x K`` and stable.

    Returns the block verdict and the stability report of ``L``.
    """
    bcp = block_cross_positive(cone, sys)
    if not bcp.verdict:
        failed = bcp.failed_blocks()
        raise HypothesisFailure(
            ", ".join(failed),
            "L is not cross-positive on K x K: " + ", ".join(failed) + " fails",
            detail=bcp,
        )
    rep = eigenvalues(sys.L, margin_tol)
    if rep.marginal:
        raise InconclusiveAtMargin(rep)
    if not rep.stable:
        raise EquivalenceNegative(rep)
    return bcp, rep


def witness(cone, sys: BlockSystem, w=None, margin_tol=DEFAULT_MARGIN, residual_tol=1e-10):
    """Construct ``v = -L^-1 w`` and ``u = -w`` for an interior ``w`` of ``K x K``."""
    check_hypotheses(cone, sys, margin_tol)
    n = sys.n
    prod = ProductCone(cone)
    if w is None:
        g = cone.interior_point()
        w = np.concatenate([g, g])
    w = np.asarray(w, dtype=float)
    if not member(prod, w).interior:
        raise ValueError("w must lie in the interior of K x K")
    try:
        lu = sla.lu_factor(sys.L, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalConsistencyError(f"L is numerically singular: {exc}") from exc
    v = -sla.lu_solve(lu, w)
    u = -w
    res = float(np.linalg.norm(sys.L @ v - u))
    bound = residual_tol * np.linalg.norm(sys.L) * np.linalg.norm(v)
    if not res <= bound:
        raise NumericalConsistencyError(f"witness residual {res:.3e} exceeds {bound:.3e}")
    v1, v2, u1, u2 = v[:n], v[n:], u[:n], u[n:]
    for name, vec in (("v1", v1), ("v2", v2), ("-u1", -u1), ("-u2", -u2)):
        if not member(cone, vec).interior:
            raise NumericalConsistencyError(f"witness vector {name} is not interior to K")
    return Witness(v1, v2, u1, u2, w, eigenvalues(sys.A, margin_tol),
                   eigenvalues(sys.D, margin_tol), res)
