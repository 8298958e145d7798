"""Solvers for the Sylvester equation ``D X + X A + C = 0``."""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np
import scipy.linalg as sla

from .cones import cross_positive, matrix_nonneg
from .errors import DimensionError, IllPosedSylvester, NumericalConsistencyError, PreconditionError
from .spectral import DEFAULT_MARGIN, eigenvalues, expm

SEPARATION_RTOL = 1e-8
KRONECKER_MAX_N = 40


class Method(str, Enum):
    SCHUR = "schur"
    KRONECKER = "kronecker"
    QUADRATURE = "quadrature"


def _operands(A, D, C=None):
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or D.shape != (n, n):
        raise DimensionError(f"A {A.shape} and D {D.shape} must be square of equal size")
    if C is not None:
        C = np.asarray(C, dtype=float)
        if C.shape != (n, n):
            raise DimensionError(f"C has shape {C.shape}, expected {(n, n)}")
    return A, D, C


def _check_separation(ev_A, ev_D, A, D):
    sep = float(np.min(np.abs(ev_D[:, None] + ev_A[None, :])))
    threshold = SEPARATION_RTOL * (np.linalg.norm(A) + np.linalg.norm(D))
    if sep < threshold:
        raise IllPosedSylvester(sep, threshold)
    return sep


class SylvesterSolver:
    """Bartels-Stewart solver with A and D factored once.

    Both coefficients are reduced to complex Schur form, ``D = U T U^H`` and
    ``A = V S V^H``; ``T Y + Y S = -U^H C V`` is then solved one column of
    ``Y`` at a time, each a triangular system.
    """

    def __init__(self, A, D):
        A, D, _ = _operands(A, D)
        self.n = A.shape[0]
        self.T, self.U = sla.schur(D, output="complex")
        self.S, self.V = sla.schur(A, output="complex")
        self.separation = _check_separation(np.diag(self.S), np.diag(self.T), A, D)

    def solve(self, C):
        C = np.asarray(C, dtype=float)
        if C.shape != (self.n, self.n):
            raise DimensionError(f"C has shape {C.shape}, expected {(self.n, self.n)}")
        T, S = self.T, self.S
        F = -(self.U.conj().T @ C @ self.V)
        Y = np.empty_like(F)
        for j in range(self.n):
            rhs = F[:, j] - Y[:, :j] @ S[:j, j]
            M = T.copy()
            M[np.diag_indices_from(M)] += S[j, j]
            Y[:, j] = sla.solve_triangular(M, rhs, check_finite=False)
        return (self.U @ Y @ self.V.conj().T).real


def solve_kronecker(A, D, C):
    """Dense solve of ``(I kron D + A^T kron I) vec(X) = -vec(C)``; O(n^6)."""
    A, D, C = _operands(A, D, C)
    n = A.shape[0]
    if n > KRONECKER_MAX_N:
        raise ValueError(f"Kronecker oracle limited to n <= {KRONECKER_MAX_N}")
    _check_separation(np.linalg.eigvals(A), np.linalg.eigvals(D), A, D)
    I = np.eye(n)
    K = np.kron(I, D) + np.kron(A.T, I)
    x = np.linalg.solve(K, -C.reshape(-1, order="F"))
    return x.reshape((n, n), order="F")


def integral_solution(A, D, C, t_max=None, steps=200, panels=10):
    """Evaluate ``X = int_0^inf exp(D t) C exp(A t) dt`` by Gauss-Legendre
    quadrature on log-spaced panels of ``[0, t_max]``.

    With ``t_max=None`` the horizon is set so that ``exp((a_A + a_D) t_max)``
    is 1e-10 (``a`` the spectral abscissas) and doubled until the integrand
    has decayed below that level relative to the accumulated integral.
    """
    A, D, C = _operands(A, D, C)
    a_A = eigenvalues(A, 0.0).spectral_abscissa
    a_D = eigenvalues(D, 0.0).spectral_abscissa
    if a_A >= 0 or a_D >= 0:
        raise PreconditionError("integral representation needs stable A and D")
    rate = -(a_A + a_D)
    adaptive = t_max is None
    if adaptive:
        t_max = math.log(1e10) / rate
    nodes, weights = np.polynomial.legendre.leggauss(max(1, steps // panels))

    def integrand(t):
        return expm(D, t) @ C @ expm(A, t)

    for _ in range(12):
        edges = np.concatenate([[0.0], t_max * 2.0 ** np.arange(-(panels - 1), 1)])
        X = np.zeros_like(C)
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            for x, wt in zip(nodes, weights):
                X += wt * half * integrand(lo + half * (x + 1.0))
        if not adaptive:
            break
        tail = np.linalg.norm(integrand(t_max)) / rate
        if tail <= 1e-10 * max(np.linalg.norm(X), np.finfo(float).tiny):
            break
        t_max *= 2.0
    return X


@dataclass(frozen=True, eq=False)
class SylvesterProblem:
    A: np.ndarray
    D: np.ndarray
    C: np.ndarray
    method: Method = Method.SCHUR

    def solve(self):
        return solve_sylvester(self.A, self.D, self.C, self.method)


def solve_sylvester(A, D, C, method=Method.SCHUR):
    """Solve ``D X + X A + C = 0``."""
    method = Method(method)
    if method is Method.SCHUR:
        return SylvesterSolver(A, D).solve(C)
    if method is Method.KRONECKER:
        return solve_kronecker(A, D, C)
    return integral_solution(A, D, C)


def sylvester_residual(A, D, C, X):
    return float(np.linalg.norm(D @ X + X @ A + C))


def sylvester_cone_check(cone, A, D, C, margin_tol=DEFAULT_MARGIN):
    """Solve ``D X + X A + C = 0`` for stable cross-positive A, D and
    K-nonnegative C and confirm the solution is K-nonnegative.

    Inputs outside those hypotheses raise ``PreconditionError``; a solution
    that is not K-nonnegative raises ``NumericalConsistencyError``.
    """
    A, D, C = _operands(A, D, C)
    for name, M in (("A", A), ("D", D)):
        if not cross_positive(cone, M).ok:
            raise PreconditionError(f"{name} is not cross-positive on the cone")
        if not eigenvalues(M, margin_tol).stable:
            raise PreconditionError(f"{name} is not stable")
    if not matrix_nonneg(cone, C).in_cone:
        raise PreconditionError("C is not K-nonnegative")
    X = solve_sylvester(A, D, C)
    verdict = matrix_nonneg(cone, X)
    if not verdict.in_cone:
        raise NumericalConsistencyError(
            f"Sylvester solution left the cone (margin {verdict.margin:.3e} at {verdict.worst})"
        )
    return True
