"""Certificates for monotone, bounded sequences in a cone order.

A sequence of K-nonnegative matrices that increases in the matrix order and
satisfies ``X_i r <=_K s`` for one interior ``r`` converges; the checkers
here verify those hypotheses element by element and watch the gaps.
"""

from dataclasses import dataclass, field

import numpy as np

from .cones import leq_vec, matrix_leq, matrix_nonneg, member
from .errors import DimensionError, PreconditionError

DEFAULT_GAP_TOL = 1e-12
DEFAULT_STALL_WINDOW = 50


@dataclass
class SequenceCertificate:
    length: int = 0
    monotone_up_to: int = 0
    bound_holds_up_to: int = 0
    bound_pair: tuple = (None, None)
    converged: bool = False
    limit_estimate: np.ndarray | None = None
    cauchy_tail: float = np.inf
    gaps: list = field(default_factory=list)
    # steps that fail the exact order but pass within tolerance
    within_noise: int = 0
    stalled: bool = False

    @property
    def monotone(self):
        return self.monotone_up_to == self.length

    @property
    def bounded(self):
        return self.bound_holds_up_to == self.length

    @property
    def passed(self):
        return self.length > 0 and self.monotone and self.bounded

    def summary(self):
        r, s = self.bound_pair
        return {
            "length": self.length,
            "monotone_up_to": self.monotone_up_to,
            "bound_holds_up_to": self.bound_holds_up_to,
            "monotone": self.monotone,
            "bounded": self.bounded,
            "converged": self.converged,
            "cauchy_tail": self.cauchy_tail,
            "within_noise": self.within_noise,
            "stalled": self.stalled,
            "gaps": list(self.gaps),
            "r": None if r is None else np.asarray(r).tolist(),
            "s": None if s is None else np.asarray(s).tolist(),
        }


class SequenceChecker:
    """Incremental monotonicity/bound/convergence bookkeeping.

    With ``matrix=True`` elements are n x n matrices, the order is the
    K-nonnegative matrix order, the first element must be K-nonnegative and
    the bound is ``X_i r <=_K s``. Otherwise elements are vectors bounded by
    ``s`` directly and ``r`` is ignored.
    """

    def __init__(self, cone, r=None, s=None, matrix=True, tol=DEFAULT_GAP_TOL,
                 stall_window=DEFAULT_STALL_WINDOW, keep=False):
        self.cone = cone
        self.matrix = matrix
        self.tol = tol
        self.stall_window = stall_window
        self.r = None if r is None else np.asarray(r, dtype=float)
        self.s = None if s is None else np.asarray(s, dtype=float)
        if matrix and self.r is not None:
            if not member(cone, self.r).interior:
                raise PreconditionError(
                    "bound direction r must be interior to the cone; "
                    "a boundary r cannot control every column")
        self.cert = SequenceCertificate(bound_pair=(self.r, self.s))
        self.elements = [] if keep else None
        self._prev = None
        self._best_gap = np.inf
        self._since_best = 0
        self._bound_ok = True
        self._mono_ok = True

    def _norm(self, x):
        return np.linalg.norm(x) if self.matrix else np.linalg.norm(x, np.inf)

    def _bound(self, x):
        if self.s is None:
            return True
        if self.matrix:
            return leq_vec(self.cone, x @ self.r, self.s).in_cone
        return leq_vec(self.cone, x, self.s).in_cone

    def _step(self, prev, x):
        if prev is None:
            if not self.matrix:
                return True
            order = matrix_nonneg(self.cone, x)
        elif self.matrix:
            order = matrix_leq(self.cone, prev, x)
        else:
            order = leq_vec(self.cone, prev, x)
        if order.in_cone and order.margin < 0:
            self.cert.within_noise += 1
        return order.in_cone

    def push(self, x):
        x = np.asarray(x, dtype=float)
        expected = (self.cone.dim, self.cone.dim) if self.matrix else (self.cone.dim,)
        if x.shape != expected:
            raise DimensionError(f"sequence element has shape {x.shape}, expected {expected}")
        cert = self.cert
        prev = self._prev
        self._mono_ok = self._mono_ok and self._step(prev, x)
        self._bound_ok = self._bound_ok and self._bound(x)
        cert.length += 1
        if self._mono_ok:
            cert.monotone_up_to = cert.length
        if self._bound_ok:
            cert.bound_holds_up_to = cert.length
        if prev is not None:
            gap = float(self._norm(x - prev) / max(1.0, self._norm(x)))
            cert.gaps.append(gap)
            cert.cauchy_tail = gap
            cert.converged = gap <= self.tol
            if gap < self._best_gap:
                self._best_gap, self._since_best = gap, 0
                cert.stalled = False
            else:
                self._since_best += 1
                cert.stalled = self._since_best >= self.stall_window
        self._prev = x
        cert.limit_estimate = x
        if self.elements is not None:
            self.elements.append(x)
        return cert


def check_vector_sequence(cone, seq, t, tol=DEFAULT_GAP_TOL):
    """Check ``s_i <=_K s_{i+1}`` and ``s_i <=_K t`` along a vector sequence."""
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    checker = SequenceChecker(cone, s=t, matrix=False, tol=tol)
    for x in seq:
        checker.push(x)
    return checker.cert


def check_matrix_sequence(cone, seq, r, s, tol=DEFAULT_GAP_TOL):
    """Check ``0 <=_K X_i <=_K X_{i+1}`` and ``X_i r <=_K s`` with ``r`` interior."""
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    checker = SequenceChecker(cone, r=r, s=s, matrix=True, tol=tol)
    for X in seq:
        checker.push(X)
    return checker.cert
