"""Simplicial proper cones and the orders they induce.

A cone is stored through an invertible generator matrix ``G`` whose columns
span it, ``K = {G lam : lam >= 0}``; the nonnegative orthant is ``G = I``.
In the coordinates ``lam = G^-1 x`` membership, K-nonnegativity and
cross-positivity reduce to sign checks on finitely many numbers.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .blocks import BlockSystem
from .errors import DimensionError, NumericalConsistencyError

DEFAULT_TOL = 1e-9
DEFAULT_COND_CAP = 1e12


class ConeKind(str, Enum):
    ORTHANT = "orthant"
    SIMPLICIAL = "simplicial"


class Relation(str, Enum):
    IN_CONE = "in_cone"
    IN_INTERIOR = "in_interior"
    NOT_IN_CONE = "not_in_cone"


@dataclass(frozen=True, eq=False)
class ConeSpec:
    kind: ConeKind
    generators: np.ndarray
    tol_membership: float = DEFAULT_TOL
    _inverse: np.ndarray = field(default=None, repr=False)

    @classmethod
    def orthant(cls, dim, tol=DEFAULT_TOL):
        if int(dim) < 1:
            raise ValueError("cone dimension must be positive")
        eye = np.eye(int(dim))
        eye.setflags(write=False)
        return cls(ConeKind.ORTHANT, eye, tol, eye)

    @classmethod
    def simplicial(cls, generators, tol=DEFAULT_TOL, cond_cap=DEFAULT_COND_CAP, _inverse=None):
        G = np.array(generators, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
            raise DimensionError(f"generator matrix must be square, got {G.shape}")
        if not np.all(np.isfinite(G)):
            raise ValueError("generator matrix has non-finite entries")
        cond = np.linalg.cond(G)
        if not np.isfinite(cond) or cond > cond_cap:
            raise ValueError(f"generator matrix is singular or too ill-conditioned (cond={cond:.3e})")
        Ginv = np.linalg.inv(G) if _inverse is None else np.array(_inverse, dtype=float)
        G.setflags(write=False)
        Ginv.setflags(write=False)
        return cls(ConeKind.SIMPLICIAL, G, tol, Ginv)

    @property
    def dim(self):
        return self.generators.shape[0]

    @property
    def inverse(self):
        return self._inverse

    @property
    def is_orthant(self):
        return self.kind is ConeKind.ORTHANT

    def coords(self, x):
        """Coordinates ``lam = G^-1 x`` of a vector (or columns of a matrix)."""
        x = np.asarray(x, dtype=float)
        return x if self.is_orthant else self._inverse @ x

    def conj(self, M):
        """``G^-1 M G``: the matrix ``M`` acting in generator coordinates."""
        M = np.asarray(M, dtype=float)
        return M if self.is_orthant else self._inverse @ M @ self.generators

    def interior_point(self):
        """Sum of generators, ``G 1``."""
        return self.generators.sum(axis=1)

    def with_tol(self, tol):
        return ConeSpec(self.kind, self.generators, tol, self._inverse)

    def to_json(self):
        if self.is_orthant:
            return {"type": "orthant", "dim": self.dim}
        return {"type": "simplicial", "generators": self.generators.tolist()}

    @classmethod
    def from_json(cls, obj, tol=DEFAULT_TOL):
        kind = obj.get("type")
        if kind == "orthant":
            return cls.orthant(int(obj["dim"]), tol)
        if kind == "simplicial":
            return cls.simplicial(obj["generators"], tol)
        raise ValueError(f"unknown cone type {kind!r}")


@dataclass(frozen=True, eq=False)
class ProductCone:
    """``K x K`` in ``R^{2n}``."""

    factor: ConeSpec

    @property
    def dim(self):
        return 2 * self.factor.dim

    def as_cone(self):
        f = self.factor
        if f.is_orthant:
            return ConeSpec.orthant(self.dim, f.tol_membership)
        Z = np.zeros_like(f.generators)
        G = np.block([[f.generators, Z], [Z, f.generators]])
        Ginv = np.block([[f.inverse, Z], [Z, f.inverse]])
        return ConeSpec.simplicial(G, f.tol_membership, cond_cap=np.inf, _inverse=Ginv)

    def dual(self):
        return ProductCone(dual(self.factor))


@dataclass(frozen=True)
class ConeOrder:
    """Outcome of a cone membership test.

    ``margin`` is the smallest generator coordinate divided by the input
    scale; ``worst`` is the index (or index pair) attaining it.
    """

    relation: Relation
    margin: float
    worst: tuple = ()

    @property
    def in_cone(self):
        return self.relation is not Relation.NOT_IN_CONE

    @property
    def interior(self):
        return self.relation is Relation.IN_INTERIOR


@dataclass(frozen=True)
class CrossPositivity:
    ok: bool
    margin: float
    # (generator index i, dual generator index j, h_j^T A g_i / scale)
    violations: tuple = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class BlockCrossPositivity:
    verdict: bool
    A_cross_positive: CrossPositivity
    D_cross_positive: CrossPositivity
    B_nonneg: ConeOrder
    C_nonneg: ConeOrder
    direct: CrossPositivity

    def failed_blocks(self):
        out = []
        if not self.A_cross_positive.ok:
            out.append("A cross-positive")
        if not self.D_cross_positive.ok:
            out.append("D cross-positive")
        if not self.B_nonneg.in_cone:
            out.append("B K-nonnegative")
        if not self.C_nonneg.in_cone:
            out.append("C K-nonnegative")
        return out

    def __bool__(self):
        return self.verdict


def _spec(cone):
    return cone.as_cone() if isinstance(cone, ProductCone) else cone


def _check_vec(cone, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != cone.dim:
        raise DimensionError(f"vector of length {x.shape[0]} for cone of dimension {cone.dim}")
    return x


def _check_mat(cone, M):
    M = np.asarray(M, dtype=float)
    if M.shape != (cone.dim, cone.dim):
        raise DimensionError(f"matrix of shape {M.shape} for cone of dimension {cone.dim}")
    return M


def _scale(*arrays):
    m = 1.0
    for a in arrays:
        if a.size:
            m = max(m, float(np.abs(a).max()))
    return m


def _classify(values, scale, tol):
    flat = int(values.argmin())
    idx = np.unravel_index(flat, values.shape)
    margin = float(values.flat[flat]) / scale
    if margin > tol:
        rel = Relation.IN_INTERIOR
    elif margin >= -tol:
        rel = Relation.IN_CONE
    else:
        rel = Relation.NOT_IN_CONE
    return ConeOrder(rel, margin, tuple(int(i) for i in idx))


def member(cone, x, scale=None):
    """Classify ``x`` as interior, boundary or outside of ``cone``."""
    cone = _spec(cone)
    x = _check_vec(cone, x)
    return _classify(cone.coords(x), scale or _scale(x), cone.tol_membership)


def dual(cone):
    if isinstance(cone, ProductCone):
        return cone.dual()
    if cone.is_orthant:
        return cone
    return ConeSpec.simplicial(cone.inverse.T, cone.tol_membership, cond_cap=np.inf,
                               _inverse=cone.generators.T)


def leq_vec(cone, x, y):
    """Test ``x <=_K y``."""
    cone = _spec(cone)
    x, y = _check_vec(cone, x), _check_vec(cone, y)
    return member(cone, y - x, scale=_scale(x, y))


def matrix_nonneg(cone, M, scale=None):
    """Test whether ``M`` maps the cone into itself (``G^-1 M G >= 0``)."""
    cone = _spec(cone)
    M = _check_mat(cone, M)
    return _classify(cone.conj(M), scale or _scale(M), cone.tol_membership)


def matrix_leq(cone, M1, M2):
    """Test ``M1 <=_K M2`` in the order induced by the K-nonnegative matrices."""
    cone = _spec(cone)
    M1, M2 = _check_mat(cone, M1), _check_mat(cone, M2)
    return matrix_nonneg(cone, M2 - M1, scale=_scale(M1, M2))


def cross_positive(cone, A, scale=None):
    """Cross-positivity of ``A`` on a simplicial cone.

    The generators ``g_i`` of K and the rows ``h_j`` of ``G^-1`` (generators
    of the dual) satisfy ``h_j^T g_i = delta_ij``, so the orthogonal
    extreme-ray pairs are exactly the off-diagonal entries of ``G^-1 A G``.
    """
    cone = _spec(cone)
    A = _check_mat(cone, A)
    scale = scale or _scale(A)
    N = cone.conj(A) / scale
    off = N.copy()
    np.fill_diagonal(off, np.inf)
    if cone.dim == 1:
        return CrossPositivity(True, np.inf)
    margin = float(off.min())
    tol = cone.tol_membership
    bad = np.argwhere(off < -tol)
    violations = sorted(((int(i), int(j), float(off[j, i])) for j, i in bad), key=lambda v: v[2])
    return CrossPositivity(not violations, margin, tuple(violations))


def block_cross_positive(cone, sys: BlockSystem, check_direct=True):
    """Cross-positivity of ``L`` on ``K x K`` via its blocks.

    ``L`` is cross-positive on the product cone exactly when A and D are
    cross-positive and B and C are K-nonnegative. The direct test on the
    2n-dimensional cone is run alongside and must agree.
    """
    if sys.n != cone.dim:
        raise DimensionError(f"system of size {sys.n} for cone of dimension {cone.dim}")
    s = _scale(sys.L)
    a = cross_positive(cone, sys.A, scale=s)
    d = cross_positive(cone, sys.D, scale=s)
    b = matrix_nonneg(cone, sys.B, scale=s)
    c = matrix_nonneg(cone, sys.C, scale=s)
    verdict = a.ok and d.ok and b.in_cone and c.in_cone
    direct = None
    if check_direct:
        direct = cross_positive(ProductCone(cone), sys.L, scale=s)
        if direct.ok != verdict:
            raise NumericalConsistencyError(
                f"block cross-positivity ({verdict}) disagrees with the direct "
                f"product-cone test ({direct.ok})"
            )
    return BlockCrossPositivity(verdict, a, d, b, c, direct)
