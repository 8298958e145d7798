"""Seeded generation of problem instances and the scalar closed-form oracle.

All draws come from ``numpy.random.PCG64`` seeded with the recipe seed, so a
recipe reproduces its instance bit for bit.
"""

from dataclasses import asdict, dataclass
from enum import Enum
import math

import numpy as np

from .blocks import BlockSystem
from .cones import ConeSpec


class Kind(str, Enum):
    ORTHANT_MMATRIX = "orthant-mmatrix"
    CONJUGATED = "conjugated"
    SCALAR = "scalar"
    # cross-positive on the orthant with spectral abscissa +shift
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class InstanceRecipe:
    seed: int
    n: int = 4
    kind: Kind = Kind.ORTHANT_MMATRIX
    shift: float = 1.0
    cond_cap: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.n) < 1:
            raise ValueError("n must be positive")
        if self.kind is Kind.SCALAR and self.n != 1:
            raise ValueError("scalar instances have n = 1")
        if not self.shift > 0:
            raise ValueError("shift must be positive")
        if not self.cond_cap >= 1:
            raise ValueError("cond_cap must be at least 1")

    def rng(self):
        return np.random.Generator(np.random.PCG64(int(self.seed)))

    def to_json(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["seed"]), int(obj["n"]), Kind(obj["kind"]),
                   float(obj["shift"]), float(obj["cond_cap"]))


def assemble_diagonal_dominant(offdiag, diag_shift):
    """Put ``-(row sum of off-diagonals) + diag_shift`` on the diagonal.

    With nonnegative off-diagonals, ``L 1 = diag_shift * 1`` and ``1`` is a
    positive eigenvector, so the spectral abscissa of ``L`` is exactly
    ``diag_shift``.
    """
    L = np.array(offdiag, dtype=float)
    np.fill_diagonal(L, 0.0)
    L[np.diag_indices_from(L)] = -L.sum(axis=1) + diag_shift
    return BlockSystem.from_L(L)


def _draw_offdiag(rng, n):
    return rng.uniform(0.0, 1.0, size=(2 * n, 2 * n))


def gen_orthant_mmatrix(recipe: InstanceRecipe) -> BlockSystem:
    """``-L`` a strictly diagonally dominant nonsingular M-matrix."""
    return assemble_diagonal_dominant(_draw_offdiag(recipe.rng(), recipe.n), -recipe.shift)


def gen_unstable(recipe: InstanceRecipe) -> BlockSystem:
    """Cross-positive ``L`` on the orthant with spectral abscissa ``+shift``."""
    return assemble_diagonal_dominant(_draw_offdiag(recipe.rng(), recipe.n), recipe.shift)


def random_generators(rng, n, cond_cap):
    """Random ``G = Q1 diag(sigma) Q2^T`` with ``cond(G) <= cond_cap``."""
    q1, r1 = np.linalg.qr(rng.standard_normal((n, n)))
    q2, r2 = np.linalg.qr(rng.standard_normal((n, n)))
    q1 = q1 * np.sign(np.diag(r1))
    q2 = q2 * np.sign(np.diag(r2))
    sigma = np.exp(rng.uniform(0.0, math.log(cond_cap), size=n))
    return (q1 * sigma) @ q2.T


@dataclass(frozen=True, eq=False)
class ConjugatedInstance:
    cone: ConeSpec
    system: BlockSystem
    twin: BlockSystem
    G: np.ndarray

    def from_twin(self, X):
        """Map an orthant-twin solution to this instance: ``G X G^-1``."""
        return self.G @ X @ self.cone.inverse


def gen_conjugated(recipe: InstanceRecipe, G=None) -> ConjugatedInstance:
    """An orthant M-matrix instance moved onto ``Simplicial(G)`` by
    ``M -> G M G^-1`` for every block."""
    rng = recipe.rng()
    twin = assemble_diagonal_dominant(_draw_offdiag(rng, recipe.n), -recipe.shift)
    if G is None:
        G = random_generators(rng, recipe.n, recipe.cond_cap)
    cone = ConeSpec.simplicial(G)
    return ConjugatedInstance(cone, twin.conjugate(cone.generators, cone.inverse), twin,
                              cone.generators)


def gen_scalar(recipe: InstanceRecipe) -> BlockSystem:
    """Scalar ``(a, b, c, d)`` with ``b, c >= 0`` and ``L`` stable.

    About one draw in twenty has ``b = 0``. The determinant ``ad - bc`` is
    kept above ``recipe.shift / 4`` so the iteration contracts at a useful rate.
    """
    rng = recipe.rng()
    while True:
        b = 0.0 if rng.uniform() < 0.05 else rng.uniform(0.0, 1.0)
        c = rng.uniform(0.0, 1.0)
        a, d = rng.uniform(-3.0, 0.0, size=2)
        if a * d - b * c > 0.25 * recipe.shift:
            return BlockSystem([[a]], [[b]], [[c]], [[d]])


def generate(recipe: InstanceRecipe):
    """Return ``(cone, system)`` for any recipe kind."""
    if recipe.kind is Kind.ORTHANT_MMATRIX:
        return ConeSpec.orthant(recipe.n), gen_orthant_mmatrix(recipe)
    if recipe.kind is Kind.UNSTABLE:
        return ConeSpec.orthant(recipe.n), gen_unstable(recipe)
    if recipe.kind is Kind.SCALAR:
        return ConeSpec.orthant(1), gen_scalar(recipe)
    inst = gen_conjugated(recipe)
    return inst.cone, inst.system


@dataclass(frozen=True)
class ScalarRoot:
    x_star: float
    exists: bool


def scalar_oracle(a, b, c, d):
    """Stabilizing nonnegative root of ``b x^2 + (a + d) x + c = 0``.

    A root is stabilizing when both ``a + b x`` and ``d + b x`` are negative;
    only the smaller root can be. With ``b = 0`` the equation is linear.
    """
    if b < 0 or c < 0:
        raise ValueError("scalar oracle needs b, c >= 0")
    s = a + d
    if b == 0:
        if s >= 0:
            return ScalarRoot(math.nan, False)
        x = -c / s
        return ScalarRoot(x, x >= 0 and a < 0 and d < 0)
    disc = s * s - 4.0 * b * c
    if disc < 0:
        return ScalarRoot(math.nan, False)
    root = math.sqrt(disc)
    # smaller root; the product form avoids cancellation when -s > 0
    x = 2.0 * c / (root - s) if root - s > 0 else (-s - root) / (2.0 * b)
    ok = x >= 0 and a + b * x < 0 and d + b * x < 0
    return ScalarRoot(x, ok)
