from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError


def _square(M, name):
    M = np.array(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Coefficients of ``XBX + DX + XA + C = 0`` and the block matrix
    ``L = [[A, B], [C, D]]``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    L: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        blocks = {k: _square(getattr(self, k), k) for k in "ABCD"}
        n = blocks["A"].shape[0]
        for k, M in blocks.items():
            if M.shape != (n, n):
                raise DimensionError(f"block {k} has shape {M.shape}, expected {(n, n)}")
            M.setflags(write=False)
            object.__setattr__(self, k, M)
        L = np.block([[blocks["A"], blocks["B"]], [blocks["C"], blocks["D"]]])
        L.setflags(write=False)
        object.__setattr__(self, "L", L)

    @property
    def n(self):
        return self.A.shape[0]

    @classmethod
    def from_L(cls, L):
        L = _square(L, "L")
        if L.shape[0] % 2:
            raise DimensionError("L must have even dimension")
        n = L.shape[0] // 2
        return cls(L[:n, :n], L[:n, n:], L[n:, :n], L[n:, n:])

    def conjugate(self, G, Ginv=None):
        """Return the system with every block replaced by ``G M G^-1``."""
        G = np.asarray(G, dtype=float)
        if Ginv is None:
            Ginv = np.linalg.inv(G)
        return BlockSystem(*(G @ M @ Ginv for M in (self.A, self.B, self.C, self.D)))

    def transposed_dual(self):
        """Coefficients of ``Z B^T Z + A^T Z + Z D^T + C^T = 0`` in standard form."""
        return BlockSystem(self.D.T, self.B.T, self.C.T, self.A.T)

    def blocks(self):
        return self.A, self.B, self.C, self.D
