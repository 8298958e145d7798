"""Stabilizing cone-preserving solutions of nonsymmetric algebraic Riccati
equations ``XBX + DX + XA + C = 0`` with certificates."""

from .blocks import BlockSystem
from .cones import (
    ConeOrder,
    ConeSpec,
    ProductCone,
    Relation,
    block_cross_positive,
    cross_positive,
    dual,
    leq_vec,
    matrix_leq,
    matrix_nonneg,
    member,
)
from .errors import (
    ConericError,
    EquivalenceNegative,
    HypothesisFailure,
    IllPosedSylvester,
    InconclusiveAtMargin,
    NonConvergence,
    NumericalConsistencyError,
    PreconditionError,
)
from .instances import InstanceRecipe, Kind, generate, scalar_oracle
from .monotone import SequenceCertificate, check_matrix_sequence, check_vector_sequence
from .riccati import (
    Certificate,
    Solution,
    SolveOptions,
    residual,
    solve,
    transpose_dual_solve,
    verify_necessity,
    verify_sufficiency,
)
from .spectral import Witness, eigenvalues, expm, stable_cross_positive_checks, witness
from .sylvester import Method, integral_solution, sylvester_cone_check, solve_sylvester

__version__ = "0.1.0"
