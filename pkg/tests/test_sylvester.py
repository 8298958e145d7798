import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coneric.cones import ConeSpec, matrix_nonneg
from coneric.errors import IllPosedSylvester, PreconditionError
from coneric.sylvester import (
    Method,
    SylvesterProblem,
    integral_solution,
    sylvester_cone_check,
    solve_kronecker,
    solve_sylvester,
    sylvester_residual,
)

from conftest import random_cone, random_cross_positive, random_nonneg

seeds = st.integers(0, 2**32 - 1)


def stable_pair(rng, n, K=None):
    K = K or ConeSpec.orthant(n)
    A = random_cross_positive(K, rng, -3.0, 0.0)
    D = random_cross_positive(K, rng, -3.0, 0.0)
    # shift by the Perron-type bound to make both stable
    A -= (np.abs(K.inverse @ A @ K.generators).sum(axis=1).max() + 0.5) * np.eye(n)
    D -= (np.abs(K.inverse @ D @ K.generators).sum(axis=1).max() + 0.5) * np.eye(n)
    return A, D


@pytest.mark.parametrize("method", list(Method))
def test_scalar_closed_form(method):
    X = solve_sylvester([[-2.0]], [[-2.0]], [[1.0]], method)
    assert X[0, 0] == pytest.approx(0.25, rel=1e-9)
    X = solve_sylvester([[-1.0]], [[-1.0]], [[1.0]], method)
    assert X[0, 0] == pytest.approx(0.5, rel=1e-9)


@pytest.mark.parametrize("method", list(Method))
def test_zero_rhs_gives_zero(method):
    A, D = stable_pair(np.random.default_rng(0), 4)
    np.testing.assert_allclose(solve_sylvester(A, D, np.zeros((4, 4)), method), 0, atol=1e-15)


def test_symmetric_two_by_two_by_hand():
    # D ones + ones A = -4 ones, so X = ones / 4
    A = D = np.array([[-3.0, 1.0], [1.0, -3.0]])
    X = solve_sylvester(A, D, np.ones((2, 2)))
    np.testing.assert_allclose(X, np.full((2, 2), 0.25), rtol=1e-14)
    np.testing.assert_allclose(solve_kronecker(A, D, np.ones((2, 2))), X, rtol=1e-14)


@given(seeds, st.integers(1, 20))
@settings(max_examples=40)
def test_schur_matches_kronecker(seed, n):
    rng = np.random.default_rng(seed)
    A, D = stable_pair(rng, n)
    C = rng.uniform(0, 1, (n, n))
    X1 = solve_sylvester(A, D, C)
    X2 = solve_kronecker(A, D, C)
    assert np.linalg.norm(X1 - X2) <= 1e-10 * np.linalg.norm(X2)
    res = sylvester_residual(A, D, C, X1)
    assert res <= 1e-10 * (np.linalg.norm(A) + np.linalg.norm(D)) * np.linalg.norm(X1) \
        + 1e-12 * np.linalg.norm(C)


def test_schur_general_spectra():
    # not stable, only separated
    rng = np.random.default_rng(5)
    A = rng.normal(size=(6, 6)) + 3 * np.eye(6)
    D = rng.normal(size=(6, 6)) + 3 * np.eye(6)
    C = rng.normal(size=(6, 6))
    np.testing.assert_allclose(solve_sylvester(A, D, C), solve_kronecker(A, D, C), atol=1e-10)


@given(seeds, st.integers(1, 12))
@settings(max_examples=30)
def test_linearity(seed, n):
    rng = np.random.default_rng(seed)
    A, D = stable_pair(rng, n)
    C1, C2 = rng.normal(size=(n, n)), rng.normal(size=(n, n))
    X12 = solve_sylvester(A, D, C1 + C2)
    X = solve_sylvester(A, D, C1) + solve_sylvester(A, D, C2)
    assert np.linalg.norm(X12 - X) <= 1e-10 * max(np.linalg.norm(X12), 1e-300)


def test_quadrature_matches_schur():
    rng = np.random.default_rng(11)
    for n in (1, 3, 5, 8):
        K = random_cone(rng, n)
        A, D = stable_pair(rng, n, K)
        C = random_nonneg(K, rng)
        Xq = integral_solution(A, D, C)
        Xs = solve_sylvester(A, D, C)
        assert np.linalg.norm(Xq - Xs) <= 1e-6 * np.linalg.norm(Xs)


def test_quadrature_requires_stability():
    with pytest.raises(PreconditionError):
        integral_solution([[1.0]], [[-2.0]], [[1.0]])


def test_ill_posed_detected():
    A = np.diag([1.0, -2.0])
    D = np.diag([-1.0, 3.0])
    with pytest.raises(IllPosedSylvester) as info:
        solve_sylvester(A, D, np.eye(2))
    assert info.value.separation == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(IllPosedSylvester):
        solve_kronecker(A, D, np.eye(2))


def test_problem_object():
    p = SylvesterProblem(np.array([[-2.0]]), np.array([[-2.0]]), np.array([[1.0]]),
                         Method.KRONECKER)
    assert p.solve()[0, 0] == pytest.approx(0.25)


def test_cone_check_examples():
    K = ConeSpec.orthant(1)
    assert sylvester_cone_check(K, [[-2.0]], [[-2.0]], [[1.0]])
    K2 = ConeSpec.orthant(2)
    A = np.array([[-3.0, 1.0], [1.0, -3.0]])
    assert sylvester_cone_check(K2, A, A, np.ones((2, 2)))
    rng = np.random.default_rng(3)
    Ks = random_cone(rng, 4)
    A, D = stable_pair(rng, 4, Ks)
    assert sylvester_cone_check(Ks, A, D, random_nonneg(Ks, rng))


def test_cone_check_rejects_bad_hypotheses():
    K = ConeSpec.orthant(2)
    A = np.array([[-3.0, 1.0], [1.0, -3.0]])
    with pytest.raises(PreconditionError, match="C"):
        sylvester_cone_check(K, A, A, -np.ones((2, 2)))
    with pytest.raises(PreconditionError, match="cross-positive"):
        sylvester_cone_check(K, np.array([[-3.0, -1.0], [1.0, -3.0]]), A, np.ones((2, 2)))
    with pytest.raises(PreconditionError, match="stable"):
        sylvester_cone_check(K, np.array([[1.0, 1.0], [1.0, 1.0]]), A, np.ones((2, 2)))


def test_solution_stays_in_cone_many_instances():
    rng = np.random.default_rng(99)
    for k in range(100):
        n = int(rng.integers(1, 13))
        K = random_cone(rng, n, simplicial=bool(k % 2))
        A, D = stable_pair(rng, n, K)
        C = random_nonneg(K, rng)
        assert sylvester_cone_check(K, A, D, C)
        assert matrix_nonneg(K, solve_sylvester(A, D, C)).in_cone
