"""Acceptance criteria, one test each, at the pinned tolerances.

Run alone with ``pytest tests/test_acceptance.py -s`` (or execute this file)
to see one PASS/FAIL line per criterion; the lines are also repeated in the
pytest terminal summary.
"""

import json
import sys
import time

import numpy as np
import pytest

from coneric.cli import main
from coneric.cones import ConeSpec, ProductCone, cross_positive, leq_vec, matrix_nonneg
from coneric.instances import (
    InstanceRecipe,
    Kind,
    gen_conjugated,
    gen_orthant_mmatrix,
    gen_scalar,
    scalar_oracle,
)
from coneric.monotone import check_matrix_sequence
from coneric.riccati import (
    assemble_neg_inverse,
    residual,
    residual_scale,
    solve,
    transpose_dual_solve,
)
from coneric.spectral import eigenvalues, expm, stable_cross_positive_checks
from coneric.sylvester import integral_solution, solve_kronecker, solve_sylvester

from conftest import random_cone, to_cone

SCALAR_ABS_TOL = 1e-10
RESIDUAL_TOL = 1e-10
ENTRY_TOL = 1e-9
MARGIN = 1e-9
INVERSE_RTOL = 1e-8
TRANSPOSE_RTOL = 1e-8
CONJ_RTOL = 1e-7
KRON_RTOL = 1e-10
QUAD_RTOL = 1e-6
T_GRID = (0.01, 0.1, 1.0, 10.0)


@pytest.fixture(scope="module")
def orthant_runs():
    """50 seeded orthant M-matrix instances, n = 2..50, solved with tracing."""
    runs = []
    t0 = time.perf_counter()
    for i in range(50):
        n = 2 + (48 * i) // 49
        recipe = InstanceRecipe(1000 + i, n, Kind.ORTHANT_MMATRIX)
        sys_ = gen_orthant_mmatrix(recipe)
        K = ConeSpec.orthant(n)
        runs.append((K, sys_, solve(K, sys_, record_trace=True)))
    return runs, time.perf_counter() - t0


def test_ac1_scalar_oracle(criterion):
    t0 = time.perf_counter()
    K = ConeSpec.orthant(1)
    worst = 0.0
    for seed in range(1000):
        sys_ = gen_scalar(InstanceRecipe(seed, 1, Kind.SCALAR))
        a, b, c, d = (float(M[0, 0]) for M in sys_.blocks())
        assert eigenvalues(sys_.L).stable and cross_positive(ProductCone(K), sys_.L)
        root = scalar_oracle(a, b, c, d)
        assert root.exists
        x = solve(K, sys_).solution.X_star[0, 0]
        worst = max(worst, abs(x - root.x_star))
    elapsed = time.perf_counter() - t0
    ok = worst <= SCALAR_ABS_TOL and elapsed < 5.0
    criterion("AC1 scalar oracle, 1000 instances", ok,
              f"max |x - root| = {worst:.2e}, {elapsed:.2f} s")
    assert worst <= SCALAR_ABS_TOL
    assert elapsed < 5.0


def test_ac2_residual_and_cone(orthant_runs, criterion):
    runs, elapsed = orthant_runs
    worst_res = 0.0
    ok = True
    for K, sys_, cert in runs:
        X = cert.solution.X_star
        rel = residual(sys_, X) / residual_scale(sys_, X)
        worst_res = max(worst_res, rel)
        ok &= rel <= RESIDUAL_TOL
        ok &= bool(X.min() >= -ENTRY_TOL)
        for M in (cert.solution.closed_loop_A, cert.solution.closed_loop_D):
            ok &= eigenvalues(M).spectral_abscissa < -MARGIN
            off = M[~np.eye(len(M), dtype=bool)]
            ok &= bool(off.size == 0 or off.min() >= -ENTRY_TOL * max(1.0, np.abs(M).max()))
    criterion("AC2 residual and cone membership, 50 orthant instances", ok and elapsed < 60,
              f"max relative residual {worst_res:.2e}, {elapsed:.1f} s")
    assert ok
    assert elapsed < 60


def test_ac3_proof_trace(orthant_runs, criterion):
    runs, _ = orthant_runs
    ok = True
    for K, sys_, cert in runs:
        w = cert.witness
        s = w.v2 - np.linalg.solve(sys_.D, w.u2)
        tc = check_matrix_sequence(K, cert.iterates, w.v1, s)
        ok &= tc.passed
        ok &= leq_vec(K, cert.solution.X_star @ w.v1, w.v2).in_cone
    criterion("AC3 monotone trace bounded by (v1, v2 - D^-1 u2)", ok)
    assert ok


def test_ac4_necessity(orthant_runs, criterion):
    runs, _ = orthant_runs
    worst = 0.0
    ok = True
    for K, sys_, cert in runs:
        assembled = assemble_neg_inverse(sys_, cert.solution.X_star)
        direct = -np.linalg.inv(sys_.L)
        rel = np.linalg.norm(assembled - direct) / np.linalg.norm(direct)
        worst = max(worst, rel)
        ok &= rel <= INVERSE_RTOL
        ok &= matrix_nonneg(ProductCone(K), assembled).in_cone
    criterion("AC4 block inverse equals -L^-1 and is (K x K)-nonnegative", ok,
              f"max relative difference {worst:.2e}")
    assert ok


def test_ac5_transpose_duality(criterion):
    ok = True
    worst = 0.0
    for i in range(20):
        n = 1 + i % 12
        recipe = InstanceRecipe(2000 + i, n, Kind.CONJUGATED if i % 2 else Kind.ORTHANT_MMATRIX)
        if i % 2:
            inst = gen_conjugated(recipe)
            K, sys_ = inst.cone, inst.system
        else:
            K, sys_ = ConeSpec.orthant(n), gen_orthant_mmatrix(recipe)
        res = transpose_dual_solve(K, sys_)
        bound = TRANSPOSE_RTOL * max(1.0, np.linalg.norm(res.X_star))
        worst = max(worst, res.difference / bound * TRANSPOSE_RTOL)
        ok &= res.difference <= bound
    criterion("AC5 transpose duality Z* = X*^T, 20 instances", ok,
              f"max ||Z - X^T|| / max(1, ||X||) = {worst:.2e}")
    assert ok


def test_ac6_conjugation_covariance(criterion):
    ok = True
    worst = 0.0
    for i in range(20):
        inst = gen_conjugated(InstanceRecipe(3000 + i, 2 + i % 9, Kind.CONJUGATED, cond_cap=50.0))
        assert np.linalg.cond(inst.G) <= 50.0 * (1 + 1e-12)
        X = solve(inst.cone, inst.system).solution.X_star
        Xt = solve(ConeSpec.orthant(inst.twin.n), inst.twin).solution.X_star
        rel = np.linalg.norm(X - inst.from_twin(Xt)) / np.linalg.norm(X)
        worst = max(worst, rel)
        ok &= rel <= CONJ_RTOL
    criterion("AC6 conjugation covariance, cond(G) <= 50", ok, f"max relative error {worst:.2e}")
    assert ok


def _metzler(rng, n):
    N = rng.uniform(0.0, 1.0, (n, n))
    N[np.diag_indices(n)] = rng.uniform(-3.0, 1.0, n)
    return N


def test_ac7_exponential_characterization(criterion):
    rng = np.random.default_rng(7007)
    pos_ok = neg_ok = True
    for i in range(50):
        n = int(rng.integers(1, 9))
        K = random_cone(rng, n, simplicial=bool(i % 2), cond_cap=20.0)
        A = to_cone(K, _metzler(rng, n))
        assert cross_positive(K, A)
        pos_ok &= all(matrix_nonneg(K, expm(A, t)).in_cone for t in T_GRID)
    for i in range(50):
        n = int(rng.integers(2, 9))
        K = random_cone(rng, n, simplicial=bool(i % 2), cond_cap=20.0)
        N = _metzler(rng, n)
        j, k = rng.choice(n, 2, replace=False)
        N[j, k] = -rng.uniform(0.1, 1.0)
        A = to_cone(K, N)
        assert not cross_positive(K, A)
        neg_ok &= any(not matrix_nonneg(K, expm(A, t)).in_cone for t in T_GRID[:2])
    criterion("AC7 cross-positive <=> exp(At) K-nonnegative on the t-grid", pos_ok and neg_ok,
              f"cross-positive side {pos_ok}, violation side {neg_ok}")
    assert pos_ok and neg_ok


def test_ac8_three_stability_tests_agree(criterion):
    rng = np.random.default_rng(8008)
    agree = checked = stable_count = 0
    for i in range(200):
        n = int(rng.integers(1, 9))
        K = random_cone(rng, n, simplicial=bool(i % 2), cond_cap=20.0)
        N = rng.uniform(0.0, 1.0, (n, n))
        rho = max(abs(np.linalg.eigvals(N)))
        f = rng.uniform(0.5, 0.9) if i % 2 else rng.uniform(1.1, 1.5)
        A = to_cone(K, N - f * rho * np.eye(n))
        r = stable_cross_positive_checks(K, A, strict=False)
        assert r.cross_positive
        if r.neg_inverse_nonneg is None:
            continue
        checked += 1
        stable_count += r.stable
        agree += r.stable == r.witness_exists == r.neg_inverse_nonneg
    ok = agree == checked and checked > 0 and 0 < stable_count < checked
    criterion("AC8 stability / interior witness / -A^-1 agree, 200 matrices", ok,
              f"{agree}/{checked} agree, {stable_count} stable")
    assert ok


def test_ac9_sylvester_oracles(criterion):
    rng = np.random.default_rng(9009)
    worst_k = worst_q = 0.0
    for i in range(40):
        n = 1 + i % 20
        A = rng.uniform(0, 1, (n, n))
        D = rng.uniform(0, 1, (n, n))
        A -= np.diag(A.sum(axis=1) + rng.uniform(0.2, 2.0))
        D -= np.diag(D.sum(axis=1) + rng.uniform(0.2, 2.0))
        C = rng.uniform(0, 1, (n, n))
        Xs = solve_sylvester(A, D, C)
        Xk = solve_kronecker(A, D, C)
        worst_k = max(worst_k, np.linalg.norm(Xs - Xk) / np.linalg.norm(Xk))
        if n <= 8:
            Xq = integral_solution(A, D, C)
            worst_q = max(worst_q, np.linalg.norm(Xs - Xq) / np.linalg.norm(Xs))
    ok = worst_k <= KRON_RTOL and worst_q <= QUAD_RTOL
    criterion("AC9 Sylvester Schur vs Kronecker and vs integral", ok,
              f"Kronecker {worst_k:.2e}, quadrature {worst_q:.2e}")
    assert ok


def test_ac10_equivalence_negative_cli(tmp_path, criterion, capsys):
    ok = True
    for i in range(20):
        prob = tmp_path / f"u{i}.json"
        rep = tmp_path / f"u{i}.report.json"
        main(["gen", "--kind", "unstable", "--n", str(1 + i % 10), "--seed", str(4000 + i),
              "--shift", str(0.1 + 0.1 * (i % 5)), "--out", str(prob)])
        code = main(["solve", str(prob), "--out", str(rep)])
        report = json.loads(rep.read_text())
        ok &= code == 2
        ok &= report["verdict"] == "equivalence-negative" and report["solution"] is None
        ok &= bool(report["unstable_eigenvalues"])
    capsys.readouterr()
    criterion("AC10 unstable cross-positive L -> exit 2, no certificate, 20 instances", ok)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
