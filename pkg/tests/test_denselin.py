import numpy as np
import pytest
from hypothesis import given, strategies as st

from conik import denselin


def spd(rng, n):
    M = rng.standard_normal((n, n))
    return M @ M.T + np.eye(n)


def test_chol_identity():
    f = denselin.chol_factor(np.eye(3))
    assert f.ok and np.array_equal(f.L, np.eye(3))


def test_chol_diagonal():
    f = denselin.chol_factor(np.diag([4.0, 9.0]))
    assert np.allclose(f.L, np.diag([2.0, 3.0]), atol=0)


def test_chol_reconstructs_random_spd():
    B = spd(np.random.default_rng(0), 5)
    f = denselin.chol_factor(B)
    assert np.linalg.norm(f.L @ f.L.T - B) <= 1e-10 * np.linalg.norm(B)
    assert np.allclose(np.triu(f.L, 1), 0)


def test_chol_reports_failure_with_pivot():
    f = denselin.chol_factor(np.diag([1.0, -1.0, 2.0]))
    assert not f.ok and f.pivot == 1
    with pytest.raises(denselin.NotPositiveDefinite):
        denselin.chol_or_raise(np.diag([1.0, -1.0]))


def test_nonsymmetric_rejected():
    with pytest.raises(ValueError):
        denselin.chol_factor(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_geneig_identity_pair():
    lam, q = denselin.geneig_max(np.eye(3), np.eye(3))
    assert lam == pytest.approx(1.0, abs=1e-14)
    assert np.linalg.norm(q) == pytest.approx(1.0)


def test_geneig_diagonal():
    lam, q = denselin.geneig_max(np.diag([1.0, 4.0]), np.eye(2))
    assert lam == pytest.approx(4.0)
    assert np.allclose(np.abs(q), [0.0, 1.0])


def test_geneig_matches_explicit_inverse():
    rng = np.random.default_rng(1)
    A, B = spd(rng, 6), spd(rng, 6)
    oracle = np.max(np.linalg.eigvals(np.linalg.inv(B) @ A).real)
    lam, q = denselin.geneig_max(A, B)
    assert abs(lam - oracle) <= 1e-9 * oracle
    assert np.linalg.norm(A @ q - lam * B @ q) <= 1e-8 * np.linalg.norm(A)


def test_geneig_requires_pd_b():
    with pytest.raises(denselin.NotPositiveDefinite):
        denselin.geneig_max(np.eye(2), np.diag([1.0, 0.0]))


@given(st.integers(0, 10_000))
def test_geneig_congruence_invariance(seed):
    rng = np.random.default_rng(seed)
    A, B = spd(rng, 4) - 2 * np.eye(4), spd(rng, 4)
    C = rng.standard_normal((4, 4)) + 3 * np.eye(4)
    l1, _ = denselin.geneig_max(A, B)
    l2, _ = denselin.geneig_max(C.T @ A @ C, C.T @ B @ C)
    assert abs(l1 - l2) <= 1e-8 * max(1.0, abs(l1))


def test_min_eig_diff_examples():
    assert denselin.min_eig_diff(np.zeros((2, 2)), np.eye(2)) == pytest.approx(1.0)
    assert denselin.min_eig_diff(np.eye(2), np.diag([2.0, 0.5])) == pytest.approx(-0.5)


def test_min_eig_diff_matches_eigendecomposition():
    rng = np.random.default_rng(2)
    A, B = spd(rng, 5), spd(rng, 5)
    assert denselin.min_eig_diff(A, B) == pytest.approx(np.linalg.eigvalsh(B - A)[0], rel=1e-12)


def test_min_eig_diff_dimension_mismatch():
    with pytest.raises(ValueError):
        denselin.min_eig_diff(np.eye(2), np.eye(3))


def test_sqrt_and_inverse_helpers():
    B = spd(np.random.default_rng(3), 4)
    R = denselin.sym_sqrt(B)
    assert np.allclose(R @ R, B)
    Ri = denselin.sym_invsqrt(B)
    assert np.allclose(Ri @ B @ Ri, np.eye(4))
    assert np.allclose(denselin.spd_inv(B) @ B, np.eye(4))
    b = np.arange(4.0)
    assert np.allclose(B @ denselin.spd_solve(B, b), b)
