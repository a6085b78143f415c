import math

import numpy as np
import pytest

from conik import denselin
from conik.barrier import BarrierHandle
from conik.cones import PSD, Exp, Orthant, svec
from conik.duality import (
    _newton_conj, dual_hessian, is_central, make_pair, pair_from_shadow, shadow_dual, shadow_primal,
)
from conik.worstcase import worstcase_orthant
from conftest import all_cones, barrier, rel


def psd_leq(A, B, tol=1e-8):
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2))
    return denselin.min_eig_diff(A, B) >= -tol * scale


def test_shadow_dual_examples():
    assert np.allclose(shadow_dual(Orthant(2), np.array([1.0, 2.0])), [1.0, 0.5])
    assert np.allclose(shadow_dual(PSD(2), svec(2 * np.eye(2))), svec(0.5 * np.eye(2)))
    rng = np.random.default_rng(0)
    cone = Exp(1)
    for _ in range(20):
        assert cone.dual_contains(shadow_dual(cone, cone.random_interior(rng))).inside


def test_shadow_primal_orthant():
    assert np.allclose(shadow_primal(Orthant(2), np.array([3.0, 1.0])), [1 / 3, 1.0])


def test_shadow_primal_rejects_exterior():
    with pytest.raises(ValueError):
        shadow_primal(Orthant(2), np.array([1.0, -1.0]))


def test_round_trips(cone):
    F = barrier(cone)
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = cone.random_interior(rng)
        s = shadow_dual(F, x)
        assert rel(shadow_primal(F, s), x) <= 1e-9
        assert rel(shadow_dual(F, shadow_primal(F, s)), s) <= 1e-9


def test_exp_newton_residual_and_closed_form():
    cone = Exp(1)
    s = np.array([1.0, 1.0, -1.0])
    z = _newton_conj(cone, s)
    F = BarrierHandle(cone)
    assert np.linalg.norm(F.grad(z) + s) <= 1e-9
    assert np.allclose(z, cone.conj_shadow(s), rtol=1e-10)


def test_dual_hessian_examples(cone):
    assert np.allclose(dual_hessian(Orthant(2), np.array([3.0, 1.0])), np.diag([1 / 9, 1.0]))
    F = barrier(cone)
    rng = np.random.default_rng(2)
    x = cone.random_interior(rng)
    Hs = dual_hessian(F, shadow_dual(F, x))
    assert rel(Hs @ F.hess(x), np.eye(cone.dim)) <= 1e-8


def test_make_pair_orthant():
    p = make_pair(Orthant(2), np.array([1.0, 2.0]), np.array([3.0, 1.0]))
    assert p.mu == pytest.approx(2.5)
    assert p.mu_tilde == pytest.approx(5 / 12)
    assert p.mu * p.mu_tilde == pytest.approx(25 / 24)
    assert not is_central(p)


def test_make_pair_psd():
    p = make_pair(PSD(2), svec(np.eye(2)), svec(np.diag([1.0, 4.0])))
    assert p.mu == pytest.approx(2.5)
    assert p.mu_tilde == pytest.approx(0.625)


def test_central_pairs(cone):
    F = barrier(cone)
    rng = np.random.default_rng(3)
    x = cone.random_interior(rng)
    p = make_pair(F, x, -1.7 * F.grad(x))
    assert p.mu * p.mu_tilde == pytest.approx(1.0, abs=1e-9)
    assert is_central(p)
    # x = mu x~ built from s
    s = -F.grad(cone.random_interior(rng))
    q = make_pair(F, 3.0 * shadow_primal(F, s), s)
    assert is_central(q)


def test_worstcase_pair_not_central():
    s = np.ones(3)
    x = worstcase_orthant(3, s, 1, 1.0)
    assert not is_central(make_pair(Orthant(3), x, s))


def test_gradient_pairing_vs_local_norm(cone):
    F = barrier(cone)
    rng = np.random.default_rng(4)
    th = math.sqrt(cone.theta)
    for _ in range(20):
        x, u = cone.random_interior(rng), cone.random_interior(rng)
        a = -F.grad(x) @ u
        n = math.sqrt(u @ F.hess(x) @ u)
        assert a <= th * n * (1 + 1e-10)
        assert n <= a * (1 + 1e-10)


def test_hessian_shadow_sandwich(cone):
    F = barrier(cone)
    rng = np.random.default_rng(5)
    th = cone.theta
    for _ in range(10):
        p = pair_from_shadow(F, cone.random_interior(rng), cone.random_interior(rng))
        assert psd_leq(p.hess_xs / (4 * th**2 * p.mu**2), p.hess_x)
        assert psd_leq(p.hess_x, 4 * th**2 * p.mu_tilde**2 * p.hess_xs)
