import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conik import denselin
from conik.barrier import (
    BarrierHandle, check_loghom, check_negative_curvature, check_selfconcordance, eval_barrier,
    fd_gradient, fd_hessian, local_norm, third_derivative,
)
from conik.cones import PSD, DomainError, Exp, Orthant, svec, toeplitz_slice
from conftest import NEG_CURV, all_cones, barrier


def psd_leq(A, B, tol=1e-8):
    """A <= B up to a tolerance relative to the larger operand."""
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), 1e-300)
    return denselin.min_eig_diff(A, B) >= -tol * scale


def test_orthant_unit_point():
    ev = eval_barrier(BarrierHandle(Orthant(2)), np.ones(2))
    assert ev.value == 0.0
    assert np.array_equal(ev.gradient, [-1.0, -1.0])
    assert np.array_equal(ev.hessian, np.eye(2))


def test_orthant_fd_oracle():
    F = BarrierHandle(Orthant(2))
    x = np.array([2.0, 4.0])
    ev = F.eval(x)
    assert np.allclose(ev.gradient, [-0.5, -0.25])
    assert np.allclose(ev.hessian, np.diag([0.25, 0.0625]))
    assert np.allclose(fd_gradient(F, x, 1e-5), ev.gradient, atol=1e-6)
    assert np.allclose(fd_hessian(F, x, 1e-5), ev.hessian, atol=1e-6)


def test_psd_identity():
    ev = eval_barrier(PSD(2), svec(np.eye(2)))
    assert ev.value == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(ev.gradient, -svec(np.eye(2)))
    assert np.allclose(ev.hessian, np.eye(3))


def test_domain_error():
    with pytest.raises(DomainError):
        eval_barrier(Orthant(2), np.array([1.0, -1.0]))
    with pytest.raises(DomainError):
        eval_barrier(Exp(1), np.array([1.0, 1.0, 1.0]))


def test_local_norm_examples():
    F = BarrierHandle(Orthant(2))
    assert local_norm(F, np.ones(2), np.array([1.0, 0.0])) == 1.0
    x = np.array([2.0, 4.0])
    assert local_norm(F, x, x) == pytest.approx(math.sqrt(2.0))
    E = BarrierHandle(Exp(1))
    rng = np.random.default_rng(0)
    x = E.cone.random_interior(rng)
    h = rng.standard_normal(3)
    assert local_norm(E, x, h) == pytest.approx(math.sqrt(h @ E.hess(x) @ h))


def test_fd_derivatives_every_cone(cone):
    F = barrier(cone)
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = cone.random_interior(rng, 0.5)
        ev = F.eval(x)
        step = 1e-6 * np.linalg.norm(x)
        g = fd_gradient(F, x, step)
        H = fd_hessian(F, x, step)
        assert np.linalg.norm(g - ev.gradient) <= 1e-6 * max(1.0, np.linalg.norm(ev.gradient))
        assert np.linalg.norm(H - ev.hessian) <= 1e-6 * max(1.0, np.linalg.norm(ev.hessian))


def test_loghom_every_cone(cone):
    F = barrier(cone)
    rng = np.random.default_rng(2)
    for _ in range(10):
        rep = check_loghom(F, cone.random_interior(rng), tol=1e-9)
        assert rep.passed, rep.residuals


def test_loghom_orthant_exact():
    rep = check_loghom(Orthant(3), np.array([0.5, 2.0, 7.0]))
    assert rep.residuals["inner"] == 0.0


@given(st.integers(0, 10_000), st.sampled_from([0.5, 2.0, 10.0]))
def test_homogeneity(seed, t):
    rng = np.random.default_rng(seed)
    for cone in all_cones().values():
        F = barrier(cone)
        x = cone.random_interior(rng, 0.5)
        a, b = F.eval(x), F.eval(t * x)
        assert b.value == pytest.approx(a.value - cone.theta * math.log(t), rel=1e-9, abs=1e-9)
        assert np.allclose(b.gradient, a.gradient / t, rtol=1e-9, atol=1e-12 * np.abs(a.gradient).max())
        assert np.allclose(b.hessian, a.hessian / t**2, rtol=1e-8, atol=1e-12 * np.abs(a.hessian).max())


@given(st.integers(0, 10_000))
def test_dikin_containment(seed):
    rng = np.random.default_rng(seed)
    for cone in all_cones().values():
        F = barrier(cone)
        x = cone.random_interior(rng)
        h = rng.standard_normal(cone.dim)
        h *= (1 - 1e-6) / local_norm(F, x, h)
        assert cone.contains(x - h).inside
        assert cone.sigma(x, h) <= 1.0


@given(st.integers(0, 10_000), st.floats(0.05, 0.95))
def test_hessian_variation(seed, r):
    rng = np.random.default_rng(seed)
    for cone in all_cones().values():
        F = barrier(cone)
        x = cone.random_interior(rng)
        h = rng.standard_normal(cone.dim)
        y = x + r * h / local_norm(F, x, h)
        Hx, Hy = F.hess(x), F.hess(y)
        assert psd_leq((1 - r) ** 2 * Hx, Hy)
        assert psd_leq(Hy, Hx / (1 - r) ** 2)


@pytest.mark.parametrize("name", NEG_CURV)
def test_negative_curvature_sandwiches(name):
    cone = all_cones()[name]
    F = barrier(cone)
    rng = np.random.default_rng(3)
    for _ in range(30):
        x, y = cone.random_interior(rng), cone.random_interior(rng)
        a, b = cone.sigma(x, y - x), cone.sigma(x, x - y)
        Hx, Hy = F.hess(x), F.hess(y)
        assert psd_leq(Hx / (1 + a) ** 2, Hy)
        assert psd_leq(Hy, Hx / (1 - b) ** 2)
        d = y - x
        nd = d @ Hx @ d
        inner = (F.grad(y) - F.grad(x)) @ d
        assert nd / (1 + a) <= inner * (1 + 1e-8) + 1e-12
        assert inner <= nd / (1 - b) * (1 + 1e-8) + 1e-12


@pytest.mark.parametrize("name", NEG_CURV)
def test_hessian_monotone_along_cone(name):
    cone = all_cones()[name]
    F = barrier(cone)
    rng = np.random.default_rng(4)
    for _ in range(30):
        x = cone.random_interior(rng)
        y = x + cone.random_interior(rng)
        assert denselin.min_eig_diff(F.hess(y), F.hess(x)) >= -1e-9 * np.linalg.norm(F.hess(x), 2)


def test_orthant_third_derivative():
    x = np.array([2.0, 3.0])
    D = third_derivative(Orthant(2), x, np.array([1.0, 0.0]))
    assert np.allclose(D, np.diag([-2 / 8.0, 0.0]), atol=1e-8)
    rep = check_negative_curvature(Orthant(2), x, np.array([1.0, 0.0]))
    assert rep.passed and rep.residuals["max_eig"] <= 0


def test_negative_curvature_lmi():
    cone = toeplitz_slice(4)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = cone.random_interior(rng)
        u = cone.random_interior(rng)
        assert check_negative_curvature(cone, x, u).passed


def test_negative_curvature_rejects_u_outside():
    with pytest.raises(ValueError):
        check_negative_curvature(Orthant(2), np.ones(2), np.array([1.0, -1.0]))


def test_exp_barrier_lacks_negative_curvature():
    # counterexample found by sampling; the oracle is exact symbolic differentiation
    sp = pytest.importorskip("sympy")
    x = np.array([0.37308942, 0.60929724, -1.12093547])
    u = np.array([16.5035725, 1.00882009, 1.92384634])
    assert Exp(1).contains(u).inside
    z = sp.symbols("z1:4")
    F = -sp.log(z[1] * sp.log(z[0] / z[1]) - z[2]) - sp.log(z[0]) - sp.log(z[1])
    at = dict(zip(z, [sp.Rational(str(v)) for v in x]))
    D = np.array([[float(sum(sp.diff(F, z[i], z[j], z[k]).subs(at).evalf(40) * sp.Rational(str(u[k]))
                             for k in range(3))) for j in range(3)] for i in range(3)])
    exact = np.linalg.eigvalsh(D)[-1]
    assert exact > 0.1
    rep = check_negative_curvature(Exp(1), x, u)
    assert not rep.passed
    assert rep.residuals["max_eig"] == pytest.approx(exact, rel=1e-5)
    assert Exp(1).negative_curvature is False


def test_selfconcordance_orthant_equality_direction():
    rep = check_selfconcordance(Orthant(2), np.ones(2), np.array([1.0, 0.0]))
    assert rep.passed


def test_selfconcordance_psd_random():
    cone = PSD(2)
    rng = np.random.default_rng(6)
    for _ in range(10):
        x = cone.random_interior(rng)
        h = rng.standard_normal(3)
        assert check_selfconcordance(cone, x, h, tol=1e-5).passed


def test_selfconcordance_scale_invariant():
    cone = PSD(3)
    rng = np.random.default_rng(7)
    x = cone.random_interior(rng)
    h = rng.standard_normal(6)
    a = check_selfconcordance(cone, x, h).residuals["normalized"]
    b = check_selfconcordance(cone, 10 * x, 10 * h).residuals["normalized"]
    assert a == pytest.approx(b, abs=1e-6)


def test_selfconcordance_every_cone(cone):
    rng = np.random.default_rng(8)
    for _ in range(5):
        x = cone.random_interior(rng, 0.5)
        assert check_selfconcordance(cone, x, rng.standard_normal(cone.dim)).passed
