"""Conjugate barrier machinery: shadows, dual Hessians and primal-dual pairs."""

import math
from dataclasses import dataclass

import numpy as np

from conik import denselin
from conik.barrier import as_barrier
from conik.cones import Product


class ShadowNotConverged(RuntimeError):
    def __init__(self, residual, iterations):
        super().__init__(f"conjugate Newton solve stalled after {iterations} "
                         f"iterations (residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


NEWTON_TOL = 1e-11
NEWTON_MAXITER = 200


def shadow_dual(F, x):
    """``s~ = -F'(x)``, always interior to K*."""
    return -as_barrier(F).grad(x)


def _newton_conj(cone, s, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER, start=None):
    """Solve F'(z) = -s by damped Newton on <s, z> + F(z)."""
    x_ref = cone.interior_point() if start is None else start
    z = cone.theta * x_ref / float(s @ x_ref)
    lam = math.inf
    for it in range(maxiter):
        _, g, H = cone._barrier(z)
        r = s + g
        # Jacobi equilibration keeps Cholesky alive on badly scaled Hessians
        d = 1.0 / np.sqrt(np.diag(H))
        Hd = d[:, None] * H * d[None, :]
        try:
            dz = -d * denselin.spd_solve(Hd, d * r)
        except denselin.NotPositiveDefinite:
            # definite only in exact arithmetic; fall back to a least-squares step
            dz = -d * np.linalg.lstsq(Hd, d * r, rcond=None)[0]
        lam = math.sqrt(max(-float(r @ dz), 0.0))
        if lam <= tol:
            return z
        if lam >= 0.25:
            # Dikin norm of the step stays below min(lam/(1+lam), 0.9) < 1
            step = min(1.0 / (1.0 + lam), 0.9 / lam)
        else:
            step = 1.0
        z = z + step * dz
    # final quadratic-convergence polish can stall at rounding level
    if lam <= 1e3 * tol:
        return z
    raise ShadowNotConverged(lam, maxiter)


def shadow_primal(F, s, start=None):
    """``x~ = -F_*'(s)``: closed form where available, else Newton.

    ``start`` is an optional interior warm start for the Newton solve.
    """
    cone = as_barrier(F).cone
    s = np.asarray(s, dtype=float)
    if cone.cheap_dual_oracle:
        cone.require_dual_interior(s)
    # otherwise convergence of the Newton solve certifies interiority
    return _shadow_primal(cone, s, start)


def _shadow_primal(cone, s, start=None):
    closed = cone.conj_shadow(s)
    if closed is not None:
        return closed
    if isinstance(cone, Product) and len(cone.parts) > 1:
        starts = [None] * len(cone.parts) if start is None else cone.split(start)
        return np.concatenate([_shadow_primal(p, si, st)
                               for p, si, st in zip(cone.parts, cone.split(s), starts)])
    return _newton_conj(cone, s, start=start)


def dual_hessian(F, s):
    """``F_*''(s) = F''(x~)^{-1}``."""
    F = as_barrier(F)
    xt = shadow_primal(F, s)
    return denselin.spd_inv(F.hess(xt))


@dataclass(frozen=True, eq=False)
class PrimalDualPair:
    """Interior primal-dual pair with cached shadows and Hessians."""

    F: object
    x: np.ndarray
    s: np.ndarray
    x_shadow: np.ndarray
    s_shadow: np.ndarray
    hess_x: np.ndarray
    hess_xs: np.ndarray  # F''(x~) = F_*''(s)^{-1}
    mu: float
    mu_tilde: float

    @property
    def theta(self):
        return self.F.theta

    @property
    def cone(self):
        return self.F.cone

    @property
    def gap(self):
        return float(self.s @ self.x)


def make_pair(F, x, s, x_shadow=None, check=True):
    """Build a :class:`PrimalDualPair`.

    ``x_shadow`` may be passed when ``s`` was generated as ``-F'(z)``; the
    shadow is then ``z`` and no conjugate solve is needed.
    """
    F = as_barrier(F)
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    ev = F.eval(x, check=check)
    if x_shadow is None:
        x_shadow = shadow_primal(F, s) if check else _shadow_primal(F.cone, s)
    else:
        x_shadow = np.asarray(x_shadow, dtype=float)
    hess_xs = F.eval(x_shadow, check=check).hessian
    theta = F.theta
    mu = float(s @ x) / theta
    mu_tilde = float(-ev.gradient @ x_shadow) / theta
    if mu <= 0:
        raise ValueError("<s, x> must be positive")
    if mu * mu_tilde < 1.0 - 1e-12 * max(1.0, mu * mu_tilde) - 1e-12:
        raise ArithmeticError(f"mu*mu~ = {mu * mu_tilde!r} < 1 contradicts convexity")
    return PrimalDualPair(F, x, s, x_shadow, -ev.gradient, ev.hessian, hess_xs, mu, mu_tilde)


def pair_from_shadow(F, x, z):
    """Pair (x, s) with ``s = -F'(z)``, so ``x~ = z`` exactly."""
    F = as_barrier(F)
    return make_pair(F, x, -F.grad(z), x_shadow=z)


def is_central(pair, tol=1e-9):
    return pair.mu * pair.mu_tilde - 1.0 <= tol
