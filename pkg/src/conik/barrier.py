"""Barrier handles, local norms and numerical identity checks."""

import math
from dataclasses import dataclass, field

import numpy as np

from conik import denselin
from conik.cones import INTERIOR_TOL, Cone


@dataclass(frozen=True)
class BarrierEval:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray


@dataclass(frozen=True, eq=False)
class BarrierHandle:
    """A theta-logarithmically homogeneous self-concordant barrier for ``cone``."""

    cone: Cone

    @property
    def theta(self):
        return self.cone.theta

    @property
    def dim(self):
        return self.cone.dim

    def eval(self, x, check=True):
        x = np.asarray(x, dtype=float)
        if check:
            self.cone.require_interior(self.cone._check_dim(x))
        v, g, H = self.cone._barrier(x)
        return BarrierEval(v, g, H)

    def value(self, x):
        return self.eval(x).value

    def grad(self, x):
        return self.eval(x).gradient

    def hess(self, x):
        return self.eval(x).hessian


def as_barrier(F):
    return F if isinstance(F, BarrierHandle) else BarrierHandle(F)


def eval_barrier(F, x):
    return as_barrier(F).eval(x)


def local_norm(F, x, h):
    """``sqrt(<F''(x) h, h>)``."""
    H = as_barrier(F).hess(x)
    h = np.asarray(h, dtype=float)
    return math.sqrt(max(float(h @ H @ h), 0.0))


@dataclass
class CheckReport:
    name: str
    passed: bool
    residuals: dict
    tol: float
    detail: dict = field(default_factory=dict)


def check_loghom(F, x, tol=1e-9):
    """Residuals of <F'(x), x> = -theta and F''(x) x = -F'(x)."""
    F = as_barrier(F)
    ev = F.eval(x)
    x = np.asarray(x, dtype=float)
    r1 = abs(float(ev.gradient @ x) + F.theta)
    r2 = float(np.linalg.norm(ev.hessian @ x + ev.gradient))
    scale = max(1.0, F.theta)
    return CheckReport("loghom", r1 <= tol * scale and r2 <= tol * scale,
                       {"inner": r1, "hessian": r2}, tol * scale)


def third_derivative(F, x, u, step=None):
    """Central-difference approximation of F'''(x; u) = d/da F''(x + a u).

    The default step is 1e-4 in the local norm of ``u`` so both probe points
    stay well inside the Dikin ellipsoid.
    """
    F = as_barrier(F)
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if step is None:
        nu = local_norm(F, x, u)
        if nu == 0.0:
            return np.zeros((F.dim, F.dim))
        step = 1e-4 / nu
    Hp = F.hess(x + step * u)
    Hm = F.hess(x - step * u)
    return denselin.symmetrize((Hp - Hm) / (2.0 * step))


def check_negative_curvature(F, x, u, step=None, tol=None):
    """Evidence for concavity of <F'(.), u> at ``x``: max eig of F'''(x;u) <= tol."""
    F = as_barrier(F)
    if not F.cone.contains(u).inside:
        raise ValueError("direction u must lie in the cone")
    D = third_derivative(F, x, u, step)
    if tol is None:
        tol = 1e-5 * float(np.linalg.norm(F.hess(x), 2))
    lam = float(np.linalg.eigvalsh(D)[-1])
    return CheckReport("negative_curvature", lam <= tol, {"max_eig": lam}, tol,
                       {"third": D})


def check_selfconcordance(F, x, h, step=None, tol=1e-5):
    """F'''(x;h) <= 2 ||h||_x F''(x), measured after whitening by F''(x).

    The normalized residual lam_max(F''^{-1} F'''(x;h)) - 2||h||_x is invariant
    under (x, h) -> (t x, t h).
    """
    F = as_barrier(F)
    H = F.hess(x)
    D = third_derivative(F, x, h, step)
    nh = local_norm(F, x, h)
    lam, _ = denselin.geneig_max(D, H)
    resid = lam - 2.0 * nh
    raw = float(np.linalg.eigvalsh(D - 2.0 * nh * H)[-1])
    return CheckReport("selfconcordance", resid <= tol,
                       {"normalized": resid, "max_eig": raw}, tol)


def fd_gradient(F, x, step=1e-6):
    """Central differences of the barrier value (test oracle)."""
    F = as_barrier(F)
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (F.eval(x + e, check=False).value - F.eval(x - e, check=False).value) / (2 * step)
    return g


def fd_hessian(F, x, step=1e-6):
    """Central differences of the analytic gradient (test oracle)."""
    F = as_barrier(F)
    x = np.asarray(x, dtype=float)
    n = len(x)
    H = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        H[:, i] = (F.eval(x + e, check=False).gradient - F.eval(x - e, check=False).gradient) / (2 * step)
    return denselin.symmetrize(H)


def is_interior(F, x, tol=INTERIOR_TOL):
    return as_barrier(F).cone.contains(x, tol).verdict == "interior"
