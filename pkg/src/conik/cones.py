"""Cone catalog: membership oracles, Minkowski gauges and barrier formulas.

Every cone exposes the same small surface:

* ``contains`` / ``dual_contains`` return a :class:`Membership` with a signed
  margin (positive inside, zero on the boundary, negative outside);
* ``gauge`` computes ``sigma_x(h) = inf{beta >= 0 : beta*x - h in K}``;
* ``_barrier`` returns value, gradient and Hessian of the standard
  logarithmically homogeneous barrier at an interior point.

PSD matrices are stored in scaled symmetric vectorization (off-diagonal
entries multiplied by sqrt(2)) so the Euclidean inner product of
coordinates equals the trace inner product.
"""

import math
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.special

from conik import denselin

INTERIOR_TOL = 1e-10
_SQRT2 = math.sqrt(2.0)

# Central point of the exponential cone barrier (x = -F'(x)).
_EXP_CENTER = np.array([1.2909281374, 0.8051020015, -0.8278383990])


class DomainError(ValueError):
    """A barrier was evaluated at a point that is not interior to the cone."""

    def __init__(self, constraint, margin):
        super().__init__(f"point is not interior: {constraint} (margin {margin:.3e})")
        self.constraint = constraint
        self.margin = margin


class UnsupportedKind(ValueError):
    pass


class Membership(NamedTuple):
    verdict: str  # "interior", "boundary" or "outside"
    margin: float

    @property
    def inside(self):
        return self.verdict != "outside"


class GaugeResult(NamedTuple):
    sigma: float
    boundary_point: np.ndarray


def _verdict(margin, tol):
    if margin > tol:
        return Membership("interior", float(margin))
    if margin >= -tol:
        return Membership("boundary", float(margin))
    return Membership("outside", float(margin))


def _bisect_gauge(margin_fn, x, h, rtol=0.0):
    """Generic gauge by bisection on beta using a membership margin.

    With ``rtol = 0`` the bracket shrinks until its ends are adjacent floats;
    the proximity identities divide by 1 - sigma and need the last digits.
    """
    if margin_fn(-h) >= 0.0:
        return 0.0
    hi = max(np.linalg.norm(h) / max(margin_fn(x), 1e-300), 1e-8)
    hi = min(hi, 1e12)
    while margin_fn(hi * x - h) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise FloatingPointError("gauge bracket diverged")
    lo = 0.0
    while hi - lo > rtol * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if margin_fn(mid * x - h) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


class Cone:
    """Base class; concrete cones override the underscore hooks."""

    kind = "cone"
    symmetric = False  # admits a Nesterov-Todd scaling point
    optimal = False  # optimal self-scaled barrier (barrier weights all one)
    negative_curvature = False
    cheap_dual_oracle = True
    dim: int
    theta: float

    # ---- membership -------------------------------------------------
    def _margin(self, x):
        raise NotImplementedError

    def _dual_margin(self, s):
        raise NotImplementedError

    def _check_dim(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {x.shape}")
        return x

    def contains(self, x, tol=INTERIOR_TOL):
        return _verdict(self._margin(self._check_dim(x)), tol)

    def dual_contains(self, s, tol=INTERIOR_TOL):
        return _verdict(self._dual_margin(self._check_dim(s)), tol)

    def require_interior(self, x, tol=INTERIOR_TOL):
        m = self.contains(x, tol)
        if m.verdict != "interior":
            raise DomainError(f"{self.kind} membership", m.margin)

    def require_dual_interior(self, s, tol=INTERIOR_TOL):
        m = self.dual_contains(s, tol)
        if m.verdict != "interior":
            raise DomainError(f"dual {self.kind} membership", m.margin)

    # ---- gauges -----------------------------------------------------
    def _gauge_closed(self, x, h):
        return None

    def gauge_bisect(self, x, h):
        return _bisect_gauge(self._margin, x, h)

    def gauge(self, x, h):
        x = self._check_dim(x)
        h = self._check_dim(h)
        sigma = self._gauge_closed(x, h)
        if sigma is None:
            sigma = self.gauge_bisect(x, h)
        sigma = max(float(sigma), 0.0)
        return GaugeResult(sigma, sigma * x - h)

    def sigma(self, x, h):
        return self.gauge(x, h).sigma

    def minkowski_norm(self, x, h):
        return max(self.sigma(x, h), self.sigma(x, -np.asarray(h)))

    def _dual_gauge_closed(self, s, h):
        return None

    def dual_gauge(self, s, h):
        """Gauge of the dual cone, used for dual step lengths."""
        s = self._check_dim(s)
        h = self._check_dim(h)
        sigma = self._dual_gauge_closed(s, h)
        if sigma is None:
            sigma = _bisect_gauge(self._dual_margin, s, h)
        return max(float(sigma), 0.0)

    # ---- barrier ----------------------------------------------------
    def _barrier(self, x):
        raise NotImplementedError

    def conj_shadow(self, s):
        """Closed-form ``-F_*'(s)`` or None when a Newton solve is needed."""
        return None

    def nt_point(self, x, s):
        raise UnsupportedKind(
            f"no Nesterov-Todd scaling point for cone kind {self.kind!r}; "
            "use the integral scaling"
        )

    # ---- sampling & bookkeeping -------------------------------------
    def interior_point(self):
        raise NotImplementedError

    def random_interior(self, rng, spread=1.0):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"

    def __eq__(self, other):
        return isinstance(other, Cone) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))


class Orthant(Cone):
    kind = "orthant"
    symmetric = True
    optimal = True
    negative_curvature = True

    def __init__(self, n):
        if n < 1:
            raise ValueError("orthant dimension must be positive")
        self.n = self.dim = int(n)
        self.weights = np.ones(self.n)
        self.theta = float(self.n)

    def _margin(self, x):
        return float(np.min(x))

    _dual_margin = _margin

    def _gauge_closed(self, x, h):
        return max(float(np.max(h / x)), 0.0)

    _dual_gauge_closed = _gauge_closed

    def _barrier(self, x):
        c = self.weights
        return (-float(np.sum(c * np.log(x))), -c / x, np.diag(c / x**2))

    def conj_shadow(self, s):
        return self.weights / s

    def nt_point(self, x, s):
        return np.sqrt(self.weights * x / s)

    def interior_point(self):
        return np.ones(self.n)

    def random_interior(self, rng, spread=1.0):
        return np.exp(spread * rng.standard_normal(self.n))

    def to_json(self):
        return {"kind": "orthant", "n": self.n}


class WeightedOrthant(Orthant):
    """The orthant with barrier ``-sum c_i ln x_i``, ``c_i >= 1``."""

    kind = "weighted_orthant"

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 1 or len(weights) == 0 or np.any(weights < 1.0):
            raise ValueError("weights must be a nonempty list of values >= 1")
        self.n = self.dim = len(weights)
        self.weights = weights
        self.theta = float(np.sum(weights))
        self.optimal = bool(np.all(weights == 1.0))

    def to_json(self):
        return {"kind": "weighted_orthant", "weights": [float(c) for c in self.weights]}


# ---------------------------------------------------------------------------
# positive semidefinite cone


def _svec_index(m):
    iu = np.triu_indices(m)
    scale = np.where(iu[0] == iu[1], 1.0, _SQRT2)
    return iu, scale


def svec(M):
    M = np.asarray(M, dtype=float)
    iu, scale = _svec_index(M.shape[0])
    return M[iu] * scale


def smat(v):
    v = np.asarray(v, dtype=float)
    m = int(round((math.sqrt(8 * len(v) + 1) - 1) / 2))
    iu, scale = _svec_index(m)
    M = np.zeros((m, m))
    M[iu] = v / scale
    M.T[iu] = v / scale
    return M


class PSD(Cone):
    kind = "psd"
    symmetric = True
    optimal = True
    negative_curvature = True

    def __init__(self, m):
        if m < 1:
            raise ValueError("matrix size must be positive")
        self.m = int(m)
        self.dim = self.m * (self.m + 1) // 2
        self.theta = float(self.m)
        # columns are vec(E_k) for the orthonormal basis E_k of S^m
        U = np.zeros((self.m * self.m, self.dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = 1.0
            U[:, k] = smat(e).ravel()
        self._U = U

    def _margin(self, x):
        return float(np.linalg.eigvalsh(smat(x))[0])

    _dual_margin = _margin

    def _gauge_closed(self, x, h):
        lam, _ = denselin.geneig_max(smat(h), smat(x))
        return max(lam, 0.0)

    _dual_gauge_closed = _gauge_closed

    def hess_op(self, Xinv):
        return self._U.T @ np.kron(Xinv, Xinv) @ self._U

    def _barrier(self, x):
        X = smat(x)
        L = denselin.chol_or_raise(X)
        Xinv = denselin.spd_inv(X)
        val = -2.0 * float(np.sum(np.log(np.diag(L))))
        return val, -svec(Xinv), denselin.symmetrize(self.hess_op(Xinv))

    def conj_shadow(self, s):
        return svec(denselin.spd_inv(smat(s)))

    def nt_point(self, x, s):
        X, S = smat(x), smat(s)
        Xh = denselin.sym_sqrt(X)
        mid = denselin.sym_invsqrt(Xh @ S @ Xh)
        return svec(denselin.symmetrize(Xh @ mid @ Xh))

    def interior_point(self):
        return svec(np.eye(self.m))

    def random_interior(self, rng, spread=1.0):
        Q, _ = np.linalg.qr(rng.standard_normal((self.m, self.m)))
        lam = np.exp(spread * rng.standard_normal(self.m))
        return svec(denselin.symmetrize((Q * lam) @ Q.T))

    def to_json(self):
        return {"kind": "psd", "m": self.m}


# ---------------------------------------------------------------------------
# single-block cones used inside products


class SOCBlock(Cone):
    """Second-order cone {(y, t) : ||y|| <= t} with y in R^p, coordinates (y, t)."""

    kind = "soc_block"
    symmetric = True
    optimal = True
    negative_curvature = True

    def __init__(self, p):
        if p < 1:
            raise ValueError("soc block width must be positive")
        self.p = int(p)
        self.dim = self.p + 1
        self.theta = 2.0
        self._J = np.diag(np.r_[-np.ones(self.p), 1.0])

    def _margin(self, x):
        return float(x[-1] - np.linalg.norm(x[:-1]))

    _dual_margin = _margin

    def _gauge_closed(self, x, h):
        y, t = x[:-1], x[-1]
        hy, ht = h[:-1], h[-1]
        a = t * t - y @ y
        c0 = (t * ht - y @ hy) / a
        # shift h by c0*x first: the discriminant is invariant but no longer cancels
        r = h - c0 * x
        disc = max(-a * (r[-1] ** 2 - r[:-1] @ r[:-1]), 0.0)
        return max(c0 + math.sqrt(disc) / a, 0.0)

    _dual_gauge_closed = _gauge_closed

    def _barrier(self, x):
        d = float(x @ self._J @ x)
        g = -2.0 * (self._J @ x) / d
        H = -2.0 * self._J / d + np.outer(g, g)
        return -math.log(d), g, H

    def conj_shadow(self, s):
        d = float(s @ self._J @ s)
        return 2.0 * (self._J @ s) / d

    # Jordan-algebra helpers for the NT point
    def _spectral(self, x):
        y, t = x[:-1], x[-1]
        ny = np.linalg.norm(y)
        u = y / ny if ny > 0 else np.r_[1.0, np.zeros(self.p - 1)]
        c1 = 0.5 * np.r_[u, 1.0]
        c2 = 0.5 * np.r_[-u, 1.0]
        return (t + ny, c1), (t - ny, c2)

    def _power(self, x, a):
        (l1, c1), (l2, c2) = self._spectral(x)
        return l1**a * c1 + l2**a * c2

    def _quad_rep(self, x):
        return 2.0 * np.outer(x, x) - float(x @ self._J @ x) * self._J

    def nt_point(self, x, s):
        ph = self._quad_rep(self._power(x, 0.5))
        return ph @ self._power(ph @ (0.5 * s), -0.5)

    def interior_point(self):
        return np.r_[np.zeros(self.p), 1.0]

    def random_interior(self, rng, spread=1.0):
        y = spread * rng.standard_normal(self.p)
        t = np.linalg.norm(y) + np.exp(spread * rng.standard_normal())
        return np.r_[y, t] * np.exp(spread * rng.standard_normal())

    def to_json(self):
        return {"kind": "soc", "widths": [self.p]}


def _exp_margin(x1, x2, x3):
    if x2 > 0.0:
        if x1 <= 0.0:
            return x1 - x2
        return min(x2, x2 * math.log(x1 / x2) - x3)
    return min(x2, x1, -x3)


def _exp_dual_margin(z1, z2, z3):
    r = -z3
    if r > 0.0:
        if z1 <= 0.0:
            return z1 - r
        return min(r, r + r * math.log(z1 / r) + z2)
    return min(r, z1, z2)


class ExpBlock(Cone):
    """Exponential cone cl{x : x1 >= x2 exp(x3/x2), x2 > 0} with barrier -ln psi."""

    kind = "exp_block"
    negative_curvature = False  # fails at some interior points; see the barrier tests

    def __init__(self):
        self.dim = 3
        self.theta = 3.0

    def _margin(self, x):
        return _exp_margin(*x)

    def _dual_margin(self, s):
        return _exp_dual_margin(*s)

    def _barrier(self, x):
        x1, x2, x3 = x
        lr = math.log(x1 / x2)
        g = x2 * lr - x3
        dg = np.array([x2 / x1, lr - 1.0, -1.0])
        d2g = np.array([[-x2 / x1**2, 1.0 / x1, 0.0], [1.0 / x1, -1.0 / x2, 0.0], [0.0, 0.0, 0.0]])
        val = -math.log(x1) - math.log(x2) - math.log(g)
        grad = -np.array([1.0 / x1, 1.0 / x2, 0.0]) - dg / g
        H = np.diag([1.0 / x1**2, 1.0 / x2**2, 0.0]) + np.outer(dg, dg) / g**2 - d2g / g
        return val, grad, H

    def conj_shadow(self, s):
        # F'(x) = -s reduces to u + ln u = z, solved by the Wright omega function
        s1, s2, s3 = s
        r = -s3
        z = (s2 + 2.0 * r) / r + math.log(s1 / r)
        u = float(np.real(scipy.special.wrightomega(z)))
        um1 = u - 1.0
        x2 = 1.0 / (r * um1)
        x1 = u / (um1 * s1)
        x3 = x2 * math.log(r * u / s1) - 1.0 / r
        return np.array([x1, x2, x3])

    def interior_point(self):
        return _EXP_CENTER.copy()

    def random_interior(self, rng, spread=1.0):
        x2 = math.exp(spread * rng.standard_normal())
        x3 = spread * x2 * rng.standard_normal()
        x1 = x2 * math.exp(x3 / x2) * (1.0 + math.exp(spread * rng.standard_normal()))
        return np.array([x1, x2, x3])

    def to_json(self):
        return {"kind": "exp", "k": 1}


# ---------------------------------------------------------------------------
# LMI slices


class LMISlice(Cone):
    """K = {x : x_1 A_1 + ... + x_n A_n >= 0} with barrier -ln det."""

    kind = "lmi_slice"
    negative_curvature = True
    cheap_dual_oracle = False

    def __init__(self, mats, center=None, name=None):
        mats = np.array([denselin._as_sym(A, "A_i") for A in mats])
        if mats.ndim != 3:
            raise ValueError("mats must be a list of square matrices")
        self.mats = mats
        self.dim = len(mats)
        self.m = mats.shape[1]
        self.theta = float(self.m)
        self.name = name
        flat = mats.reshape(self.dim, -1)
        if np.linalg.matrix_rank(flat) < self.dim:
            raise ValueError("LMI matrices must be linearly independent")
        if center is None:
            center = np.linalg.lstsq(flat.T, np.eye(self.m).ravel(), rcond=None)[0]
        self.center = np.asarray(center, dtype=float)
        if self._margin(self.center) <= 0:
            raise ValueError("could not locate an interior point; pass center=")
        self._dual_ref = None

    def matrix(self, x):
        return np.tensordot(x, self.mats, axes=1)

    def _margin(self, x):
        return float(np.linalg.eigvalsh(self.matrix(x))[0])

    def _gauge_closed(self, x, h):
        lam, _ = denselin.geneig_max(self.matrix(h), self.matrix(x))
        return max(lam, 0.0)

    def _barrier(self, x):
        L = denselin.chol_or_raise(self.matrix(x))
        Linv = scipy.linalg.solve_triangular(L, np.eye(self.m), lower=True)
        B = Linv @ self.mats @ Linv.T  # L^{-1} A_i L^{-T}
        flat = B.reshape(self.dim, -1)
        val = -2.0 * float(np.sum(np.log(np.diag(L))))
        grad = -np.trace(B, axis1=1, axis2=2)
        return val, grad, denselin.symmetrize(flat @ flat.T)

    def _dual_margin(self, s):
        return _section_min(self, s)

    def interior_point(self):
        return self.center.copy()

    def random_interior(self, rng, spread=1.0):
        c = self.center
        d = spread * rng.standard_normal(self.dim) * np.linalg.norm(c)
        sig = self.sigma(c, -d)
        return c + d / (1.0 + sig) * (1.0 - 1e-3 * rng.random())

    def to_json(self):
        out = {
            "kind": "lmi_slice",
            "m": self.m,
            "mats": [[float(v) for v in A.ravel()] for A in self.mats],
            "center": [float(v) for v in self.center],
        }
        if self.name:
            out["name"] = self.name
        return out


def _section_min(cone, s, gap_tol=1e-11, max_newton=60):
    """Lower estimate of min <s, x> over {x in K : <c, x> = 1}.

    ``c`` is a fixed interior dual point, so the section is compact and the
    minimum is positive exactly when s lies in the interior of K*.  Solved by
    a short-step barrier path with equality-constrained Newton centering.
    """
    x0 = cone.interior_point()
    _, g0, _ = cone._barrier(x0)
    c = -g0
    x = x0 / (c @ x0)
    theta = cone.theta
    s_scale = max(np.linalg.norm(s), 1e-300)
    t = 1.0 / s_scale
    # Newton in the null space of c keeps iterates exactly on the section
    N = np.linalg.svd(c[None, :])[2][1:].T
    while True:
        for _ in range(max_newton):
            _, g, H = cone._barrier(x)
            Hr = N.T @ H @ N
            gr = N.T @ (t * s + g)
            dz = -np.linalg.solve(Hr, gr)
            lam = math.sqrt(max(-gr @ dz, 0.0))
            step = 1.0 / (1.0 + lam) if lam > 0.25 else 1.0
            x = x + step * (N @ dz)
            if lam < 1e-9:
                break
        if theta / t < gap_tol * s_scale * np.linalg.norm(x):
            break
        t *= 8.0
    value = float(s @ x)
    return value - theta / t


# ---------------------------------------------------------------------------
# direct sums


class Product(Cone):
    kind = "product"

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("product needs at least one part")
        self.parts = parts
        self.dim = sum(p.dim for p in parts)
        self.theta = float(sum(p.theta for p in parts))
        offsets = np.cumsum([0] + [p.dim for p in parts])
        self.slices = [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]
        self.symmetric = all(p.symmetric for p in parts)
        self.cheap_dual_oracle = all(p.cheap_dual_oracle for p in parts)
        self.optimal = all(p.optimal for p in parts)
        nc = [p.negative_curvature for p in parts]
        self.negative_curvature = True if all(v is True for v in nc) else (
            False if any(v is False for v in nc) else None
        )

    def split(self, x):
        return [x[sl] for sl in self.slices]

    def _margin(self, x):
        return min(p._margin(xi) for p, xi in zip(self.parts, self.split(x)))

    def _dual_margin(self, s):
        return min(p._dual_margin(si) for p, si in zip(self.parts, self.split(s)))

    def gauge_bisect(self, x, h):
        return max(p.gauge_bisect(xi, hi) for p, xi, hi in zip(self.parts, self.split(x), self.split(h)))

    def _gauge_closed(self, x, h):
        return max(p.gauge(xi, hi).sigma for p, xi, hi in zip(self.parts, self.split(x), self.split(h)))

    def _dual_gauge_closed(self, s, h):
        return max(p.dual_gauge(si, hi) for p, si, hi in zip(self.parts, self.split(s), self.split(h)))

    def _barrier(self, x):
        val = 0.0
        grad = np.zeros(self.dim)
        H = np.zeros((self.dim, self.dim))
        for p, sl in zip(self.parts, self.slices):
            v, g, h = p._barrier(x[sl])
            val += v
            grad[sl] = g
            H[sl, sl] = h
        return val, grad, H

    def conj_shadow(self, s):
        out = [p.conj_shadow(si) for p, si in zip(self.parts, self.split(s))]
        if any(o is None for o in out):
            return None
        return np.concatenate(out)

    def nt_point(self, x, s):
        return np.concatenate([p.nt_point(xi, si) for p, xi, si in zip(self.parts, self.split(x), self.split(s))])

    def interior_point(self):
        return np.concatenate([p.interior_point() for p in self.parts])

    def random_interior(self, rng, spread=1.0):
        return np.concatenate([p.random_interior(rng, spread) for p in self.parts])

    def to_json(self):
        return {"kind": "product", "parts": [p.to_json() for p in self.parts]}


class SOC(Product):
    """Direct sum of second-order cones with the given block widths."""

    kind = "soc"

    def __init__(self, widths):
        if isinstance(widths, int):
            widths = [widths]
        self.widths = [int(p) for p in widths]
        super().__init__([SOCBlock(p) for p in self.widths])

    def to_json(self):
        return {"kind": "soc", "widths": list(self.widths)}


class Exp(Product):
    """Direct sum of ``k`` exponential cones."""

    kind = "exp"

    def __init__(self, k=1):
        self.k = int(k)
        if self.k < 1:
            raise ValueError("need at least one exponential cone")
        super().__init__([ExpBlock() for _ in range(self.k)])

    def to_json(self):
        return {"kind": "exp", "k": self.k}


# ---------------------------------------------------------------------------
# named LMI slices


def toeplitz_slice(m, bands=None):
    """Symmetric m x m Toeplitz matrices with the first ``bands`` diagonals free.

    ``bands=None`` gives the full Toeplitz cone (m parameters).  Coordinate i
    multiplies the 0/1 pattern of the i-th diagonal pair, so coordinate 0 is
    the identity.
    """
    bands = m if bands is None else int(bands)
    if not 1 <= bands <= m:
        raise ValueError("bands must lie in 1..m")
    mats = []
    for k in range(bands):
        A = np.eye(m, k=k)
        mats.append(A + A.T if k else A)
    name = f"toeplitz:{m}" if bands == m else f"toeplitz-band:{m},{bands}"
    center = np.zeros(bands)
    center[0] = 1.0
    return LMISlice(mats, center=center, name=name)


def tridiag_toeplitz(m):
    """Banded Toeplitz slice with three free diagonals (main, first, second)."""
    cone = toeplitz_slice(m, bands=min(3, m))
    cone.name = f"toeplitz-tridiag:{m}"
    return cone


def random_lmi(n, m, seed):
    """n-parameter LMI slice with A_1 = I and random symmetric A_2..A_n."""
    rng = np.random.default_rng(seed)
    mats = [np.eye(m)]
    for _ in range(n - 1):
        B = rng.standard_normal((m, m))
        mats.append(0.5 * (B + B.T))
    center = np.zeros(n)
    center[0] = 1.0
    return LMISlice(mats, center=center, name=f"lmi-random:{n},{m},{seed}")


# ---------------------------------------------------------------------------
# spec strings and JSON


def parse_cone(spec):
    """Parse a cone spec such as ``orthant:4``, ``exp:1⊕soc:3`` or ``psd:3``.

    Grammar: ``part ( '⊕' | '+' ) part ...`` where each part is ``kind:params``:

    ========================  ===========================================
    ``orthant:n``             nonnegative orthant in R^n
    ``weighted:c1,c2,...``    orthant with barrier -sum c_i ln x_i
    ``psd:m``                 m x m PSD matrices (scaled svec coordinates)
    ``soc:p1,p2,...``         second-order cone blocks of widths p_i
    ``exp:k``                 k exponential cones
    ``toeplitz:m``            m x m PSD Toeplitz matrices (LMI slice)
    ``toeplitz-tridiag:m``    Toeplitz with main, first and second diagonals
    ``lmi-random:n,m,seed``   random n-parameter m x m LMI slice
    ========================  ===========================================
    """
    if not isinstance(spec, str) or not spec.strip():
        raise ValueError("empty cone spec")
    pieces = [p.strip() for p in spec.replace("⊕", "+").split("+")]
    parts = [_parse_part(p) for p in pieces]
    return parts[0] if len(parts) == 1 else Product(parts)


def _parse_part(token):
    kind, sep, arg = token.partition(":")
    if not sep or not arg:
        raise ValueError(f"bad cone token {token!r}: expected kind:params")
    try:
        nums = [float(a) for a in arg.split(",")]
    except ValueError:
        raise ValueError(f"bad cone token {token!r}: parameters must be numbers") from None
    ints = [int(v) for v in nums]
    builders = {
        "orthant": lambda: Orthant(ints[0]),
        "weighted": lambda: WeightedOrthant(nums),
        "psd": lambda: PSD(ints[0]),
        "soc": lambda: SOC(ints),
        "exp": lambda: Exp(ints[0]),
        "toeplitz": lambda: toeplitz_slice(ints[0]),
        "toeplitz-tridiag": lambda: tridiag_toeplitz(ints[0]),
        "lmi-random": lambda: random_lmi(*ints[:3]),
    }
    if kind not in builders:
        raise ValueError(f"bad cone token {token!r}: unknown kind {kind!r}")
    try:
        return builders[kind]()
    except (IndexError, TypeError):
        raise ValueError(f"bad cone token {token!r}: wrong number of parameters") from None


def cone_from_json(obj):
    kind = obj["kind"]
    if kind == "orthant":
        return Orthant(obj["n"])
    if kind == "weighted_orthant":
        return WeightedOrthant(obj["weights"])
    if kind == "psd":
        return PSD(obj["m"])
    if kind == "soc":
        return SOC(obj["widths"])
    if kind == "exp":
        return Exp(obj.get("k", 1))
    if kind == "lmi_slice":
        m = obj["m"]
        mats = [np.asarray(a, dtype=float).reshape(m, m) for a in obj["mats"]]
        return LMISlice(mats, center=obj.get("center"), name=obj.get("name"))
    if kind == "product":
        return Product([cone_from_json(p) for p in obj["parts"]])
    raise ValueError(f"unknown cone kind {kind!r}")
