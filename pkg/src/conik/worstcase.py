"""Worst-case primal-dual pairs for the relaxed complexity measure.

Contents: the v-space reduction for the orthant, explicit worst-case points,
the extreme-direction construction on a hyperplane slice of the cone, and
a multi-start search for the supremum of xi_check over interior pairs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from conik import denselin
from conik.barrier import as_barrier
from conik.duality import make_pair, pair_from_shadow, shadow_primal
from conik.proximity import gamma_g, gamma_inf, tau_rho
from conik.scaling import xi_check_value

CERT_TOL = 1e-7


# ---------------------------------------------------------------------------
# variational ratio


def ratio_R(pair, v):
    """<F_*''(s)^{-1} v, v> / <F''(x) v, v>."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ValueError("v must be nonzero")
    return float(v @ pair.hess_xs @ v) / float(v @ pair.hess_x @ v)


# ---------------------------------------------------------------------------
# orthant v-space problem


@dataclass(frozen=True)
class VSpaceResult:
    xi: float
    v_opt: np.ndarray
    alpha_opt: float
    value: float
    descent_value: float


def _uniform_weight_objective(n, c):
    theta = n * c

    def g(u):
        return (c * c * (1.0 + (n - 1) / u) - theta * (theta - 1.0) / (1.0 + (n - 1) * u)) / c

    return g


def vspace_xi_uniform(n, c=1.0):
    """sup of xi_check for the orthant barrier -c * sum ln x_i on R^n.

    With v_i = x_i s_i scaled so that min v = 1, the reciprocal of the
    measure is minimized over v_1..v_{n-1} >= 1; for a fixed sum the
    minimizer has equal entries u, leaving a 1-D problem in u.  A bounded
    quasi-Newton descent over all n-1 entries cross-checks the reduction.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    g = _uniform_weight_objective(n, c)
    res = scipy.optimize.minimize_scalar(g, bounds=(1.0, 1e6), method="bounded",
                                         options={"xatol": 1e-13, "maxiter": 2000})
    u = float(res.x)
    # polish: the 1-D objective is smooth, a few Newton steps on g' fix xatol limits
    for _ in range(5):
        h = 1e-5 * u
        d1 = (g(u + h) - g(u - h)) / (2 * h)
        d2 = (g(u + h) - 2 * g(u) + g(u - h)) / (h * h)
        if d2 <= 0 or u - d1 / d2 < 1.0:
            break
        u -= d1 / d2
    value = g(u)
    theta = n * c

    def full(w):
        tot = 1.0 + w.sum()
        f = (c * c * (1.0 + np.sum(1.0 / w)) - theta * (theta - 1.0) / tot) / c
        grad = (-c * c / w**2 + theta * (theta - 1.0) / tot**2) / c
        return f, grad

    rng = np.random.default_rng(n)
    w0 = 1.0 + 3.0 * rng.random(n - 1)
    d = scipy.optimize.minimize(full, w0, jac=True, method="L-BFGS-B",
                                bounds=[(1.0, None)] * (n - 1),
                                options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000})
    alpha = (1.0 + (n - 1) * u) / n
    v_opt = np.r_[np.full(n - 1, u), 1.0]
    return VSpaceResult(1.0 / value, v_opt, alpha, value, float(d.fun))


def vspace_xi_orthant(n):
    """xi_check for -sum ln x_i on R^n_+; equals rho_n."""
    return vspace_xi_uniform(n, 1.0)


def worstcase_orthant(n, s, i, mu):
    """Worst-case x paired with ``s`` (1-based coordinate ``i``)."""
    s = np.asarray(s, dtype=float)
    if len(s) != n or np.any(s <= 0):
        raise ValueError("s must be a positive vector of length n")
    if not 1 <= i <= n:
        raise ValueError("i must lie in 1..n")
    tau, _ = tau_rho(n)
    xt = 1.0 / s
    x = tau * mu * xt
    x[i - 1] = tau / (tau + 1.0) * mu * xt[i - 1]
    return x


# ---------------------------------------------------------------------------
# extreme directions on the slice <s, v> = mu*theta


@dataclass
class ExtremeSearch:
    found: bool
    v: np.ndarray
    value: float  # ||v - mu x~||^2 at mu x~
    target: float  # theta (theta - 1)
    candidates: list
    x_shadow: np.ndarray
    mu: float


def _slice_frame(s):
    """Orthonormal basis of the hyperplane orthogonal to s."""
    return np.linalg.svd(s[None, :])[2][1:].T


def extreme_v_search(F, s, mu, n_starts=16, seed=0, grid=1440, tol=1e-6):
    """Maximize ||v - mu x~||_{mu x~}^2 over v in K with <s, v> = mu*theta.

    A direction d in the hyperplane is mapped to the slice boundary point
    ``c + d / sigma_c(-d)`` with ``c = mu x~``; the objective is convex along
    each ray so the maximum sits on the boundary.  Two-dimensional slices are
    scanned on an angle grid and refined; larger slices use multi-start
    Nelder-Mead.  All local maxima within ``tol`` of the best are returned
    as candidates.
    """
    F = as_barrier(F)
    cone = F.cone
    s = np.asarray(s, dtype=float)
    xt = shadow_primal(F, s)
    c = mu * xt
    Hc = F.hess(c)
    theta = F.theta
    N = _slice_frame(s)
    k = N.shape[1]

    def boundary(a):
        d = N @ a
        sig = cone.sigma(c, -d)
        if sig <= 0:
            raise ArithmeticError("slice is unbounded; s is not interior to K*")
        return c + d / sig

    def objective(a):
        dv = boundary(a) - c
        return float(dv @ Hc @ dv)

    maxima = []
    if k == 1:
        for sign in (1.0, -1.0):
            a = np.array([sign])
            maxima.append((objective(a), boundary(a)))
    elif k == 2:
        phis = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
        vals = np.array([objective(np.array([math.cos(p), math.sin(p)])) for p in phis])
        h = phis[1] - phis[0]
        peaks = [j for j in range(grid) if vals[j] >= vals[j - 1] and vals[j] >= vals[(j + 1) % grid]]
        for j in peaks:
            # optimize the offset from the grid angle: Brent's tolerance scales with |x|
            f = lambda d, p0=phis[j]: -objective(np.array([math.cos(p0 + d), math.sin(p0 + d)]))
            r = scipy.optimize.minimize_scalar(f, bounds=(-h, h), method="bounded",
                                               options={"xatol": 1e-15, "maxiter": 500})
            p = phis[j] + float(r.x)
            maxima.append((-float(r.fun), boundary(np.array([math.cos(p), math.sin(p)]))))
    else:
        rng = np.random.default_rng(seed)
        for _ in range(n_starts):
            a0 = rng.standard_normal(k)
            r = scipy.optimize.minimize(lambda a: -objective(a), a0, method="Nelder-Mead",
                                        options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": 4000 * k})
            maxima.append((-float(r.fun), boundary(r.x)))
    maxima.sort(key=lambda t: -t[0])
    best_val = maxima[0][0]
    target = theta * (theta - 1.0)
    cands = []
    for val, v in maxima:
        if val >= best_val - tol * max(1.0, target):
            if all(np.linalg.norm(v - w) > 1e-5 * (1.0 + np.linalg.norm(w)) for w in cands):
                cands.append(v)
    found = best_val >= target - tol * target
    return ExtremeSearch(found, maxima[0][1], best_val, target, cands, xt, mu)


@dataclass
class WorstCaseCertificate:
    v: np.ndarray
    x_hat: np.ndarray
    r: np.ndarray
    u: np.ndarray
    t: np.ndarray
    ratio: float
    xi_at_xhat: float
    rho_theta: float
    mu: float
    clauses: dict = field(default_factory=dict)

    @property
    def valid(self):
        return all(ok for ok, _ in self.clauses.values())

    @property
    def failing(self):
        return {k: m for k, (ok, m) in self.clauses.items() if not ok}

    def to_json(self):
        return {
            "valid": self.valid,
            "v": self.v.tolist(), "x_hat": self.x_hat.tolist(), "r": self.r.tolist(),
            "u": self.u.tolist(), "t": self.t.tolist(), "ratio": self.ratio,
            "xi_at_xhat": self.xi_at_xhat, "rho_theta": self.rho_theta, "mu": self.mu,
            "clauses": {k: {"ok": bool(ok), "margin": float(m)} for k, (ok, m) in self.clauses.items()},
        }


def hatx_construct(F, s, v, mu, x_shadow=None, tol=CERT_TOL):
    """Build x^ = (1 - tau) v + tau mu x~ and the dual certificates r, u, t.

    Every clause is re-verified numerically; a failed clause marks the
    certificate invalid and its margin is kept.
    """
    F = as_barrier(F)
    cone = F.cone
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = F.theta
    tau, rho_t = tau_rho(theta)
    xt = shadow_primal(F, s) if x_shadow is None else np.asarray(x_shadow, dtype=float)
    c = mu * xt
    Ht = F.hess(xt)
    Hc = Ht / mu**2
    mt = mu * theta
    x_hat = (1.0 - tau) * v + tau * c
    r = tau * (s - Ht @ v / mt)
    clauses = {}

    def rel(a, b):
        return abs(a - b) / max(1.0, abs(b))

    clauses["v_in_K"] = (cone.contains(v, tol * max(1.0, np.linalg.norm(v))).inside, cone._margin(v))
    clauses["v_on_slice"] = (rel(float(s @ v), mt) <= tol, rel(float(s @ v), mt))
    dv = v - c
    nv = float(dv @ Hc @ dv)
    clauses["v_norm"] = (rel(nv, theta * (theta - 1.0)) <= tol, nv - theta * (theta - 1.0))
    mx = cone.contains(x_hat)
    clauses["xhat_interior"] = (mx.verdict == "interior", mx.margin)
    clauses["xhat_on_slice"] = (rel(float(s @ x_hat), mt) <= tol, rel(float(s @ x_hat), mt))
    dx = x_hat - c
    dist = math.sqrt(float(dx @ Hc @ dx))
    clauses["xhat_dikin"] = (abs(dist - tau / (tau + 1.0)) <= tol, dist - tau / (tau + 1.0))
    clauses["r_in_dual"] = (cone.dual_contains(r, tol * max(1.0, np.linalg.norm(r))).inside,
                            cone._dual_margin(r))
    u = np.full_like(s, np.nan)
    t = np.full_like(s, np.nan)
    xi_hat = math.nan
    ratio = math.nan
    if mx.verdict == "interior":
        ev = F.eval(x_hat)
        # dual mirror of x_hat: s = (1 - tau) u + tau mu s^ with s^ = -F'(x_hat)
        u = (s + tau * mu * ev.gradient) / (1.0 - tau)
        Hu = denselin.spd_solve(ev.hessian, u)
        t = tau * (x_hat - Hu / mt)
        du = u + mu * ev.gradient
        nu = float(du @ denselin.spd_solve(ev.hessian, du)) / mu**2
        clauses["u_norm"] = (rel(nu, theta * (theta - 1.0)) <= tol, nu - theta * (theta - 1.0))
        clauses["u_in_dual"] = (cone.dual_contains(u, tol * max(1.0, np.linalg.norm(u))).inside,
                                cone._dual_margin(u))
        clauses["t_in_K"] = (cone.contains(t, tol * max(1.0, np.linalg.norm(t))).inside, cone._margin(t))
        pair = make_pair(F, x_hat, s, x_shadow=xt)
        xi_hat = xi_check_value(pair)
        ratio = ratio_R(pair, v)
    return WorstCaseCertificate(v, x_hat, r, u, t, ratio, xi_hat, rho_t, mu, clauses)


# ---------------------------------------------------------------------------
# supremum search


@dataclass
class SearchResult:
    best_xi: float
    best_pair: object
    per_start: list
    evaluations: int


def radial_interior(cone, center, p):
    """Map R^n onto int K: ``center + p / (1 + sigma_center(-p))``."""
    sig = cone.sigma(center, -p)
    return center + p / (1.0 + sig)


def xi_sup_search(F, n_starts=8, seed=0, budget=3000, spread=1.0, s=None):
    """Multi-start maximization of xi_check(x, s) over interior pairs.

    Pairs are parameterized as x = phi(p), s = -F'(phi(q)) with ``phi`` the
    radial map onto the interior, so the dual shadow is phi(q) and no
    conjugate solve is needed.  When ``s`` is given it is held fixed and only
    x varies.  Each start runs Nelder-Mead with ``budget`` evaluations and is
    restarted once from its own best point.  The result is deterministic for
    a fixed seed.
    """
    F = as_barrier(F)
    cone = F.cone
    n = cone.dim
    c = cone.interior_point()
    scale = max(np.linalg.norm(c), 1.0)
    count = [0]
    if s is None:
        nvar = 2 * n

        def pair_of(z):
            x = radial_interior(cone, c, scale * z[:n])
            w = radial_interior(cone, c, scale * z[n:])
            return pair_from_shadow(F, x, w)
    else:
        s = np.asarray(s, dtype=float)
        xt = shadow_primal(F, s)
        nvar = n

        def pair_of(z):
            return make_pair(F, radial_interior(cone, xt, z), s, x_shadow=xt)

    def negxi(z):
        count[0] += 1
        try:
            return -xi_check_value(pair_of(z))
        except (ArithmeticError, ValueError, np.linalg.LinAlgError):
            return 0.0

    best, best_z, per_start = -math.inf, None, []
    for k in range(n_starts):
        rng = np.random.default_rng([seed, k])
        z = spread * rng.standard_normal(nvar)
        val = -negxi(z)
        for _ in range(2):
            r = scipy.optimize.minimize(negxi, z, method="Nelder-Mead",
                                        options={"maxfev": budget, "xatol": 1e-12, "fatol": 1e-15,
                                                 "adaptive": True})
            if -r.fun >= val:
                z, val = r.x, -float(r.fun)
        per_start.append(val)
        if val > best:
            best, best_z = val, z
    return SearchResult(best, pair_of(best_z), per_start, count[0])


# ---------------------------------------------------------------------------
# slice grids for figure data


def slice_grid(F, s, mu, n_grid=101, extent=None):
    """Sample the 2-D slice {<s, x> = mu*theta} of a 3-dimensional cone.

    Returns a list of dict rows with the slice coordinates, the point, cone
    membership, the Dikin distance from mu x~ and, for interior points, the
    proximity measures and xi_check.
    """
    F = as_barrier(F)
    cone = F.cone
    if cone.dim != 3:
        raise ValueError("slice grids are only produced for 3-dimensional cones")
    s = np.asarray(s, dtype=float)
    xt = shadow_primal(F, s)
    c = mu * xt
    Hc = F.hess(c)
    N = _slice_frame(s)
    if extent is None:
        extent = 1.05 * max(
            1.0 / max(cone.sigma(c, -N @ np.array([math.cos(a), math.sin(a)])), 1e-12)
            for a in np.linspace(0, 2 * math.pi, 72, endpoint=False)
        )
    ticks = np.linspace(-extent, extent, n_grid)
    rows = []
    for a in ticks:
        for b in ticks:
            x = c + N @ np.array([a, b])
            d = x - c
            row = {"u": a, "w": b, "x": x.tolist(), "verdict": cone.contains(x).verdict,
                   "dikin": math.sqrt(float(d @ Hc @ d))}
            if row["verdict"] == "interior":
                pair = make_pair(F, x, s, x_shadow=xt)
                row.update(gamma_g=gamma_g(pair), gamma_inf=gamma_inf(pair, cross_check=False),
                           xi_check=xi_check_value(pair))
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# pair sampling

SAMPLE_MODES = ("wide", "dikin", "near_central")


def _dikin_step(F, x, radius, rng):
    L = np.linalg.cholesky(F.hess(x))
    g = rng.standard_normal(len(x))
    h = np.linalg.solve(L.T, g / np.linalg.norm(g))
    return x + radius * h


def sample_pairs(F, n, seed, spread=1.0):
    """Yield ``(mode, pair)`` for ``n`` interior pairs, cycling through modes.

    ``wide`` draws x and the shadow z independently; ``dikin`` places z in
    the unit Dikin ellipsoid at x; ``near_central`` uses radii 1e-5..1e-2 so
    that gamma_G is small.  Pairs are built as s = -F'(z) with x~ = z.
    """
    F = as_barrier(F)
    cone = F.cone
    rng = np.random.default_rng(seed)
    for k in range(n):
        mode = SAMPLE_MODES[k % 3]
        x = cone.random_interior(rng, spread)
        if mode == "wide":
            z = cone.random_interior(rng, spread)
        elif mode == "dikin":
            z = _dikin_step(F, x, 0.99 * rng.random(), rng)
        else:
            z = _dikin_step(F, x, 10.0 ** rng.uniform(-5, -2), rng)
        z = z * math.exp(rng.standard_normal())
        yield mode, pair_from_shadow(F, x, z)
