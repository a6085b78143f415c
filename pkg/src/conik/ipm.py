"""Feasible-start primal-dual predictor-corrector interior-point solver.

Solves ``min <c, x>  s.t.  A x = b, x in K`` together with its dual
``max b'y  s.t.  A'y + s = c, s in K*``.  Each search direction solves

    A dx = 0,   A'dy + ds = 0,   T dx + ds = r

with T from the selected scaling at the current pair.  The predictor uses
``r = -s`` and reduces the gap by exactly the step length; the corrector uses
``r = mu s~ - s``, which leaves the gap unchanged and pulls x toward mu x~.
Iterates stay in the neighborhood gamma_G <= eta.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from conik.barrier import as_barrier
from conik.denselin import NotPositiveDefinite
from conik.cones import UnsupportedKind, cone_from_json, parse_cone
from conik.duality import ShadowNotConverged, make_pair, shadow_primal
from conik.proximity import gamma_g, gamma_inf
from conik.scaling import adaptive_integral_scaling, membership, nt_scaling, xi_check_value

SCALINGS = ("nt", "integral")
NC_XI = 4.0 / 3.0
STEP_FRACTION = 0.99
BACKTRACK = 0.8
MIN_STEP = 1e-12
MAX_ITER = 500
MEMBERSHIP_TOL = 1e-8


class InvariantViolation(ArithmeticError):
    """A scaling failed membership at 4/3 on a negative-curvature cone."""


@dataclass(eq=False)
class ConicProgram:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cone: object
    x0: np.ndarray
    y0: np.ndarray
    s0: np.ndarray
    optimum: float = None  # documented optimal value, when known

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        for name in ("b", "c", "x0", "y0", "s0"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        m, n = self.A.shape
        if n != self.cone.dim or len(self.c) != n or len(self.b) != m:
            raise ValueError("inconsistent dimensions in conic program")
        if np.linalg.matrix_rank(self.A) < m:
            raise ValueError("A must have full row rank")

    def residuals(self, x=None, y=None, s=None):
        x = self.x0 if x is None else x
        y = self.y0 if y is None else y
        s = self.s0 if s is None else s
        rp = np.linalg.norm(self.A @ x - self.b) / (1.0 + np.linalg.norm(self.b))
        rd = np.linalg.norm(self.A.T @ y + s - self.c) / (1.0 + np.linalg.norm(self.c))
        return float(rp), float(rd)

    def check_start(self, tol=1e-9):
        rp, rd = self.residuals()
        if rp > tol or rd > tol:
            raise ValueError(f"start is not feasible (primal {rp:.3g}, dual {rd:.3g})")
        self.cone.require_interior(self.x0)
        self.cone.require_dual_interior(self.s0)

    def to_json(self):
        obj = {"cone": self.cone.to_json(), "A": self.A.tolist(), "b": self.b.tolist(),
               "c": self.c.tolist(), "x0": self.x0.tolist(), "y0": self.y0.tolist(),
               "s0": self.s0.tolist()}
        if self.optimum is not None:
            obj["optimum"] = self.optimum
        return obj

    @classmethod
    def from_json(cls, obj):
        cone = obj["cone"]
        cone = parse_cone(cone) if isinstance(cone, str) else cone_from_json(cone)
        return cls(obj["A"], obj["b"], obj["c"], cone, obj["x0"], obj["y0"], obj["s0"],
                   obj.get("optimum"))


def load_program(path):
    with open(path) as fh:
        return ConicProgram.from_json(json.load(fh))


def gen_feasible_instance(cone, m, seed):
    """Random program with a strictly feasible, nearly central start."""
    n = cone.dim
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    rng = np.random.default_rng(seed)
    F = as_barrier(cone)
    while True:
        A = rng.standard_normal((m, n))
        if np.linalg.matrix_rank(A) == m:
            break
    center = cone.interior_point()
    x0 = _perturb(cone, center, rng, 0.3)
    z = _perturb(cone, x0, rng, 0.05)
    s0 = -F.grad(z)
    y0 = rng.standard_normal(m)
    return ConicProgram(A, A @ x0, A.T @ y0 + s0, cone, x0, y0, s0)


def _perturb(cone, x, rng, size):
    d = rng.standard_normal(cone.dim)
    d *= size * np.linalg.norm(x) / max(np.linalg.norm(d), 1e-300)
    return x + d / (1.0 + cone.sigma(x, -d))


def lp_example():
    """min x1 + x2  s.t.  x1 + 2 x2 = 2, x >= 0; optimum 1 at (0, 1)."""
    from conik.cones import Orthant

    A = np.array([[1.0, 2.0]])
    x0 = np.array([2.0 / 3.0, 2.0 / 3.0])
    y0 = np.array([0.25])
    c = np.array([1.0, 1.0])
    return ConicProgram(A, [2.0], c, Orthant(2), x0, y0, c - A.T @ y0, optimum=1.0)


@dataclass
class IpmTrace:
    records: list = field(default_factory=list)
    final_gap: float = math.nan
    iterations: int = 0

    def to_jsonl(self):
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


@dataclass
class IpmResult:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    status: str  # "optimal" or "stall"
    iterations: int
    gap: float
    objective: float
    trace: IpmTrace

    def to_json(self):
        return {"status": self.status, "iterations": self.iterations, "gap": self.gap,
                "objective": self.objective, "x": self.x.tolist(), "y": self.y.tolist(),
                "s": self.s.tolist()}


class _Solver:
    def __init__(self, prog, scaling_kind, eta, check_membership):
        self.prog = prog
        self.F = as_barrier(prog.cone)
        self.cone = prog.cone
        self.kind = scaling_kind
        self.eta = eta
        self.check = check_membership and self.cone.negative_curvature is True
        A = prog.A
        self.proj = scipy.linalg.cho_factor(A @ A.T)

    def pair(self, x, s, warm=None):
        xt = None
        if warm is not None:
            xt = shadow_primal(self.F, s, start=warm.x_shadow)
        return make_pair(self.F, x, s, x_shadow=xt)

    def scaling(self, pair):
        if self.kind == "nt":
            cand = nt_scaling(pair)
        else:
            cand = adaptive_integral_scaling(pair)
        ok = None
        if self.check:
            # equality residuals cannot beat the roundoff in forming T x
            growth = np.linalg.norm(cand.T, 2) * np.linalg.norm(pair.x) / np.linalg.norm(pair.s)
            cert = membership(cand, pair, NC_XI, tol=max(MEMBERSHIP_TOL, 1e-13 * growth))
            ok = cert.accepted
            if not ok:
                raise InvariantViolation(
                    f"{cand.provenance} scaling failed membership at 4/3: {cert.to_json()}")
        return cand, ok

    def direction(self, T, r):
        A = self.prog.A
        try:
            Tf = scipy.linalg.cho_factor(T)
            TiAt = scipy.linalg.cho_solve(Tf, A.T)
            Tir = scipy.linalg.cho_solve(Tf, r)
            M = A @ TiAt
            dy = scipy.linalg.cho_solve(scipy.linalg.cho_factor(0.5 * (M + M.T)), -A @ Tir)
            dx = Tir + TiAt @ dy
            self.kkt = "normal"
        except np.linalg.LinAlgError:
            # T is numerically indefinite near the optimum; the unreduced
            # system only needs T to be definite on the null space of A
            m, n = A.shape
            K = np.block([[T, -A.T], [A, np.zeros((m, m))]])
            sol = scipy.linalg.solve(K, np.r_[r, np.zeros(m)])
            dx, dy = sol[:n], sol[n:]
            self.kkt = "augmented"
        # remove roundoff drift out of the null space of A
        dx -= A.T @ scipy.linalg.cho_solve(self.proj, A @ dx)
        ds = -A.T @ dy
        return dx, dy, ds

    def max_step(self, x, s, dx, ds):
        sig = self.cone.sigma(x, -dx)
        if self.cone.cheap_dual_oracle:
            sig = max(sig, self.cone.dual_gauge(s, -ds))
        # otherwise dual interiority is certified by the shadow solve in trial()
        return math.inf if sig <= 0 else STEP_FRACTION / sig

    def trial(self, pair, dx, ds, a):
        try:
            p = self.pair(pair.x + a * dx, pair.s + a * ds, warm=pair)
            return p, gamma_g(p)
        except (ArithmeticError, ValueError, ShadowNotConverged, np.linalg.LinAlgError):
            return None, math.inf


def _safe_xi(pair):
    # F''(x~) loses definiteness in floating point close to the optimum
    try:
        return xi_check_value(pair)
    except NotPositiveDefinite:
        return None


def solve(prog, scaling_kind="integral", eps=1e-8, eta=0.25, check_membership=True, max_iter=MAX_ITER):
    """Predictor-corrector path following; see the module docstring.

    Returns an :class:`IpmResult` whose status is ``"optimal"`` when
    ``<s, x> <= eps <s0, x0>`` or ``"stall"`` when a step falls below 1e-12
    or the iteration cap is hit.
    """
    if scaling_kind not in SCALINGS:
        raise ValueError(f"scaling must be one of {SCALINGS}")
    if scaling_kind == "nt" and not prog.cone.symmetric:
        raise UnsupportedKind(
            f"Nesterov-Todd scaling is not available on cone kind {prog.cone.kind!r}; "
            "rerun with the integral scaling")
    prog.check_start()
    sv = _Solver(prog, scaling_kind, eta, check_membership)
    x, y, s = prog.x0.copy(), prog.y0.copy(), prog.s0.copy()
    gap0 = float(s @ x)
    trace = IpmTrace()
    status = "stall"
    pair = sv.pair(x, s)
    k = 0

    def center(pair, x, y, s, target):
        steps = []
        for _ in range(50):
            g = gamma_g(pair)
            if g <= target:
                break
            cand, _ = sv.scaling(pair)
            dx, dy, ds = sv.direction(cand.T, pair.mu * pair.s_shadow - pair.s)
            a = min(1.0, sv.max_step(x, s, dx, ds))
            while a >= MIN_STEP:
                p, gn = sv.trial(pair, dx, ds, a)
                if gn < g:
                    break
                a *= BACKTRACK
            if a < MIN_STEP:
                return pair, x, y, s, steps, False
            x, y, s, pair = x + a * dx, y + a * dy, s + a * ds, p
            steps.append(a)
        return pair, x, y, s, steps, gamma_g(pair) <= max(target, sv.eta)

    pair, x, y, s, csteps, ok = center(pair, x, y, s, eta / 4)
    if not ok:
        trace.final_gap = float(s @ x)
        return IpmResult(x, y, s, "stall", 0, trace.final_gap, float(prog.c @ x), trace)
    while k < max_iter:
        gap = float(s @ x)
        if gap <= eps * gap0:
            status = "optimal"
            break
        k += 1
        cand, mem_ok = sv.scaling(pair)
        dx, dy, ds = sv.direction(cand.T, -s)
        a = min(1.0, sv.max_step(x, s, dx, ds))
        while a >= MIN_STEP:
            p, gn = sv.trial(pair, dx, ds, a)
            if gn <= eta:
                break
            a *= BACKTRACK
        if a < MIN_STEP:
            break
        x, y, s, pair = x + a * dx, y + a * dy, s + a * ds, p
        pair, x, y, s, csteps, ok = center(pair, x, y, s, eta / 4)
        rp, rd = prog.residuals(x, y, s)
        trace.records.append({
            "iter": k, "mu": pair.mu, "gap": pair.gap, "gamma_g": gamma_g(pair),
            "gamma_inf": gamma_inf(pair, cross_check=False), "xi_check": _safe_xi(pair),
            "predictor_step": a, "corrector_steps": csteps, "scaling": cand.provenance,
            "quad_order": cand.quad_order, "kkt": sv.kkt, "membership_4_3": mem_ok,
            "primal_residual": rp, "dual_residual": rd,
        })
        if not ok:
            break
    trace.iterations = k
    trace.final_gap = float(s @ x)
    return IpmResult(x, y, s, status, k, trace.final_gap, float(prog.c @ x), trace)


def iteration_study(cone_family, theta_list, eps=1e-8, seeds=(0, 1, 2), scaling_kind=None):
    """Median iteration counts over seeds and the fitted exponent in theta.

    ``cone_family`` maps a size parameter to a cone, e.g. ``Orthant``.
    """
    rows = []
    for n in theta_list:
        cone = cone_family(n)
        kind = scaling_kind or ("nt" if cone.symmetric else "integral")
        its = []
        for sd in seeds:
            prog = gen_feasible_instance(cone, max(1, cone.dim // 2), sd)
            res = solve(prog, kind, eps)
            if res.status != "optimal":
                raise RuntimeError(f"solver stalled on size {n}, seed {sd}")
            its.append(res.iterations)
        rows.append({"theta": cone.theta, "iterations": its, "median": float(np.median(its))})
    th = np.log([r["theta"] for r in rows])
    it = np.log([r["median"] for r in rows])
    exponent = float(np.polyfit(th, it, 1)[0]) if len(rows) > 1 else math.nan
    return rows, exponent
