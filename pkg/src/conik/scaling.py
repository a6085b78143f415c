"""Primal-dual scalings and local complexity measures.

A scaling ``T`` is admissible at level ``xi`` for the pair (x, s) when

    T x = s,   T x~ = s~,   F''(x) / (xi*delta) <= T <= xi*delta * F''(x~)

with ``delta = delta_F(x, s)``.  The relaxed measure
``xi_check(x, s) = lam_max(F''(x), F''(x~))^(1/2) / delta`` is the smallest
``xi`` for which the two matrix inequalities can hold at all.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from conik import denselin
from conik.cones import Product, UnsupportedKind
from conik.proximity import delta_f

DEFAULT_QUAD_ORDER = 32


@dataclass(frozen=True, eq=False)
class ScalingCandidate:
    T: np.ndarray
    provenance: str  # "nesterov_todd", "integral" or "custom"
    quad_order: int = None
    scaling_point: np.ndarray = None


@dataclass(frozen=True, eq=False)
class AveragedHessian:
    G: np.ndarray
    endpoints: tuple
    quad_order: int


@dataclass
class Certificate:
    """Outcome of a membership test; every margin is kept, pass or fail."""

    accepted: bool
    xi: float
    provenance: str
    quad_order: int
    eq_primal: float
    eq_shadow: float
    lower_margin: float
    upper_margin: float
    tol: float

    def to_json(self):
        return {
            "accepted": self.accepted, "xi": self.xi, "provenance": self.provenance,
            "quad_order": self.quad_order,
            "margins": {
                "eq_primal": self.eq_primal, "eq_shadow": self.eq_shadow,
                "lower_lmi": self.lower_margin, "upper_lmi": self.upper_margin,
            },
            "tol": self.tol,
        }


@dataclass
class ComplexityReport:
    xi_check_local: float
    eigvec: np.ndarray
    xi_lower: float = None
    xi_upper: float = None
    winner: str = None
    certificates: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# scalings


def nt_scaling(pair):
    """Nesterov-Todd scaling T = F''(w) with F''(w) x = s (symmetric cones only)."""
    cone = pair.cone
    if not cone.symmetric:
        raise UnsupportedKind(
            f"Nesterov-Todd scaling is not available on cone kind {cone.kind!r}; "
            "use the integral scaling"
        )
    w = cone.nt_point(pair.x, pair.s)
    T = denselin.symmetrize(pair.F.hess(w))
    return ScalingCandidate(T, "nesterov_todd", None, w)


def _gauss_legendre01(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _segment_rule(cone, x, y, quad_order):
    """Nodes and weights in alpha for integrating F'' along [x, y] on one block.

    Gauss-Legendre is applied in the variable u with
    1 - alpha + alpha*c = c**u and c = <-F'(x), y>/theta, so that a pure
    rescaling y = c x gives a smooth integrand in u.  Without it the
    integrand behaves like (1 - alpha + alpha*c)**-2, whose nearby pole
    defeats fixed-order quadrature when c is far from 1.
    """
    u, w = _gauss_legendre01(quad_order)
    c = float(-cone._barrier(x)[1] @ y) / cone.theta
    L = math.log(c)
    if abs(L) < 1e-3:
        return u, w
    return np.expm1(u * L) / (c - 1.0), w * np.exp(u * L) * L / (c - 1.0)


def _segment_integral(cone, x, y, quad_order):
    if isinstance(cone, Product) and len(cone.parts) > 1:
        blocks = [_segment_integral(p, xi, yi, quad_order)
                  for p, xi, yi in zip(cone.parts, cone.split(x), cone.split(y))]
        return scipy.linalg.block_diag(*blocks)
    alphas, weights = _segment_rule(cone, x, y, quad_order)
    G = np.zeros((len(x), len(x)))
    for a, w in zip(alphas, weights):
        p = (1.0 - a) * x + a * y
        if cone.contains(p, 0.0).verdict != "interior":
            raise ArithmeticError("quadrature node left the cone interior")
        G += w * cone._barrier(p)[2]
    return G


def averaged_hessian(F, x, y, quad_order=DEFAULT_QUAD_ORDER):
    """Quadrature approximation of the integral of F'' over the segment [x, y].

    Each block of a product cone gets its own ``quad_order``-point
    Gauss-Legendre rule after the change of variables in :func:`_segment_rule`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    G = _segment_integral(F.cone, x, y, quad_order)
    return AveragedHessian(denselin.symmetrize(G), (x, y), quad_order)


def integral_scaling(pair, quad_order=DEFAULT_QUAD_ORDER):
    """T = mu * integral_0^1 F''((1-a) x + a mu x~) da."""
    if quad_order < 8:
        raise ValueError("quad_order must be at least 8")
    G = averaged_hessian(pair.F, pair.x, pair.mu * pair.x_shadow, quad_order)
    return ScalingCandidate(pair.mu * G.G, "integral", quad_order, None)


def scaling_residuals(T, pair):
    """Relative residuals of T x = s and T x~ = s~."""
    T = T.T if isinstance(T, ScalingCandidate) else T
    r1 = np.linalg.norm(T @ pair.x - pair.s) / max(np.linalg.norm(pair.s), 1e-300)
    r2 = np.linalg.norm(T @ pair.x_shadow - pair.s_shadow) / max(np.linalg.norm(pair.s_shadow), 1e-300)
    return float(r1), float(r2)


def adaptive_integral_scaling(pair, tol=1e-9, start=DEFAULT_QUAD_ORDER, max_order=512):
    """Integral scaling with the quadrature order doubled until both
    equality residuals fall below ``tol`` (relative)."""
    order = start
    while True:
        cand = integral_scaling(pair, order)
        if max(scaling_residuals(cand, pair)) <= tol or order >= max_order:
            return cand
        order *= 2


# ---------------------------------------------------------------------------
# complexity measures


def xi_check_local(pair):
    """lam_max^(1/2)(F''(x) F_*''(s)) / delta_F and the maximizing eigenvector."""
    lam, q = denselin.geneig_max(pair.hess_x, pair.hess_xs)
    return ComplexityReport(math.sqrt(max(lam, 0.0)) / delta_f(pair), q)


def xi_check_value(pair):
    return xi_check_local(pair).xi_check_local


def membership(T, pair, xi, tol=1e-8):
    """Test T against the admissible set at level ``xi``.

    Equality residuals are relative to ||s|| and ||s~||; the two matrix
    inequalities are tested by smallest eigenvalues of the differences,
    relative to max(1, ||T||).
    """
    cand = T if isinstance(T, ScalingCandidate) else ScalingCandidate(np.asarray(T), "custom")
    Tm = cand.T
    d = delta_f(pair)
    r1, r2 = scaling_residuals(Tm, pair)
    scale = max(1.0, float(np.linalg.norm(Tm, 2)))
    lo = denselin.min_eig_diff(pair.hess_x / (xi * d), Tm) / scale
    hi = denselin.min_eig_diff(Tm, xi * d * pair.hess_xs) / scale
    ok = r1 <= tol and r2 <= tol and lo >= -tol and hi >= -tol
    return Certificate(bool(ok), float(xi), cand.provenance, cand.quad_order, r1, r2, lo, hi, tol)


def smallest_admissible_xi(T, pair):
    """Smallest xi for which the two matrix inequalities hold for ``T``."""
    Tm = T.T if isinstance(T, ScalingCandidate) else np.asarray(T)
    d = delta_f(pair)
    a, _ = denselin.geneig_max(pair.hess_x, Tm)
    b, _ = denselin.geneig_max(Tm, pair.hess_xs)
    return max(a, b) / d


def xi_local_bounds(pair, candidates=None, tol=1e-8):
    """Bracket xi_F(x, s) between xi_check(x, s) and the best candidate scaling.

    Candidates default to Nesterov-Todd (symmetric cones) plus the adaptive
    integral scaling.  A candidate only counts when its equality residuals
    pass; the upper bound is +inf if none does.
    """
    rep = xi_check_local(pair)
    if candidates is None:
        candidates = []
        if pair.cone.symmetric:
            candidates.append(nt_scaling(pair))
        candidates.append(adaptive_integral_scaling(pair, tol=0.1 * tol))
    best, winner, certs = math.inf, None, []
    for cand in candidates:
        xi_c = max(smallest_admissible_xi(cand, pair), rep.xi_check_local)
        cert = membership(cand, pair, xi_c * (1.0 + 1e-10), tol)
        certs.append(cert)
        if cert.accepted and xi_c < best:
            best, winner = xi_c, cand.provenance
    rep.xi_lower = rep.xi_check_local
    rep.xi_upper = best
    rep.winner = winner
    rep.certificates = certs
    return rep


def certificate_json(cert):
    return json.dumps(cert.to_json(), sort_keys=True)
