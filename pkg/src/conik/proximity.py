"""Proximity measures to the central path and the constants tau_n, rho_n."""

import math
from dataclasses import dataclass


class ProximityInconsistency(ArithmeticError):
    pass


# the conjugate Newton stopping rule limits mu~ to roughly 1e-11 relative accuracy
GAMMA_CLAMP = 1e-10


@dataclass(frozen=True)
class ProximityReport:
    gamma_g: float
    gamma_inf: float
    delta_f: float
    mu: float
    mu_tilde: float


def gamma_g(pair):
    """Gradient proximity theta*(mu*mu~ - 1)."""
    g = pair.theta * (pair.mu * pair.mu_tilde - 1.0)
    if g < 0.0:
        if g < -GAMMA_CLAMP * max(1.0, pair.theta):
            raise ProximityInconsistency(f"gamma_G = {g!r} is negative")
        return 0.0
    return g


def gamma_inf(pair, cross_check=True):
    """Uniform proximity sigma_x(mu x~) - 1.

    With ``cross_check`` the alternative form sigma_x(mu x~ - x) is also
    evaluated and a disagreement above 1e-8 raises.
    """
    cone = pair.cone
    target = pair.mu * pair.x_shadow
    g = cone.sigma(pair.x, target) - 1.0
    if cross_check:
        alt = cone.sigma(pair.x, target - pair.x)
        if abs(max(g, 0.0) - alt) > 1e-8 * (1.0 + alt):
            raise ProximityInconsistency(f"gamma_inf routes disagree: {g!r} vs {alt!r}")
    return max(g, 0.0)


def delta_f(pair, cross_check=True):
    """Normalizer (gamma_G + 1)/mu.

    Cross-checked against theta*mu~ - (theta - 1)/mu, i.e. the expression in
    terms of <F'(x), F_*'(s)> and <s, x>.
    """
    d = (gamma_g(pair) + 1.0) / pair.mu
    if cross_check:
        theta = pair.theta
        alt = float(pair.s_shadow @ pair.x_shadow) - theta * (theta - 1.0) / pair.gap
        if abs(d - alt) > 1e-10 * max(abs(d), abs(alt), 1.0 / pair.mu) + 1e-300:
            raise ProximityInconsistency(f"delta_F routes disagree: {d!r} vs {alt!r}")
    return d


def proximity_report(pair):
    return ProximityReport(gamma_g(pair), gamma_inf(pair), delta_f(pair), pair.mu, pair.mu_tilde)


def tau_rho(n):
    """tau_n = sqrt(n/(n-1)) and rho_n = (tau_n+1)^2 / (tau_n (tau_n+2))."""
    if n < 2:
        raise ValueError("tau_n and rho_n need n >= 2")
    tau = math.sqrt(n / (n - 1.0))
    return tau, (tau + 1.0) ** 2 / (tau * (tau + 2.0))


def rho(n):
    return tau_rho(n)[1]


def rho_limit_form(n):
    """Same value as rho(n), written as 1/(1 - (n-1)(sqrt n - sqrt(n-1))^2)."""
    return 1.0 / (1.0 - (n - 1.0) * (math.sqrt(n) - math.sqrt(n - 1.0)) ** 2)


def mu_mu_tilde(pair):
    return pair.mu * pair.mu_tilde


__all__ = [
    "ProximityReport", "ProximityInconsistency", "gamma_g", "gamma_inf", "delta_f",
    "proximity_report", "tau_rho", "rho", "rho_limit_form", "mu_mu_tilde",
]

