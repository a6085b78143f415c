"""Primal-dual scalings, complexity measures and worst-case pairs for conic
interior-point methods."""

from conik.barrier import BarrierHandle, as_barrier
from conik.cones import (
    PSD,
    SOC,
    DomainError,
    Exp,
    LMISlice,
    Orthant,
    Product,
    UnsupportedKind,
    WeightedOrthant,
    parse_cone,
    random_lmi,
    toeplitz_slice,
    tridiag_toeplitz,
)
from conik.duality import PrimalDualPair, make_pair, pair_from_shadow, shadow_dual, shadow_primal
from conik.proximity import delta_f, gamma_g, gamma_inf, rho, tau_rho
from conik.scaling import integral_scaling, membership, nt_scaling, xi_check_value, xi_local_bounds

__all__ = [
    "BarrierHandle", "as_barrier", "PSD", "SOC", "DomainError", "Exp", "LMISlice", "Orthant",
    "Product", "UnsupportedKind", "WeightedOrthant", "parse_cone", "random_lmi", "toeplitz_slice",
    "tridiag_toeplitz", "PrimalDualPair", "make_pair", "pair_from_shadow", "shadow_dual",
    "shadow_primal", "delta_f", "gamma_g", "gamma_inf", "rho", "tau_rho", "integral_scaling",
    "membership", "nt_scaling", "xi_check_value", "xi_local_bounds",
]
