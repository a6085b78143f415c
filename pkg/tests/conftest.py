import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conik.barrier import BarrierHandle
from conik.cones import PSD, SOC, Exp, Orthant, Product, WeightedOrthant, random_lmi, toeplitz_slice, tridiag_toeplitz

settings.register_profile(
    "conik", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("conik")


def all_cones():
    return {
        "orthant3": Orthant(3),
        "weighted": WeightedOrthant([2.0, 1.0, 3.5]),
        "psd3": PSD(3),
        "soc34": SOC([3, 4]),
        "exp1": Exp(1),
        "exp2": Exp(2),
        "toeplitz3": toeplitz_slice(3),
        "tridiag5": tridiag_toeplitz(5),
        "lmi": random_lmi(3, 4, 0),
        "product": Product([Orthant(2), SOC([3]), Exp(1)]),
    }


NEG_CURV = ["orthant3", "weighted", "psd3", "soc34", "toeplitz3", "tridiag5", "lmi"]
SYMMETRIC = ["orthant3", "weighted", "psd3", "soc34"]


@pytest.fixture(params=sorted(all_cones()))
def cone(request):
    return all_cones()[request.param]


@pytest.fixture(params=NEG_CURV)
def nc_cone(request):
    return all_cones()[request.param]


@pytest.fixture(params=SYMMETRIC)
def sym_cone(request):
    return all_cones()[request.param]


def barrier(cone):
    return BarrierHandle(cone)


def rel(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(1.0, np.linalg.norm(b)))
