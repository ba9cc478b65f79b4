import math

import numpy as np
import pytest

from fraccert.errors import DomainError
from fraccert.params import FracParams, normalization_constant, surface_measure


# independent Gamma evaluation for the dual-route check (Lanczos, g=7)
_LANCZOS = [
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
]


def _lanczos_gamma(x: float) -> float:
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos_gamma(1.0 - x))
    x -= 1.0
    a = _LANCZOS[0]
    t = x + 7.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def _constant_via_lanczos(n: int, s: float) -> float:
    return 2.0 ** (2 * s) * math.pi ** (-n / 2) * s * _lanczos_gamma((n + 2 * s) / 2) / _lanczos_gamma(1 - s)


def test_half_laplacian_constant_is_one_over_pi():
    # Gamma(1) = 1 and Gamma(1/2) = sqrt(pi) collapse the formula to 1/pi
    assert normalization_constant(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-15)


def test_dual_gamma_routes_agree():
    val = normalization_constant(3, 0.5)
    assert val == pytest.approx(_constant_via_lanczos(3, 0.5), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", np.arange(0.1, 0.95, 0.1).round(2).tolist())
def test_constant_positive_over_grid(n, s):
    assert normalization_constant(n, float(s)) > 0.0


def test_params_derived_fields():
    p = FracParams(3, 0.75)
    assert p.sigma_star == -3 + 1.5
    assert p.c_ns == pytest.approx(normalization_constant(3, 0.75))
    assert str(p) == "n=3,s=0.75"


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
def test_order_outside_unit_interval_rejected(bad):
    with pytest.raises(DomainError):
        normalization_constant(1, bad)
    with pytest.raises(DomainError):
        FracParams(1, bad)


def test_dimension_restricted():
    with pytest.raises(DomainError):
        FracParams(4, 0.5)
    with pytest.raises(DomainError):
        normalization_constant(0, 0.5)


def test_sphere_measures():
    assert surface_measure(1) == pytest.approx(2.0)
    assert surface_measure(2) == pytest.approx(2.0 * math.pi)
    assert surface_measure(3) == pytest.approx(4.0 * math.pi)
