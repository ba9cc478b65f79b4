"""Operator parameters for the fractional Laplacian (-Delta)^s on R^n.

The normalization makes (-Delta)^s agree with the Fourier multiplier |xi|^(2s),
and sigma_star = -n + 2s is the homogeneity degree of the radial fundamental
solution (power branch for sigma_star != 0, logarithm at sigma_star = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

SUPPORTED_DIMENSIONS = (1, 2, 3)


def normalization_constant(n: int, s: float) -> float:
    """Normalization constant of the singular-integral definition of (-Delta)^s.

    Returns 2^(2s) * pi^(-n/2) * s * Gamma((n+2s)/2) / Gamma(1-s), which is
    strictly positive for every integer n >= 1 and s in (0, 1).
    """
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"order s must lie in (0, 1), got {s!r}")
    return (
        2.0 ** (2.0 * s)
        * math.pi ** (-n / 2.0)
        * s
        * math.gamma((n + 2.0 * s) / 2.0)
        / math.gamma(1.0 - s)
    )


def surface_measure(n: int) -> float:
    """Total measure of the unit sphere S^(n-1); the two-point set {-1, 1} for n=1."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class FracParams:
    """Dimension, order, and the derived quantities every formula lives in.

    Attributes
    ----------
    n : spatial dimension, restricted to {1, 2, 3}.
    s : fractional order in (0, 1).
    sigma_star : -n + 2s, the exponent of the power-branch fundamental solution.
    c_ns : positive normalization constant of the singular integral.
    """

    n: int
    s: float
    sigma_star: float = field(init=False)
    c_ns: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {self.n!r}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"order s must lie in (0, 1), got {self.s!r}")
        object.__setattr__(self, "sigma_star", -self.n + 2.0 * self.s)
        object.__setattr__(self, "c_ns", normalization_constant(self.n, self.s))

    @property
    def sphere_measure(self) -> float:
        return surface_measure(self.n)

    def __str__(self) -> str:  # compact tag used in reports
        return f"n={self.n},s={self.s:g}"
