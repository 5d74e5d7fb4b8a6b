"""Physical constants of the vacuum medium."""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018 values.
EPS0_SI = 8.8541878128e-12  # F/m
MU0_SI = 1.25663706212e-6   # H/m


@dataclass(frozen=True)
class PhysicalConstants:
    """Vacuum permittivity and permeability; the light speed is derived.

    `c` is always computed as 1/sqrt(mu0*eps0), so the defining relation
    holds to round-off by construction.
    """

    eps0: float
    mu0: float

    def __post_init__(self):
        if not (self.eps0 > 0.0 and self.mu0 > 0.0):
            raise ValueError(f"eps0 and mu0 must be positive, got {self.eps0}, {self.mu0}")

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(self.mu0 * self.eps0)

    @classmethod
    def si(cls) -> "PhysicalConstants":
        return cls(eps0=EPS0_SI, mu0=MU0_SI)

    @classmethod
    def normalized(cls) -> "PhysicalConstants":
        """Unit system with eps0 = mu0 = c = 1; the test-suite default."""
        return cls(eps0=1.0, mu0=1.0)
