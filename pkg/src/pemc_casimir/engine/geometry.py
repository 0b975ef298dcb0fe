r"""Geometry and thermal-state containers for the two-sphere scattering setup."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError

__all__ = ["Geometry", "ThermalState"]


@dataclass(frozen=True)
class Geometry:
    """Two spheres of radii r1, r2 at surface-to-surface distance l_gap.

    ``r1 = math.inf`` selects the sphere-plane geometry.  All lengths share
    one (arbitrary) unit; derived dimensionless parameters:

    - ``x = l_gap / r_eff`` with ``r_eff = r1 r2/(r1 + r2)``
    - ``u = r1 r2/(r1 + r2)^2`` in [0, 1/4] (0: sphere-plane, 1/4: equal radii)
    - ``script_l = l_gap + r1 + r2`` (or ``l_gap + r2`` for the plane)
    - ``y = 1 + x + (u/2) x^2``, the conformally invariant distance scale
    """

    r1: float
    r2: float
    l_gap: float

    def __post_init__(self):
        if not self.l_gap > 0.0:
            raise DomainError(f"l_gap must be positive, got {self.l_gap}")
        if not 0.0 < self.r2 < math.inf:
            raise DomainError(f"r2 must be positive and finite, got {self.r2}")
        if not self.r1 > 0.0:
            raise DomainError(f"r1 must be positive (or inf for a plane), got {self.r1}")

    @property
    def is_sphere_plane(self) -> bool:
        return math.isinf(self.r1)

    @property
    def r_eff(self) -> float:
        if self.is_sphere_plane:
            return self.r2
        return self.r1 * self.r2 / (self.r1 + self.r2)

    @property
    def x(self) -> float:
        return self.l_gap / self.r_eff

    @property
    def u(self) -> float:
        if self.is_sphere_plane:
            return 0.0
        return self.r1 * self.r2 / (self.r1 + self.r2) ** 2

    @property
    def script_l(self) -> float:
        if self.is_sphere_plane:
            return self.l_gap + self.r2
        return self.l_gap + self.r1 + self.r2

    @property
    def y(self) -> float:
        x = self.x
        return 1.0 + x + 0.5 * self.u * x * x

    @classmethod
    def from_dimensionless(cls, x: float, u: float, l_gap: float = 1.0) -> "Geometry":
        """Construct radii from the aspect ratio x and geometry parameter u."""
        if not x > 0.0:
            raise DomainError(f"x must be positive, got {x}")
        if not 0.0 <= u <= 0.25:
            raise DomainError(f"u must lie in [0, 1/4], got {u}")
        r_eff = l_gap / x
        if u == 0.0:
            return cls(r1=math.inf, r2=r_eff, l_gap=l_gap)
        s = math.sqrt(1.0 - 4.0 * u)
        r2 = r_eff * 2.0 / (1.0 + s)  # smaller sphere
        r1 = r_eff * (1.0 + s) / (2.0 * u)
        return cls(r1=r1, r2=r2, l_gap=l_gap)

    def with_gap(self, l_gap: float) -> "Geometry":
        return Geometry(r1=self.r1, r2=self.r2, l_gap=l_gap)


@dataclass(frozen=True)
class ThermalState:
    """Temperature expressed through tau = 2 pi L / lambda_T.

    ``tau = 0`` is zero temperature, ``tau = math.inf`` the high-temperature
    (zero-frequency) limit.  ``tau`` refers to the gap L of the geometry it is
    used with; ``tau_tilde = tau * script_l / L`` follows from the geometry.
    """

    tau: float

    def __post_init__(self):
        if not self.tau >= 0.0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")

    @property
    def is_zero(self) -> bool:
        return self.tau == 0.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.tau)

    def tau_tilde(self, geom: Geometry) -> float:
        return self.tau * geom.script_l / geom.l_gap

    @classmethod
    def zero(cls) -> "ThermalState":
        return cls(tau=0.0)

    @classmethod
    def high_t(cls) -> "ThermalState":
        return cls(tau=math.inf)

    @classmethod
    def from_tau_tilde(cls, tau_tilde: float, geom: Geometry) -> "ThermalState":
        if math.isinf(tau_tilde):
            return cls(tau=math.inf)
        return cls(tau=tau_tilde * geom.l_gap / geom.script_l)
