r"""Closed-form short-distance physics (proximity-force approximation):
Matsubara terms, zero-temperature energy, low-temperature expansion,
high-temperature limit, critical angles and the leading curvature correction.

Dimensionless conventions: energies are reported as F L/(hbar c) (and, where
stated, F/(k_B T)); x = L/R_eff, tau = 2 pi L/lambda_T, delta = |theta2 -
theta1|.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .constants import ZETA3
from .errors import ConvergenceError, DomainError
from .specfun import bernoulli_poly, polylog_disk, re_polylog_circle

__all__ = [
    "PfaInputs",
    "pfa_f_n",
    "pfa_energy_T0",
    "pfa_free_energy",
    "pfa_low_T_correction",
    "pfa_high_T",
    "pfa_critical_angle",
    "pfa_force_bracket",
    "pfa_geometric_correction",
    "DELTA_CRIT_T0",
]

#: zero-temperature PFA critical angle, (1 - sqrt(1 - 2 sqrt(2/15))) pi/2
DELTA_CRIT_T0 = (1.0 - math.sqrt(1.0 - 2.0 * math.sqrt(2.0 / 15.0))) * math.pi / 2.0


@dataclass(frozen=True)
class PfaInputs:
    """PFA parameters: aspect ratio x, temperature tau, angle delta, geometry u."""

    x: float
    tau: float = 0.0
    delta: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        if not self.x > 0.0:
            raise DomainError(f"x must be positive, got {self.x}")
        if not 0.0 <= self.delta <= math.pi / 2.0:
            raise DomainError(f"delta must lie in [0, pi/2], got {self.delta}")
        if not 0.0 <= self.u <= 0.25:
            raise DomainError(f"u must lie in [0, 1/4], got {self.u}")
        if not self.tau >= 0.0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")


def pfa_f_n(n: int, x: float, tau: float, delta: float) -> float:
    """Matsubara coefficient f_{n,PFA} = -(1/2x) Re Li_3(e^{2 i delta - 2 n tau})."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return -re_polylog_circle(3, 2.0 * delta) / (2.0 * x)
    z = cmath.exp(2.0j * delta - 2.0 * n * tau)
    return -polylog_disk(3, z).real / (2.0 * x)


def pfa_energy_T0(x: float, delta: float) -> float:
    """Zero-temperature PFA energy E L/(hbar c) = -(1/720 pi x)[pi^4 - 30 d^2(pi-d)^2]."""
    bracket = math.pi**4 - 30.0 * delta**2 * (math.pi - delta) ** 2
    return -bracket / (720.0 * math.pi * x)


def pfa_free_energy(x: float, tau: float, delta: float, rel_tol: float = 1e-10):
    """PFA free energy at tau > 0.

    Returns (F L/(hbar c), F/(k_B T)).  The Matsubara series is truncated once
    the terms fall below rel_tol relative to f_0 and closed with the geometric
    tail.
    """
    if not tau > 0.0:
        raise DomainError("tau must be positive; use pfa_energy_T0 at T = 0")
    f0 = pfa_f_n(0, x, tau, delta)
    total = f0
    decay = math.exp(-2.0 * tau)
    n = 1
    while True:
        fn = pfa_f_n(n, x, tau, delta)
        total += 2.0 * fn
        if abs(fn) < rel_tol * abs(f0):
            total += 2.0 * fn * decay / (1.0 - decay)
            break
        n += 1
        if n > 20_000_000:
            raise ConvergenceError("PFA Matsubara sum did not converge")
    return tau / (4.0 * math.pi) * total, 0.5 * total


def pfa_low_T_correction(x: float, tau: float, delta: float) -> float:
    """Low-temperature correction (F - E) L/(hbar c) for delta > 0.

    -(1/720 pi x)[5 (pi^2 - 6 d(pi-d)) tau^2 + tau^4]; the expansion holds for
    tau << 1 and delta > 0 (at delta = 0 the pole structure differs and the
    Matsubara sum is used instead).
    """
    if tau > 0.5:
        warnings.warn(f"low-temperature expansion used at tau={tau} > 0.5", stacklevel=2)
    if delta <= 0.0:
        warnings.warn(
            "low-temperature expansion is not valid at delta = 0; "
            "falling back to the Matsubara sum",
            stacklevel=2,
        )
        fe, _ = pfa_free_energy(x, tau, delta)
        return fe - pfa_energy_T0(x, delta)
    bracket = 5.0 * (math.pi**2 - 6.0 * delta * (math.pi - delta)) * tau**2 + tau**4
    return -bracket / (720.0 * math.pi * x)


def pfa_high_T(x: float, delta: float) -> float:
    """High-temperature PFA free energy in units k_B T: -(1/4x) Re Li_3(e^{2 i delta})."""
    return -re_polylog_circle(3, 2.0 * delta) / (4.0 * x)


def pfa_force_bracket(delta: float, tau: float, rel_tol: float = 1e-12) -> float:
    """Force zero-locator: sum_n w_n [Re Li_3(z_n) + 2 n tau Re Li_2(z_n)].

    Proportional to -F; tau is treated as L-dependent (tau = 2 pi L/lambda_T)
    when differentiating with respect to L.
    """
    acc = re_polylog_circle(3, 2.0 * delta)
    if tau == 0.0:
        raise DomainError("bracket defined for tau > 0; the T = 0 root is algebraic")
    n = 1
    while True:
        z = cmath.exp(2.0j * delta - 2.0 * n * tau)
        term = polylog_disk(3, z).real + 2.0 * n * tau * polylog_disk(2, z).real
        acc += 2.0 * term
        if abs(term) < rel_tol * max(abs(acc), 1e-3):
            return acc
        n += 1
        if n > 20_000_000:
            raise ConvergenceError("force bracket sum did not converge")


def _brentq(fun, a, b, tol=1e-14, maxiter=200):
    from scipy.optimize import brentq

    return brentq(fun, a, b, xtol=tol, maxiter=maxiter)


def pfa_critical_angle(tau: float) -> float:
    """Angle at which the PFA Casimir force vanishes; monotone decreasing in tau."""
    if tau < 0.0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return DELTA_CRIT_T0
    lo, hi = 0.88 * math.pi / 4.0, 1.0 * math.pi / 4.0
    if tau > 25.0:
        fun = lambda d: re_polylog_circle(3, 2.0 * d)
    else:
        fun = lambda d: pfa_force_bracket(d, tau)
    flo, fhi = fun(lo), fun(hi)
    if flo * fhi > 0.0:
        raise ConvergenceError(
            f"no sign change of the PFA force bracket in [{lo}, {hi}] at tau={tau}"
        )
    return _brentq(fun, lo, hi)


def pfa_geometric_correction(x: float, u: float, delta: float) -> float:
    """Leading curvature correction (E - E_PFA) L/(hbar c), valid for x << 1."""
    if not 0.0 <= u <= 0.25:
        raise DomainError(f"u must lie in [0, 1/4], got {u}")
    b1 = 20.0 * (math.pi**2 - 6.0 * delta * (math.pi - delta))
    b2 = (1.0 - 3.0 * u) / 3.0 * (math.pi**4 - 30.0 * delta**2 * (math.pi - delta) ** 2)
    return (b1 - b2) / (720.0 * math.pi)
