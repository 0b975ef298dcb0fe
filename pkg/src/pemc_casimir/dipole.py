r"""Closed-form large-distance (dipole) physics: dipole-dipole and
dipole-plane free energies at arbitrary temperature, critical angles, and the
analytic sum-rule integrals.

The thermal channel functions are polynomials in g = tau~/sinh(tau~) and
b = g cosh(tau~) = tau~ coth(tau~); products of g and b stay bounded, so the
large-tau~ overflow of cosh never appears explicitly.  Dimensionless returns:
free energies carry units hbar c/script_l, forces hbar c/script_l^2, and the
sum-rule integral hbar c/script_l^2 (force integrated over the material
angle delta).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "DipoleThermalFunctions",
    "thermal_functions",
    "thermal_functions_derivative",
    "dipole_dipole_free_energy",
    "dipole_dipole_force",
    "dipole_dipole_critical_angle",
    "dipole_plane_free_energy",
    "dipole_plane_force",
    "sumrule_dipole_dipole",
    "sumrule_dipole_plane",
]

#: beyond this radius-to-distance ratio the neglected (R/script_l)^6 terms matter
VALIDITY_RATIO = 0.2


@dataclass(frozen=True)
class DipoleThermalFunctions:
    """Channel functions of the effective temperature tau~ = 2 pi script_l/lambda_T."""

    f_pp: float
    f_pp_bar: float
    g_pp: float
    g_pp_bar: float


def _g_b(tau_tilde: float):
    """g = tau~/sinh(tau~) and b = tau~ coth(tau~), overflow safe."""
    t = tau_tilde
    if t == 0.0:
        return 1.0, 1.0
    if t < 1e-4:
        t2 = t * t
        return 1.0 - t2 / 6.0, 1.0 + t2 / 3.0
    if t > 30.0:
        e = math.exp(-t)
        g = 2.0 * t * e / (1.0 - e * e)
        b = t * (1.0 + e * e) / (1.0 - e * e)
        return g, b
    s = math.sinh(t)
    return t / s, t * math.cosh(t) / s


def thermal_functions(tau_tilde: float) -> DipoleThermalFunctions:
    """Polarization-conserving and -mixing channel functions f and g."""
    if tau_tilde < 0.0:
        raise DomainError(f"tau_tilde must be >= 0, got {tau_tilde}")
    a, b = _g_b(tau_tilde)
    a2 = a * a
    a4 = a2 * a2
    f_pp = 0.625 * (6.0 * b + 6.0 * a2 + 5.0 * a2 * b + a4 + 2.0 * a2 * b * b
                    + 2.0 * a4 * b + a2 * b**3)
    f_pp_bar = 0.5 * (a2 * b + a4 + 2.0 * a2 * b * b + 2.0 * a4 * b + a2 * b**3)
    g_pp = 0.1875 * (2.0 * b + 2.0 * a2 + a2 * b)
    g_pp_bar = 0.1875 * a2 * b
    return DipoleThermalFunctions(f_pp=f_pp, f_pp_bar=f_pp_bar, g_pp=g_pp, g_pp_bar=g_pp_bar)


def thermal_functions_derivative(tau_tilde: float) -> DipoleThermalFunctions:
    """d/dtau~ of the channel functions, from g' = g(1-b)/tau~, b' = (b-g^2)/tau~."""
    t = tau_tilde
    a, b = _g_b(t)
    if t < 1e-6:
        da, db = 0.0, 0.0
    else:
        da = a * (1.0 - b) / t
        db = (b - a * a) / t
    a2, a3 = a * a, a**3
    d_a2 = 2.0 * a * da
    d_a4 = 4.0 * a3 * da
    f_pp = 0.625 * (
        6.0 * db + 6.0 * d_a2 + 5.0 * (d_a2 * b + a2 * db) + d_a4
        + 2.0 * (d_a2 * b * b + 2.0 * a2 * b * db)
        + 2.0 * (d_a4 * b + a2 * a2 * db)
        + d_a2 * b**3 + 3.0 * a2 * b * b * db
    )
    f_pp_bar = 0.5 * (
        d_a2 * b + a2 * db + d_a4
        + 2.0 * (d_a2 * b * b + 2.0 * a2 * b * db)
        + 2.0 * (d_a4 * b + a2 * a2 * db)
        + d_a2 * b**3 + 3.0 * a2 * b * b * db
    )
    g_pp = 0.1875 * (2.0 * db + 2.0 * d_a2 + d_a2 * b + a2 * db)
    g_pp_bar = 0.1875 * (d_a2 * b + a2 * db)
    return DipoleThermalFunctions(f_pp=f_pp, f_pp_bar=f_pp_bar, g_pp=g_pp, g_pp_bar=g_pp_bar)


def _check_validity(rmax, script_l):
    if rmax / script_l > VALIDITY_RATIO:
        warnings.warn(
            f"dipole approximation marginal: max(R)/script_l = {rmax / script_l:.3f} > "
            f"{VALIDITY_RATIO}; neglected terms are O((R/script_l)^6)",
            stacklevel=3,
        )


def _bracket(delta, tf: DipoleThermalFunctions):
    c2 = math.cos(delta) ** 2
    s2 = math.sin(delta) ** 2
    return c2 * (tf.f_pp + tf.f_pp_bar) - s2 * (0.8 * tf.f_pp + 1.25 * tf.f_pp_bar)


def dipole_dipole_free_energy(r1, r2, script_l, tau_tilde, delta) -> float:
    """Free energy of two small PEMC spheres, in units hbar c / script_l."""
    _check_validity(max(r1, r2), script_l)
    tf = thermal_functions(tau_tilde)
    vol = (r1 * r2 / script_l**2) ** 3
    return -vol / (2.0 * math.pi) * _bracket(delta, tf)


def dipole_dipole_force(r1, r2, script_l, tau_tilde, delta) -> float:
    """Force -dF/dL at fixed radii and temperature, units hbar c/script_l^2."""
    tf = thermal_functions(tau_tilde)
    dtf = thermal_functions_derivative(tau_tilde)
    vol = (r1 * r2 / script_l**2) ** 3
    return -vol / (2.0 * math.pi) * (
        7.0 * _bracket(delta, tf) - tau_tilde * _bracket(delta, dtf)
    )


def dipole_dipole_critical_angle(tau_tilde: float) -> float:
    """Angle delta at which the dipole-dipole force vanishes."""
    tf = thermal_functions(tau_tilde)
    dtf = thermal_functions_derivative(tau_tilde)
    num = 7.0 * (tf.f_pp + tf.f_pp_bar) - tau_tilde * (dtf.f_pp + dtf.f_pp_bar)
    den = 7.0 * (0.8 * tf.f_pp + 1.25 * tf.f_pp_bar) - tau_tilde * (
        0.8 * dtf.f_pp + 1.25 * dtf.f_pp_bar
    )
    if den <= 0.0 or num <= 0.0:
        raise DomainError("force bracket does not change sign")
    return math.atan(math.sqrt(num / den))


def dipole_plane_free_energy(r, script_l, tau_tilde, delta) -> float:
    """Free energy of a small PEMC sphere facing a PEMC plane, units hbar c/script_l."""
    _check_validity(r, script_l)
    tf = thermal_functions(tau_tilde)
    return -((r / script_l) ** 3) / (2.0 * math.pi) * math.cos(2.0 * delta) * (
        tf.g_pp + tf.g_pp_bar
    )


def dipole_plane_force(r, script_l, tau_tilde, delta) -> float:
    """Force for the dipole-plane setup, units hbar c/script_l^2."""
    tf = thermal_functions(tau_tilde)
    dtf = thermal_functions_derivative(tau_tilde)
    g = tf.g_pp + tf.g_pp_bar
    dg = dtf.g_pp + dtf.g_pp_bar
    return -((r / script_l) ** 3) / (2.0 * math.pi) * math.cos(2.0 * delta) * (
        4.0 * g - tau_tilde * dg
    )


def sumrule_dipole_dipole(r1, r2, script_l, tau_tilde) -> float:
    """Closed form of int_0^{pi/2} F d(delta), units hbar c/script_l^2."""
    a, b = _g_b(tau_tilde)
    a2 = a * a
    bracket = 18.0 * b + 18.0 * a2 + 14.0 * a2 * b + 2.0 * (2.0 * a2 * b * b + a2 * a2)
    return -((r1 * r2 / script_l**2) ** 3) / 32.0 * bracket


def sumrule_dipole_plane() -> float:
    """int_0^{pi/2} cos(2 delta) d(delta) vanishes identically."""
    return 0.0
