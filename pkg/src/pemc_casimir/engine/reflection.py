r"""Single plane-wave reflection matrix elements of a PEMC sphere (reference
path; the kernel assembly uses the fused numba implementation)."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..mie import amplitude_scattering_scaled
from .polarization import polarization_coefficients

__all__ = ["reflection_planewave", "reflection_planewave_zero_freq"]


def _combine(s_mat, a, b, c, d):
    s11, s12 = s_mat[0]
    s21, s22 = s_mat[1]
    return np.array(
        [
            [a * s11 + b * s22 + c * s21 - d * s12, a * s12 - b * s21 + c * s22 + d * s11],
            [a * s21 - b * s12 - c * s11 - d * s22, a * s22 + b * s11 - c * s12 + d * s21],
        ]
    )


def reflection_planewave(theta, radius, k, phi, kp, phip, xi, ell_max=None):
    """<k,p,-|R|k',p',+> for a PEMC sphere; all inputs share one unit, c = 1.

    The prefactor carries 1/kappa of the outgoing wave.  Magnitudes grow like
    exp(2 xi radius) and overflow for xi radius > ~350; the engine path keeps
    the exponent fused with the translation factor instead.
    """
    theta = getattr(theta, "theta", float(theta))
    if xi <= 0.0:
        raise DomainError("xi must be positive; use reflection_planewave_zero_freq")
    kappa = math.sqrt(k * k + xi * xi)
    kappap = math.sqrt(kp * kp + xi * xi)
    z = -(k * kp * math.cos(phi - phip) + kappa * kappap) / xi**2
    a, b, c, d = polarization_coefficients(k, phi, kp, phip, xi)
    s_hat, logscale = amplitude_scattering_scaled(ell_max, z, xi * radius, theta)
    pref = 2.0 * math.pi / (xi * kappa) * math.exp(logscale)
    return pref * _combine(s_hat, a, b, c, d)


def _s_pec_hat(chi):
    """(S_TM, S_TE)/(xi R/c) of a perfect reflector at zero frequency."""
    if chi < 1e-3:
        c2 = chi * chi
        return 0.5 * c2 * (1.0 + c2 / 12.0), -0.25 * c2 * (1.0 + c2 / 9.0)
    stm = math.cosh(chi) - 1.0
    ste = -(math.cosh(chi) - 2.0 * (chi * math.sinh(chi) - math.cosh(chi) + 1.0) / chi**2)
    return stm, ste


def reflection_planewave_zero_freq(theta, radius, k, phi, kp, phip):
    """Zero-frequency limit of the reflection element; finite because the
    c/xi prefactor cancels the xi R/c scale of the amplitude matrix."""
    theta = getattr(theta, "theta", float(theta))
    if k <= 0.0 or kp <= 0.0:
        raise DomainError("wavenumbers must be positive")
    chi = 2.0 * radius * math.sqrt(k * kp) * abs(math.cos((phi - phip) / 2.0))
    stm, ste = _s_pec_hat(chi)
    s0 = 0.5 * (stm + ste)
    s1 = 0.5 * (stm - ste)
    c2t, s2t = math.cos(2.0 * theta), math.sin(2.0 * theta)
    rot = np.array([[s0 + s1 * c2t, s1 * s2t], [s1 * s2t, s0 - s1 * c2t]])
    return (2.0 * math.pi * radius / k) * rot
