r"""Geometric polarization-transformation coefficients between the TE/TM basis
of the plane waves and the scattering-plane basis of the amplitude matrix.

The coefficients are constructed from the polarization unit vectors

.. math::
    \hat e_\mathrm{TE} \propto \hat z \times \hat K, \qquad
    \hat e_\mathrm{TM} = \hat e_\mathrm{TE} \times \hat K

at imaginary frequency, where the wave vectors K = (k cosphi, k sin phi,
+- i kappa) have imaginary z-components and all bilinear products use the
complex-valued (non-conjugated) dot product.  Writing the basis change on the
in- and out-side as rotations by (complex) angles alpha_in, alpha_out, the
four coefficients are

    A = cos(out) cos(in),  B = sin(out) sin(in),
    C = sin(out) cos(in),  D = -cos(out) sin(in),

all real at imaginary frequency.  The closed forms below are the simplified
dot products; :func:`polarization_coefficients_vectors` keeps the explicit
3-vector construction as an independent cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError

__all__ = ["polarization_coefficients", "polarization_coefficients_vectors"]


def polarization_coefficients(k: float, phi: float, kp: float, phip: float, xi: float):
    """Coefficients (A, B, C, D) for out-wave (k, phi, -) and in-wave (kp, phip, +).

    All wavenumbers and the imaginary frequency xi share one inverse-length
    unit with c = 1.  The specular limit xi -> 0 gives (1, 0, 0, 0).
    """
    if k == 0.0 and kp == 0.0:
        raise DomainError("degenerate direction: k = k' = 0")
    if xi <= 0.0:
        raise DomainError("xi must be positive; the xi = 0 kernel is handled separately")
    dphi = phi - phip
    ct, st = math.cos(dphi), math.sin(dphi)
    kap = math.sqrt(k * k + xi * xi)
    kapp = math.sqrt(kp * kp + xi * xi)
    xi2 = xi * xi
    z = -(k * kp * ct + kap * kapp) / xi2
    denom = z * z - 1.0
    if denom <= 0.0:
        raise DomainError("backscattering point z = -1 (k = k', dphi = pi) is degenerate")
    root = math.sqrt(denom)
    cos_out = (kapp * k + kap * kp * ct) / (xi2 * root)
    cos_in = (kap * kp + kapp * k * ct) / (xi2 * root)
    sin_out = -kp * st / (xi * root)
    sin_in = -k * st / (xi * root)
    return (
        cos_out * cos_in,
        sin_out * sin_in,
        sin_out * cos_in,
        -cos_out * sin_in,
    )


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.sqrt(v @ v)


def polarization_coefficients_vectors(k, phi, kp, phip, xi):
    """Same coefficients from explicit complex 3-vectors (reference path)."""
    zhat = np.array([0.0, 0.0, 1.0], dtype=complex)
    k_out = np.array([k * math.cos(phi), k * math.sin(phi), -1j * math.sqrt(k * k + xi * xi)])
    k_in = np.array([kp * math.cos(phip), kp * math.sin(phip), 1j * math.sqrt(kp * kp + xi * xi)])
    n_out = k_out / (1j * xi)
    n_in = k_in / (1j * xi)

    def te_tm(n):
        te = _unit(np.cross(zhat, n))
        tm = np.cross(te, n)
        return te, tm

    te_out, tm_out = te_tm(n_out)
    te_in, tm_in = te_tm(n_in)
    e_perp = _unit(np.cross(n_in, n_out))
    e_par_out = np.cross(e_perp, n_out)
    e_par_in = np.cross(e_perp, n_in)

    cos_out = tm_out @ e_par_out
    sin_out = tm_out @ e_perp
    cos_in = tm_in @ e_par_in
    sin_in = tm_in @ e_perp
    coeffs = (cos_out * cos_in, sin_out * sin_in, sin_out * cos_in, -cos_out * sin_in)
    return tuple(c.real for c in coeffs)
