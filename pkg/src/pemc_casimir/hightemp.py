r"""Exact zero-frequency (high-temperature) physics: closed-form single and
double round-trip traces and the rational interpolation model.

The natural variables are the conformally invariant distance y = 1 + x +
(u/2) x^2 and

    alpha_pm = (1 - 2u +- sqrt(1 - 4u))/(2u),    z = 2y + alpha_+ + alpha_-,

with alpha_+ alpha_- = 1.  The sphere-plane limit u -> 0 (alpha_- -> 0,
alpha_+ -> inf) is evaluated analytically by a dedicated function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DomainError

__all__ = [
    "ConformalGeometry",
    "RationalModelCoeffs",
    "tr_m_pec_pec",
    "tr_m_pec_pmc",
    "tr_m_sphere_plane",
    "single_roundtrip_highT",
    "double_roundtrip_u0",
    "rational_model",
    "rational_model_table",
]

#: below this y - 1 the closed forms lose digits; evaluated in mpmath instead
_Y_SWITCH = 1e-3


@dataclass(frozen=True)
class ConformalGeometry:
    """Conformal variables (y, u) with derived alpha_pm and z."""

    y: float
    u: float

    def __post_init__(self):
        if not self.y > 1.0:
            raise DomainError(f"y must exceed 1, got {self.y}")
        if not 0.0 <= self.u <= 0.25:
            raise DomainError(f"u must lie in [0, 1/4], got {self.u}")

    @property
    def alpha_minus(self) -> float:
        if self.u == 0.0:
            return 0.0
        return 2.0 * self.u / (1.0 - 2.0 * self.u + math.sqrt(1.0 - 4.0 * self.u))

    @property
    def alpha_plus(self) -> float:
        if self.u == 0.0:
            return math.inf
        return 1.0 / self.alpha_minus

    @property
    def z(self) -> float:
        return 2.0 * self.y + self.alpha_plus + self.alpha_minus


def _trace_closed(y, u, kind, mp_ctx=None):
    """Shared evaluation of the PEC-PEC / PEC-PMC closed forms."""
    if mp_ctx is None:
        log, sqrt = math.log, math.sqrt
        y = float(y)
    else:
        log, sqrt = mp_ctx.log, mp_ctx.sqrt
        y = mp_ctx.mpf(y)
        u = mp_ctx.mpf(u)
    am = 2.0 * u / (1.0 - 2.0 * u + sqrt(1.0 - 4.0 * u))
    ap = 1.0 / am
    z = 2.0 * y + ap + am
    big_log = log(z * z * (y * y - 1.0) / (y * z + 0.5) ** 2)
    if kind == "pec-pec":
        out = y / (y * y - 1.0) + 1.0 / z + z / 6.0 * big_log
        log_pref = 1.0 / 6.0
    else:
        out = y / (y * y - 1.0) + (z - 2.0 * y) / 2.0 * big_log
        log_pref = 0.5
    for alpha in (ap, am):
        root = sqrt(alpha * z)
        base = 2.0 * y * y + alpha * y - 1.0
        out -= 1.0 / (2.0 * y + alpha) - log_pref / (sqrt(z) * alpha ** 1.5) * log(
            (base + root) / (base - root)
        )
    return out


def _trace(y, u, kind):
    if not y > 1.0:
        raise DomainError(f"y must exceed 1, got {y}")
    if not 0.0 < u <= 0.25:
        raise DomainError(f"u must lie in (0, 1/4], got {u}; use tr_m_sphere_plane for u = 0")
    if y - 1.0 < _Y_SWITCH:
        import mpmath as mp

        with mp.workdps(40):
            return float(_trace_closed(y, u, kind, mp_ctx=mp))
    return float(_trace_closed(y, u, kind))


def tr_m_pec_pec(y: float, u: float) -> float:
    """Zero-frequency single round-trip trace for two PEC spheres."""
    return _trace(y, u, "pec-pec")


def tr_m_pec_pmc(y: float, u: float) -> float:
    """Zero-frequency single round-trip trace for a PEC and a PMC sphere."""
    return _trace(y, u, "pec-pmc")


def tr_m_sphere_plane(y: float) -> float:
    """Sphere-plane (u = 0) limit, equal for PEC-PEC and PEC-PMC."""
    if not y > 1.0:
        raise DomainError(f"y must exceed 1, got {y}")
    if y - 1.0 < _Y_SWITCH:
        import mpmath as mp

        with mp.workdps(40):
            ym = mp.mpf(y)
            val = ym / (ym * ym - 1.0) - 1.0 / (2.0 * ym) + ym / 2.0 * mp.log(
                (ym * ym - 1.0) / (ym * ym)
            )
            return float(val)
    return y / (y * y - 1.0) - 1.0 / (2.0 * y) + 0.5 * y * math.log((y * y - 1.0) / (y * y))


def single_roundtrip_highT(delta: float, y: float, u: float) -> float:
    """Single round-trip free energy F_T^(1) in units of k_B T.

    tr M(0) = cos^2(delta) tr M_PEC-PEC - sin^2(delta) tr M_PEC-PMC; returns
    -(1/2) tr M(0).
    """
    c2 = math.cos(delta) ** 2
    s2 = math.sin(delta) ** 2
    if u == 0.0:
        tr = (c2 - s2) * tr_m_sphere_plane(y)
    else:
        tr = c2 * tr_m_pec_pec(y, u) - s2 * tr_m_pec_pmc(y, u)
    return -0.5 * tr


def double_roundtrip_u0(y: float):
    """Sphere-plane double round-trip traces (tr M^2_PEC-PEC, tr M^2_PEC-PMC).

    Equal to the single round-trip closed forms at (2 y^2 - 1, u = 1/4).
    """
    if not y > 1.0:
        raise DomainError(f"y must exceed 1, got {y}")
    y2 = y * y
    lead = (2.0 * y2 - 1.0) / (4.0 * y2 * (y2 - 1.0))
    big_log = math.log(y2**3 * (y2 - 1.0) / (y2 - 0.25) ** 4)
    small_log = math.log((4.0 * y2 * y - 3.0 * y + 1.0) / (4.0 * y2 * y - 3.0 * y - 1.0))
    pp = (
        lead
        + 1.0 / (4.0 * y2)
        + 2.0 * y2 / 3.0 * big_log
        - 2.0 / (4.0 * y2 - 1.0)
        + small_log / (6.0 * y)
    )
    pm = lead + big_log - 2.0 / (4.0 * y2 - 1.0) + small_log / (2.0 * y)
    return pp, pm


def double_roundtrip_combination(delta: float, y: float):
    """tr M^2 at u = 0: cos^2(2 delta) tr M^2_PP - sin^2(2 delta) tr M^2_PM."""
    pp, pm = double_roundtrip_u0(y)
    return math.cos(2.0 * delta) ** 2 * pp - math.sin(2.0 * delta) ** 2 * pm


def sumrule_double_roundtrip_u0(y: float) -> float:
    """Double-round-trip approximation of the scaled high-T sum rule at u = 0.

    The single round trip integrates to zero over delta; two round trips give
    I = (pi/16) y d/dy [tr M^2_PP - tr M^2_PM] (the Fig.-7 dashed curve).
    """
    h = 1e-5 * (y - 1.0)

    def diff(yv):
        pp, pm = double_roundtrip_u0(yv)
        return pp - pm

    deriv = (diff(y + h) - diff(y - h)) / (2.0 * h)
    return math.pi / 16.0 * y * deriv


@dataclass(frozen=True)
class RationalModelCoeffs:
    """One row of the rational-model table."""

    delta: float
    nu1: float
    nu2: float
    mu1: float
    mu2: float
    max_dev: float


def rational_model_table() -> dict:
    """Rational-model coefficients keyed by delta, loaded from the data file."""
    text = resources.files("pemc_casimir").joinpath("data/rational_model_coeffs.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        num, den, nu1, nu2, mu1, mu2, dev = line.split()
        delta = float(num) * math.pi / float(den) if float(den) else 0.0
        table[delta] = RationalModelCoeffs(
            delta=delta,
            nu1=float(nu1),
            nu2=float(nu2),
            mu1=float(mu1),
            mu2=float(mu2),
            max_dev=float(dev),
        )
    return table


_TABLE_CACHE: dict | None = None


def rational_model(delta: float, y: float) -> float:
    """Rational interpolation Phi_delta(y) of the ratio F_T / F_T^(1).

    Only the tabulated delta rows {0, pi/6, pi/3, pi/2} are supported.
    """
    global _TABLE_CACHE
    if _TABLE_CACHE is None:
        _TABLE_CACHE = rational_model_table()
    row = None
    for key, val in _TABLE_CACHE.items():
        if abs(delta - key) < 1e-12:
            row = val
            break
    if row is None:
        raise DomainError(
            f"no rational-model coefficients for delta={delta}; "
            f"tabulated: {sorted(_TABLE_CACHE)}"
        )
    if not y > 1.0:
        raise DomainError(f"y must exceed 1, got {y}")
    e = math.expm1(y - 1.0)
    return ((e + row.nu1) * (e + row.nu2)) / ((e + row.mu1) * (e + row.mu2))
