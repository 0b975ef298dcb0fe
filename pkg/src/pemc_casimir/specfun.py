r"""Special functions: half-integer modified Bessel ratios, polylogarithms and
Bernoulli polynomials.

The central objects are the logarithmic-derivative ratios

.. math::
    \{\mathcal{I}, z\} = \frac{\mathcal{I}'_{\ell+1/2}(z)}{\mathcal{I}_{\ell+1/2}(z)}
        + \frac{1}{2z},  \qquad \mathcal{I} \in \{I, K\},

which appear in all sphere reflection coefficients, and the real part of the
polylogarithm on the unit circle needed by the short-distance asymptotics.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ZETA3
from .errors import DomainError

__all__ = [
    "LogDerivRatio",
    "BesselTable",
    "bessel_ratio",
    "bessel_table",
    "re_polylog_circle",
    "polylog_disk",
    "bernoulli_poly",
]


@dataclass(frozen=True)
class LogDerivRatio:
    """Value of {I,z} or {K,z} at half-integer order ell + 1/2."""

    kind: str
    ell: int
    z: float
    value: float


def _iv_ratio_backward(ell_max, z):
    """Ratios I_{j+1/2}(z)/I_{j-1/2}(z) for j = 1..ell_max+1.

    The Gauss continued fraction for the ratio is evaluated by backward
    recurrence.  The starting order is chosen such that the error of the
    asymptotic seed is damped below machine precision; the damping factor
    accumulated over the downward sweep is (I_top/I_j)^2.
    """
    jtop = int(math.ceil(math.sqrt((ell_max + 2) ** 2 + 40.0 * z))) + 10
    nu = jtop + 0.5
    # asymptotic seed for I_{nu+1/2}/I_{nu-1/2}; its error washes out downward
    rho = z / (nu + 1.0 + math.sqrt((nu + 1.0) ** 2 + z * z))
    out = np.empty(ell_max + 2)
    for j in range(jtop, 0, -1):
        rho = 1.0 / (2.0 * (j + 0.5) / z + rho)
        if j <= ell_max + 1:
            out[j] = rho
    out[0] = np.nan
    return out


def _kv_ratio_forward(ell_max, z):
    """Ratios K_{j+1/2}(z)/K_{j-1/2}(z) for j = 1..ell_max+1, stable upward."""
    out = np.empty(ell_max + 2)
    out[0] = np.nan
    t = 1.0 + 1.0 / z
    out[1] = t
    for j in range(1, ell_max + 1):
        t = 1.0 / t + 2.0 * (j + 0.5) / z
        out[j + 1] = t
    return out


@dataclass(frozen=True)
class BesselTable:
    """Half-integer Bessel data for orders ell = 1..ell_max at argument z.

    Arrays are indexed by ell (index 0 unused).  ``ratio_i``/``ratio_k`` hold
    {I,z} and {K,z}; ``log_i``/``log_k`` hold log I_{ell+1/2}(z) and
    log K_{ell+1/2}(z).
    """

    z: float
    ell_max: int
    ratio_i: np.ndarray
    ratio_k: np.ndarray
    log_i: np.ndarray
    log_k: np.ndarray


def bessel_table(ell_max: int, z: float) -> BesselTable:
    """Tabulate {I,z}, {K,z} and log I, log K for ell = 1..ell_max."""
    if z <= 0.0:
        raise DomainError(f"argument must be positive, got z={z}")
    if ell_max < 1:
        raise DomainError(f"ell_max must be >= 1, got {ell_max}")
    rho = _iv_ratio_backward(ell_max, z)
    t = _kv_ratio_forward(ell_max, z)

    ells = np.arange(ell_max + 2)
    ratio_i = np.empty(ell_max + 1)
    ratio_k = np.empty(ell_max + 1)
    ratio_i[0] = np.nan
    ratio_k[0] = np.nan
    ratio_i[1:] = (ells[1 : ell_max + 1] + 1.0) / z + rho[2 : ell_max + 2]
    ratio_k[1:] = -ells[1 : ell_max + 1] / z - 1.0 / t[1 : ell_max + 1]

    # log I_{1/2} = log( sqrt(2/pi z) sinh z ), log K_{1/2} = log( sqrt(pi/2z) e^-z )
    log_i_half = 0.5 * math.log(2.0 / (math.pi * z)) + z + math.log1p(-math.exp(-2.0 * z)) - math.log(2.0)
    log_k_half = 0.5 * math.log(math.pi / (2.0 * z)) - z
    log_i = np.empty(ell_max + 1)
    log_k = np.empty(ell_max + 1)
    log_i[0] = log_i_half
    log_k[0] = log_k_half
    log_i[1:] = log_i_half + np.cumsum(np.log(rho[1 : ell_max + 1]))
    log_k[1:] = log_k_half + np.cumsum(np.log(t[1 : ell_max + 1]))
    return BesselTable(z=z, ell_max=ell_max, ratio_i=ratio_i, ratio_k=ratio_k, log_i=log_i, log_k=log_k)


def bessel_ratio(kind: str, ell: int, z: float) -> LogDerivRatio:
    """Evaluate {I,z} or {K,z} at order ell + 1/2.

    Parameters
    ----------
    kind : str
        "I" or "K".
    ell : int
        multipole order, >= 1
    z : float
        positive argument; stable up to z of order 1e5 and beyond

    Returns
    -------
    LogDerivRatio
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    if z <= 0.0:
        raise DomainError(f"argument must be positive, got z={z}")
    if kind == "I":
        rho = _iv_ratio_backward(ell, z)
        value = (ell + 1.0) / z + rho[ell + 1]
    elif kind == "K":
        t = _kv_ratio_forward(ell, z)
        value = -ell / z - 1.0 / t[ell]
    else:
        raise DomainError(f"kind must be 'I' or 'K', got {kind!r}")
    return LogDerivRatio(kind=kind, ell=ell, z=z, value=value)


# --- polylogarithms ---------------------------------------------------------

# zeta(2n) for n = 1..30, used in the log-series for Re Li_3 on the circle
_ZETA_EVEN = np.array(
    [
        1.6449340668482264365,
        1.0823232337111381916,
        1.0173430619844491397,
        1.0040773561979443394,
        1.0009945751278180853,
        1.0002460865533080483,
        1.0000612481350587048,
        1.0000152822594086519,
        1.0000038172932649998,
        1.0000009539620338728,
        1.0000002384505027277,
        1.0000000596081890513,
        1.0000000149015548284,
        1.0000000037253340248,
        1.0000000009313274324,
        1.0000000002328311834,
        1.0000000000582077209,
        1.0000000000145519219,
        1.0000000000036379795,
        1.0000000000009094948,
        1.0000000000002273737,
        1.0000000000000568434,
        1.0000000000000142109,
        1.0000000000000035527,
        1.0000000000000008882,
        1.0000000000000002220,
        1.0000000000000000555,
        1.0000000000000000139,
        1.0000000000000000035,
        1.0000000000000000009,
    ]
)


def _re_li3_circle(theta):
    """Re Li_3(e^{i theta}) for theta in [0, pi] via the log-series.

    Obtained by integrating d^2/dtheta^2 Re Li_3 = log(2 sin(theta/2)) twice,
    with log(sin x / x) expanded in even powers.  Converges for theta < 2 pi;
    restricted to [0, pi] the tail decays at least like 4^{-n}.
    """
    if theta == 0.0:
        return ZETA3
    acc = ZETA3 + 0.5 * theta * theta * math.log(theta) - 0.75 * theta * theta
    ratio = (theta / (2.0 * math.pi)) ** 2
    power = theta * theta * ratio
    for n in range(1, len(_ZETA_EVEN) + 1):
        term = _ZETA_EVEN[n - 1] * power / (n * (2 * n + 1) * (2 * n + 2))
        acc -= term
        if term < 1e-18 * abs(acc):
            break
        power *= ratio
    return acc


def re_polylog_circle(s: int, phi: float) -> float:
    """Re Li_s(e^{i phi}) = sum_k cos(k phi)/k^s for integer s >= 2.

    Periodic in phi with period 2 pi and even in phi.  For s = 2 the exact
    Bernoulli closed form is used, for s = 3 an accelerated log-series, and
    for s >= 4 the direct series with the tail bounded below 1e-14.
    """
    if s < 2:
        raise DomainError(f"order must be >= 2, got s={s}")
    theta = math.fmod(phi, 2.0 * math.pi)
    if theta < 0.0:
        theta += 2.0 * math.pi
    if s == 2:
        return math.pi ** 2 / 6.0 - 0.5 * math.pi * theta + 0.25 * theta * theta
    if theta > math.pi:
        theta = 2.0 * math.pi - theta
    if s == 3:
        return _re_li3_circle(theta)
    # direct series; tail sum_{k>K} 1/k^s < K^{1-s}/(s-1)
    kmax = int(math.ceil((1.0 / ((s - 1) * 1e-14)) ** (1.0 / (s - 1)))) + 1
    k = np.arange(1, kmax + 1, dtype=float)
    return float(np.sum(np.cos(k * theta) / k**s))


def polylog_disk(s: int, z: complex) -> complex:
    """Li_s(z) for integer s in {2, 3} and |z| < 1 by direct series.

    The geometric tail bound |term|/(1-|z|) controls the truncation at a
    relative accuracy of 1e-14.
    """
    if s not in (2, 3):
        raise DomainError(f"order must be 2 or 3, got s={s}")
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise DomainError(f"|z| must be < 1, got |z|={r}")
    if r == 0.0:
        return 0.0 + 0.0j
    acc = 0.0 + 0.0j
    term = z
    k = 1
    while True:
        acc += term / k**s
        if abs(term) / (1.0 - r) < 1e-14 * max(abs(acc), 1e-300) * k**s:
            break
        k += 1
        term *= z
        if k > 10_000_000:  # unreachable for |z| bounded away from 1
            raise DomainError("series did not converge; |z| too close to 1")
    return acc


def bernoulli_poly(n: int, x: float) -> float:
    """Bernoulli polynomial B_n(x) for n in {2, 3, 4}."""
    if n == 2:
        return x * x - x + 1.0 / 6.0
    if n == 3:
        return x * (x * (x - 1.5) + 0.5)
    if n == 4:
        return x * x * (x * (x - 2.0) + 1.0) - 1.0 / 30.0
    raise DomainError(f"only n in {{2, 3, 4}} supported, got n={n}")
