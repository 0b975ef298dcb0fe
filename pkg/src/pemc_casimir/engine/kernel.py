r"""Discretized round-trip operator: assembly of azimuthal blocks, log-dets
and traces.

The round-trip operator M = T R2 T R1 is evaluated on a Nystrom grid for the
radial wave number (Gauss-Legendre after the rational map k = s t/(1-t)) and
Fourier-decomposed in the azimuth, where it is block diagonal.  The
translation factors e^{-kappa L'} of the two legs are split so that each
reflection carries e^{-(kappa+kappa')(R_s + L/2)}, keeping every factor
bounded.  Blocks at azimuthal order m and -m are complex conjugate, so

    f_n = logdet(1 - M_0) + 2 sum_{m>0} Re logdet(1 - M_m).

Material angles enter only through three per-sphere component matrices
(unit, cos 2 theta, sin 2 theta), which makes scans over material parameters
cheap once the expensive multipole sums are done.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..errors import DomainError, TruncationError
from ..mie import pemc_ell_arrays
from .amplitude import PairData, sphere_pair_data_xi, sphere_pair_data_zero
from .geometry import Geometry

__all__ = [
    "Discretization",
    "RoundTripKernel",
    "KernelData",
    "build_kernel",
    "build_kernel_data",
    "logdet_f_n",
    "trace_f_n",
]


def _next_odd_grid(n: int) -> int:
    """Smallest odd 7-smooth integer >= n (fast FFT length avoiding phi = pi)."""
    m = max(int(n), 15)
    if m % 2 == 0:
        m += 1
    while True:
        k = m
        for p in (3, 5, 7):
            while k % p == 0:
                k //= p
        if k == 1:
            return m
        m += 2


@dataclass(frozen=True)
class Discretization:
    """Numerical resolution of the round-trip kernel."""

    n_k: int
    n_phi: int
    m_max: int
    k_scale: float = 2.0
    ell_cap_factor: float = 1.0
    #: exponent below which kernel elements are dropped (e^cutoff relative)
    cutoff: float = -46.0

    @classmethod
    def auto(cls, geom: Geometry, refine: float = 1.0) -> "Discretization":
        """Default resolution per the PFA localization: node counts grow like
        sqrt(R/L) with the largest finite sphere radius."""
        rho = geom.r2 / geom.l_gap
        if not geom.is_sphere_plane:
            rho = max(rho, geom.r1 / geom.l_gap)
        rx = math.sqrt(max(rho, 1.0))
        n_k = int(refine * (math.ceil(8.0 * rx) + 20))
        m_est = int(refine * (math.ceil(6.0 * rx) + 18))
        n_phi = _next_odd_grid(2 * m_est + 9)
        return cls(n_k=n_k, n_phi=n_phi, m_max=m_est)

    def radial_grid(self):
        """Nodes and weights for int_0^inf dk via k = s t/(1-t)."""
        t, wt = np.polynomial.legendre.leggauss(self.n_k)
        t = 0.5 * (t + 1.0)
        wt = 0.5 * wt
        k = self.k_scale * t / (1.0 - t)
        w = self.k_scale * wt / (1.0 - t) ** 2
        return k, w


@dataclass
class KernelData:
    """Per-frequency reusable kernel data (material independent)."""

    geom: Geometry
    xi_hat: float
    disc: Discretization
    knodes: np.ndarray
    weights: np.ndarray
    kappa: np.ndarray
    sphere_plane: bool
    pair2: PairData
    pair1: PairData | None  # None for the plane or when radii coincide
    plane_diag: np.ndarray | None

    def _scatter(self, pd: PairData, m: int):
        """Assemble the three (2N, 2N) component matrices of one sphere."""
        n = self.disc.n_k
        dtype = np.float64 if pd.zero_freq else np.complex128
        comps = np.zeros((3, 2 * n, 2 * n), dtype=dtype)
        pi, pj = pd.pair_i, pd.pair_j
        off = pd.pair_i != pd.pair_j
        if pd.zero_freq:
            e0 = pd.data[:, 0, m]
            e1 = pd.data[:, 1, m]
            for c, (tm, te, mix) in ((0, (e0, e0, None)), (1, (e1, -e1, None))):
                comps[c][pi, pj] = tm
                comps[c][pi + n, pj + n] = te
                comps[c][pj[off], pi[off]] = tm[off]
                comps[c][pj[off] + n, pi[off] + n] = te[off]
            comps[2][pi, pj + n] = e1
            comps[2][pi + n, pj] = e1
            comps[2][pj[off], pi[off] + n] = e1[off]
            comps[2][pj[off] + n, pi[off]] = e1[off]
            return comps
        for c in range(3):
            tmtm = pd.data[:, 4 * c + 0, m]
            tmte = pd.data[:, 4 * c + 1, m]
            tetm = pd.data[:, 4 * c + 2, m]
            tete = pd.data[:, 4 * c + 3, m]
            comps[c][pi, pj] = tmtm
            comps[c][pi, pj + n] = tmte
            comps[c][pi + n, pj] = tetm
            comps[c][pi + n, pj + n] = tete
            # pair exchange maps (A, B, C, D) -> (A, B, D, C): the unit
            # component mirrors as its polarization transpose, the material
            # components (symmetric in the polarization indices) copy plainly
            comps[c][pj[off], pi[off]] = tmtm[off]
            comps[c][pj[off] + n, pi[off] + n] = tete[off]
            if c == 0:
                comps[c][pj[off], pi[off] + n] = tetm[off]
                comps[c][pj[off] + n, pi[off]] = tmte[off]
            else:
                comps[c][pj[off], pi[off] + n] = tmte[off]
                comps[c][pj[off] + n, pi[off]] = tetm[off]
        return comps

    def sphere_block(self, pd: PairData, theta: float, m: int):
        c0, cc, cs = self._scatter(pd, m)
        return c0 + math.cos(2.0 * theta) * cc + math.sin(2.0 * theta) * cs

    def plane_apply(self, mat, theta: float):
        """Right-multiply mat by the plane factor Omega(theta) e^{-2 kappa a_p}."""
        n = self.disc.n_k
        c2, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
        x = mat * self.plane_diag[None, :]
        out = np.empty_like(x)
        out[:, :n] = c2 * x[:, :n] + s2 * x[:, n:]
        out[:, n:] = s2 * x[:, :n] - c2 * x[:, n:]
        return out

    def round_trip_block(self, theta1: float, theta2: float, m: int):
        """The matrix of M(i xi_n) for azimuthal order m.

        Sphere 1 reflects upwards; relative to the downward-reflecting
        element its polarization-mixing coefficients C, D change sign, which
        in the azimuthal Fourier domain is the complex conjugate block.
        """
        g2 = self.sphere_block(self.pair2, theta2, m)
        if self.sphere_plane:
            return self.plane_apply(g2, theta1)
        g1 = self.sphere_block(self.pair1 if self.pair1 is not None else self.pair2, theta1, m)
        return g2 @ np.conj(g1)


def _ell_cap(xi_tilde: float, rho: float, xi_hat: float, factor: float) -> int:
    return int(factor * (3.0 * xi_tilde + 1.6 * rho * (50.0 + 4.0 * xi_hat) + 120.0))


def build_kernel_data(
    geom: Geometry, xi_hat: float, disc: Discretization | None = None
) -> KernelData:
    """Material-independent kernel data at dimensionless frequency xi_hat = xi L / c."""
    if disc is None:
        disc = Discretization.auto(geom)
    knodes, weights = disc.radial_grid()
    el = geom.l_gap
    rho2 = geom.r2 / el
    a2 = rho2 + 0.5
    sphere_plane = geom.is_sphere_plane
    if xi_hat == 0.0:
        kappa = knodes.copy()
        pair2 = sphere_pair_data_zero(knodes, weights, rho2, a2, disc.n_phi, disc.m_max)
        pair1 = None
        if not sphere_plane:
            rho1 = geom.r1 / el
            if rho1 != rho2:
                pair1 = sphere_pair_data_zero(
                    knodes, weights, rho1, rho1 + 0.5, disc.n_phi, disc.m_max
                )
    else:
        kappa = np.sqrt(knodes**2 + xi_hat**2)

        def _pairs(rho):
            cap = _ell_cap(xi_hat * rho, rho, xi_hat, disc.ell_cap_factor)
            for attempt in range(3):
                q, rhom1, gamma, log_c1 = pemc_ell_arrays(xi_hat * rho, cap)
                try:
                    return sphere_pair_data_xi(
                        knodes, weights, xi_hat, rho, rho + 0.5,
                        disc.n_phi, disc.m_max, q, rhom1, gamma, log_c1,
                        cutoff=disc.cutoff,
                    )
                except TruncationError:
                    if attempt == 2:
                        raise
                    cap *= 2

        pair2 = _pairs(rho2)
        pair1 = None
        if not sphere_plane:
            rho1 = geom.r1 / el
            if rho1 != rho2:
                pair1 = _pairs(rho1)
    plane_diag = None
    if sphere_plane:
        plane_diag = np.tile(np.exp(-kappa), 2)
    return KernelData(
        geom=geom,
        xi_hat=float(xi_hat),
        disc=disc,
        knodes=knodes,
        weights=weights,
        kappa=kappa,
        sphere_plane=sphere_plane,
        pair2=pair2,
        pair1=pair1,
        plane_diag=plane_diag,
    )


@dataclass
class RoundTripKernel:
    """Assembled round-trip blocks for one Matsubara frequency and materials."""

    matsubara_index: int
    xi_hat: float
    theta1: float
    theta2: float
    blocks: list
    knodes: np.ndarray
    metadata: dict = field(default_factory=dict)

    def trace_m(self, m: int) -> float:
        return float(np.trace(self.blocks[m]).real)


def build_kernel(
    geom: Geometry,
    mat1,
    mat2,
    n: int = 0,
    thermal=None,
    xi_hat: float | None = None,
    disc: Discretization | None = None,
) -> RoundTripKernel:
    """Assemble the round-trip blocks M_m at Matsubara index n.

    Either pass ``thermal`` (so that xi_n = n tau / L in units c/L) or give
    ``xi_hat`` directly; n = 0 needs neither.
    """
    theta1 = getattr(mat1, "theta", float(mat1))
    theta2 = getattr(mat2, "theta", float(mat2))
    if xi_hat is None:
        if n == 0:
            xi_hat = 0.0
        else:
            if thermal is None:
                raise DomainError("n > 0 requires a ThermalState or explicit xi_hat")
            xi_hat = n * thermal.tau
    kd = build_kernel_data(geom, xi_hat, disc)
    blocks = [
        kd.round_trip_block(theta1, theta2, m) for m in range(kd.disc.m_max + 1)
    ]
    return RoundTripKernel(
        matsubara_index=n,
        xi_hat=float(xi_hat),
        theta1=theta1,
        theta2=theta2,
        blocks=blocks,
        knodes=kd.knodes,
        metadata={
            "n_k": kd.disc.n_k,
            "n_phi": kd.disc.n_phi,
            "m_max": kd.disc.m_max,
        },
    )


def _logdet_one_minus(mat, want_trace=False, dmat=None):
    """log|det(1-M)| and optionally Re tr[(1-M)^{-1} dM].

    Switches to the round-trip (Mercator) series when ||M|| is small, where
    the LU determinant would lose all significant digits.
    """
    norm = np.abs(mat).sum(axis=1).max() if mat.size else 0.0
    if norm < 1e-3:
        # logdet(1-M) = -sum_r tr(M^r)/r and
        # tr[(1-M)^{-1} dM] = sum_{r>=0} tr[M^r dM]; converge like norm^r
        power = mat
        acc = -np.trace(power)
        tr_d = 0.0
        if want_trace:
            dmat_t = dmat.T
            tr_d = np.trace(dmat) + np.sum(power * dmat_t)
        for r in range(2, 12):
            power = power @ mat
            term = -np.trace(power) / r
            acc += term
            if want_trace:
                tr_d += np.sum(power * dmat_t)
            if abs(term) < 1e-17 * max(abs(acc), 1e-300):
                break
        return float(np.real(acc)), float(np.real(tr_d))
    eye = np.eye(mat.shape[0], dtype=mat.dtype)
    lu, piv = lu_factor(eye - mat, check_finite=False)
    logdet = float(np.log(np.abs(np.diag(lu))).sum())
    tr_d = 0.0
    if want_trace:
        sol = lu_solve((lu, piv), dmat, check_finite=False)
        tr_d = float(np.real(np.trace(sol)))
    return logdet, tr_d


def kernel_f_g(
    kd: KernelData,
    theta_pairs,
    want_force: bool = False,
    m_tol: float = 1e-9,
):
    """f_n and the force trace g_n for a batch of material pairs.

    Returns (f, g) arrays of length len(theta_pairs) with
    f = sum_m w_m log|det(1 - M_m)| and
    g = sum_m w_m Re tr[(1 - M_m)^{-1} L d_L M_m].
    """
    nb = len(theta_pairs)
    f = np.zeros(nb)
    g = np.zeros(nb)
    n = kd.disc.n_k
    kap2 = np.tile(kd.kappa, 2)
    last_small = 0
    for m in range(kd.disc.m_max + 1):
        w = 1.0 if m == 0 else 2.0
        c2_0, c2_c, c2_s = kd._scatter(kd.pair2, m)
        if not kd.sphere_plane:
            if kd.pair1 is not None:
                c1_0, c1_c, c1_s = kd._scatter(kd.pair1, m)
            else:
                c1_0, c1_c, c1_s = c2_0, c2_c, c2_s
        contrib_max = 0.0
        for b, (th1, th2) in enumerate(theta_pairs):
            g2 = c2_0 + math.cos(2.0 * th2) * c2_c + math.sin(2.0 * th2) * c2_s
            if kd.sphere_plane:
                mat = kd.plane_apply(g2, th1)
                if want_force:
                    dmat = -0.5 * kap2[:, None] * mat - 1.5 * kd.plane_apply(
                        g2 * kap2[None, :], th1
                    )
                else:
                    dmat = None
            else:
                g1 = np.conj(
                    c1_0 + math.cos(2.0 * th1) * c1_c + math.sin(2.0 * th1) * c1_s
                )
                mat = g2 @ g1
                if want_force:
                    dmat = (
                        -0.5 * (kap2[:, None] * mat + mat * kap2[None, :])
                        - g2 @ (kap2[:, None] * g1)
                    )
                else:
                    dmat = None
            ld, tr = _logdet_one_minus(mat, want_force, dmat)
            f[b] += w * ld
            g[b] += w * tr
            contrib_max = max(contrib_max, abs(ld))
        if m >= 4 and contrib_max < m_tol * max(np.abs(f).max(), 1e-300):
            last_small += 1
            if last_small >= 2:
                break
        else:
            last_small = 0
    return f, g


def logdet_f_n(kernel: RoundTripKernel) -> float:
    """f_n = sum_m w_m log det(1 - M_m) from assembled blocks."""
    total = 0.0
    for m, block in enumerate(kernel.blocks):
        w = 1.0 if m == 0 else 2.0
        ld, _ = _logdet_one_minus(block)
        total += w * ld
    return total


def trace_f_n(kernel: RoundTripKernel) -> float:
    """tr M(i xi_n) = sum_m w_m tr M_m (single round trip)."""
    total = 0.0
    for m, block in enumerate(kernel.blocks):
        w = 1.0 if m == 0 else 2.0
        total += w * float(np.trace(block).real)
    return total
