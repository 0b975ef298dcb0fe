r"""Numba kernels evaluating the symmetrized sphere reflection elements on the
quadrature grid.

For one sphere the folded matrix element between radial nodes (i, j) at
azimuth difference dphi decomposes into three material components,

    E(theta) = E0 + cos(2 theta) Ec + sin(2 theta) Es,

because the PEMC Mie coefficients are C_l [1 + (rho_l - 1) P_theta] with the
projector P_theta linear in {1, cos 2 theta, sin 2 theta}.  The multipole
sums are accumulated in a floating frame (common exponent) so that size
parameters up to 1e5 and angle variables z down to -1e12 neither overflow nor
underflow; the translation factor exp(-(kappa_i + kappa_j) a_s) with
a_s = R_s + L/2 is applied inside the same exponent.

All wavenumbers are in units of 1/L with c = 1.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

with warnings.catch_warnings():
    # the numba TBB version probe is irrelevant here; omp/workqueue is used
    warnings.simplefilter("ignore")
    from numba import njit, prange
from scipy import fft as _fft

__all__ = [
    "sphere_pair_data_xi",
    "sphere_pair_data_zero",
    "PairData",
]

#: component layout: c * 4 + (2*p + p') with c in {0: unit, 1: cos2t, 2: sin2t}
#: and polarization entries ordered TMTM, TMTE, TETM, TETE.
_N_COMP = 12

# parity of each of the 12 components under dphi -> -dphi (+1 even, -1 odd)
_PARITY = np.array([1, -1, -1, 1, 1, -1, -1, 1, -1, 1, 1, -1], dtype=np.float64)


@njit(cache=True)
def _scalar_sums_nb(z, q, rhom1, gamma, log_c1, ell_cap):
    """Frame-scaled multipole sums; returns (s0, s1, logscale, ok)."""
    logscale = log_c1
    v_prev = 0.0
    v = -1.0
    t0 = 0.0
    t1 = 0.0
    p0 = 0.0
    p1 = 0.0
    peak = 0.0
    below = 0
    ell = 1
    ok = False
    while ell <= ell_cap:
        if ell == 1:
            u = z * v
        else:
            u = ell * z * v - (ell + 1.0) * q[ell] * v_prev
        g = gamma[ell]
        t0 += g * u
        t1 += g * rhom1[ell] * u
        p0 += g * v
        p1 += g * rhom1[ell] * v
        mag = abs(u)
        av = abs(v)
        if av > mag:
            mag = av
        if mag > peak:
            peak = mag
            below = 0
        elif mag < 1e-18 * peak:
            below += 1
            if below >= 8:
                ok = True
                break
        if mag > 1e250:
            t0 *= 1e-250
            t1 *= 1e-250
            p0 *= 1e-250
            p1 *= 1e-250
            v *= 1e-250
            v_prev *= 1e-250
            peak *= 1e-250
            logscale += 575.6462732485114  # 250 ln 10
        ell += 1
        if ell > ell_cap:
            break
        v_next = (2.0 * ell - 1.0) / (ell - 1.0) * z * q[ell] * v
        if ell > 2:
            v_next -= ell / (ell - 1.0) * q[ell] * q[ell - 1] * v_prev
        v_prev = v
        v = v_next
    s0 = -(t0 + p0 + 0.5 * (t1 + p1))
    s1 = -0.5 * (t1 - p1)
    return s0, s1, logscale, ok


#: azimuthal lanes processed together; the multipole recurrences of the lanes
#: are independent, which turns the latency-bound three-term recurrence into
#: a throughput-bound (vectorizable) inner loop
_BLK = 16
_CHK = 8  # rescale/convergence check interval in ell


@njit(parallel=True, cache=True, fastmath=True)
def _elements_xi(
    pair_i,
    pair_j,
    knodes,
    kappa,
    sqrt_kw,
    xi_hat,
    rho_sphere,
    a_split,
    cos_phi,
    sin_phi,
    q,
    rhom1,
    gamma,
    log_c1,
    ell_cap,
    cutoff,
    comp,
    fail,
):
    """Fill comp[npair, nphih, 12] for one sphere at xi_hat > 0."""
    npair = pair_i.shape[0]
    nphih = cos_phi.shape[0]
    xi2 = xi_hat * xi_hat
    xt = xi_hat * rho_sphere
    # frame rescaling: trigger/factor chosen so that even |z| ~ 1e18 cannot
    # overflow within one check interval
    ln_resc = 322.3619130191664  # 140 ln 10
    for p in prange(npair):
        i = pair_i[p]
        j = pair_j[p]
        ki = knodes[i]
        kj = knodes[j]
        kapi = kappa[i]
        kapj = kappa[j]
        wfac = sqrt_kw[i] * sqrt_kw[j] / (xi_hat * math.sqrt(kapi * kapj))
        texp = -(kapi + kapj) * a_split
        # pair-level cutoff at the most favorable azimuth (dphi = 0)
        bound = xt * math.sqrt(2.0 * (xi2 + kapi * kapj + ki * kj)) / xi_hat + texp
        if bound < cutoff:
            for a in range(nphih):
                for cidx in range(12):
                    comp[p, a, cidx] = 0.0
            continue
        z_l = np.empty(_BLK)
        v_l = np.empty(_BLK)
        vp_l = np.empty(_BLK)
        t0_l = np.empty(_BLK)
        t1_l = np.empty(_BLK)
        p0_l = np.empty(_BLK)
        p1_l = np.empty(_BLK)
        ls_l = np.empty(_BLK)
        pk_l = np.empty(_BLK)
        lmin_l = np.empty(_BLK)
        skip_l = np.empty(_BLK, dtype=np.bool_)
        for a0 in range(0, nphih, _BLK):
            w_n = min(_BLK, nphih - a0)
            n_act = 0
            lmax_blk = 8.0
            for w in range(_BLK):
                a = a0 + w
                if w < w_n:
                    z = -(ki * kj * cos_phi[a] + kapi * kapj) / xi2
                else:
                    z = -(ki * kj + kapi * kapj) / xi2  # dummy lane
                z_l[w] = z
                sk = w >= w_n or (xt * math.sqrt(2.0 * (1.0 - z)) + texp < cutoff)
                skip_l[w] = sk
                lstar = xt * math.sqrt(0.5 * max(-z - 1.0, 0.0))
                lmin_l[w] = lstar
                if not sk:
                    n_act += 1
                    if lstar > lmax_blk:
                        lmax_blk = lstar
                v_l[w] = -1.0
                vp_l[w] = 0.0
                t0_l[w] = 0.0
                t1_l[w] = 0.0
                p0_l[w] = 0.0
                p1_l[w] = 0.0
                ls_l[w] = log_c1
                pk_l[w] = 0.0
            if n_act == 0:
                for w in range(w_n):
                    for cidx in range(12):
                        comp[p, a0 + w, cidx] = 0.0
                continue
            ell = 1
            converged = False
            while ell <= ell_cap:
                g = gamma[ell]
                gr = g * rhom1[ell]
                qe = q[ell]
                le1 = ell + 1.0
                lze = ell * 1.0
                for w in range(_BLK):
                    if ell == 1:
                        u = z_l[w] * v_l[w]
                    else:
                        u = lze * z_l[w] * v_l[w] - le1 * qe * vp_l[w]
                    t0_l[w] += g * u
                    t1_l[w] += gr * u
                    p0_l[w] += g * v_l[w]
                    p1_l[w] += gr * v_l[w]
                if ell % _CHK == 0 or ell == ell_cap:
                    alldone = True
                    for w in range(_BLK):
                        if skip_l[w]:
                            continue
                        av = abs(v_l[w])
                        au = abs(vp_l[w])
                        mag = av if av > au else au
                        if mag > pk_l[w]:
                            pk_l[w] = mag
                        if mag > 1e140:
                            sc = 1e-140
                            v_l[w] *= sc
                            vp_l[w] *= sc
                            t0_l[w] *= sc
                            t1_l[w] *= sc
                            p0_l[w] *= sc
                            p1_l[w] *= sc
                            pk_l[w] *= sc
                            ls_l[w] += ln_resc
                        if ell < lmin_l[w] + 8.0 or mag > 1e-18 * pk_l[w]:
                            alldone = False
                    if alldone:
                        converged = True
                        break
                ell += 1
                if ell > ell_cap:
                    break
                c1 = (2.0 * ell - 1.0) / (ell - 1.0) * q[ell]
                c2 = ell / (ell - 1.0) * q[ell] * q[ell - 1]
                if ell == 2:
                    c2 = 0.0
                for w in range(_BLK):
                    vn = c1 * z_l[w] * v_l[w] - c2 * vp_l[w]
                    vp_l[w] = v_l[w]
                    v_l[w] = vn
            if not converged and ell >= ell_cap:
                fail[0] = 1
                return
            for w in range(w_n):
                a = a0 + w
                if skip_l[w]:
                    for cidx in range(12):
                        comp[p, a, cidx] = 0.0
                    continue
                z = z_l[w]
                s0 = -(t0_l[w] + p0_l[w] + 0.5 * (t1_l[w] + p1_l[w]))
                s1 = -0.5 * (t1_l[w] - p1_l[w])
                ct = cos_phi[a]
                st = sin_phi[a]
                root = math.sqrt(z * z - 1.0)
                cos_out = (kapj * ki + kapi * kj * ct) / (xi2 * root)
                cos_in = (kapi * kj + kapj * ki * ct) / (xi2 * root)
                sin_out = -kj * st / (xi_hat * root)
                sin_in = -ki * st / (xi_hat * root)
                A = cos_out * cos_in
                B = sin_out * sin_in
                C = sin_out * cos_in
                D = -cos_out * sin_in
                pref = wfac * math.exp(ls_l[w] + texp)
                ps0 = pref * s0
                ps1 = pref * s1
                apb = A + B
                amb = A - B
                cpd = C + D
                dmc = D - C
                comp[p, a, 0] = ps0 * apb
                comp[p, a, 1] = ps0 * cpd
                comp[p, a, 2] = -ps0 * cpd
                comp[p, a, 3] = ps0 * apb
                comp[p, a, 4] = ps1 * amb
                comp[p, a, 5] = ps1 * dmc
                comp[p, a, 6] = ps1 * dmc
                comp[p, a, 7] = -ps1 * amb
                comp[p, a, 8] = -ps1 * dmc
                comp[p, a, 9] = ps1 * amb
                comp[p, a, 10] = ps1 * amb
                comp[p, a, 11] = ps1 * dmc


@njit(parallel=True, cache=True)
def _elements_zero(
    pair_i,
    pair_j,
    knodes,
    sqrt_w,
    rho_sphere,
    a_split,
    cos_half,
    comp,
):
    """Fill comp[npair, nphih, 2] with (e0, e1) for the zero-frequency kernel."""
    npair = pair_i.shape[0]
    nphih = cos_half.shape[0]
    for p in prange(npair):
        i = pair_i[p]
        j = pair_j[p]
        ki = knodes[i]
        kj = knodes[j]
        wfac = sqrt_w[i] * sqrt_w[j] * rho_sphere
        texp = -(ki + kj) * a_split
        chi0 = 2.0 * rho_sphere * math.sqrt(ki * kj)
        if chi0 + texp < -46.0:
            for a in range(nphih):
                comp[p, a, 0] = 0.0
                comp[p, a, 1] = 0.0
            continue
        for a in range(nphih):
            chi = chi0 * abs(cos_half[a])
            # scaled S_TM = (cosh chi - 1) e^{-sc}, S_TE likewise
            if chi > 30.0:
                sc = chi
                em = math.exp(-chi)
                em2 = em * em
                stm = 0.5 * (1.0 + em2) - em
                ste = -(
                    0.5 * (1.0 + em2) * (1.0 + 2.0 / (chi * chi))
                    - (1.0 - em2) / chi
                    - 2.0 * em / (chi * chi)
                )
            else:
                sc = 0.0
                if chi < 1e-3:
                    c2 = chi * chi
                    stm = 0.5 * c2 * (1.0 + c2 / 12.0)
                    ste = -0.25 * c2 * (1.0 + c2 / 9.0)
                else:
                    stm = math.cosh(chi) - 1.0
                    ste = -(
                        math.cosh(chi)
                        - 2.0 * (chi * math.sinh(chi) - math.cosh(chi) + 1.0) / (chi * chi)
                    )
            pref = wfac * math.exp(sc + texp)
            comp[p, a, 0] = pref * 0.5 * (stm + ste)
            comp[p, a, 1] = pref * 0.5 * (stm - ste)


class PairData:
    """Azimuthal Fourier data of one sphere's folded reflection elements.

    ``data`` has shape (npair, ncomp, m_max + 1); for the finite-frequency
    kernel ncomp = 12 complex components, for the zero-frequency kernel
    ncomp = 2 real components.  Pairs run over i <= j of the radial grid.
    """

    def __init__(self, pair_i, pair_j, data, n_nodes, zero_freq):
        self.pair_i = pair_i
        self.pair_j = pair_j
        self.data = data
        self.n_nodes = n_nodes
        self.zero_freq = zero_freq


def _pair_indices(n):
    idx_i, idx_j = np.triu_indices(n)
    return idx_i.astype(np.int64), idx_j.astype(np.int64)


def _phi_grid(n_phi):
    if n_phi % 2 == 0:
        raise ValueError("n_phi must be odd to avoid the backscattering point")
    nphih = (n_phi + 1) // 2
    phis = 2.0 * np.pi * np.arange(nphih) / n_phi
    return phis, nphih


def sphere_pair_data_xi(
    knodes, weights, xi_hat, rho_sphere, a_split, n_phi, m_max, q, rhom1, gamma, log_c1,
    cutoff=-46.0,
) -> PairData:
    """Fourier-transformed pair data of one sphere at Matsubara frequency xi_hat > 0."""
    n = knodes.shape[0]
    pair_i, pair_j = _pair_indices(n)
    phis, nphih = _phi_grid(n_phi)
    kappa = np.sqrt(knodes**2 + xi_hat**2)
    # the 2 pi of the element prefactor cancels the (2 pi)^2 of the measure
    # against the azimuthal Fourier normalization, leaving sqrt(k w) weights
    sqrt_kw = np.sqrt(knodes * weights)
    comp = np.empty((pair_i.shape[0], nphih, _N_COMP))
    fail = np.zeros(1, dtype=np.int64)
    _elements_xi(
        pair_i,
        pair_j,
        knodes,
        kappa,
        sqrt_kw,
        float(xi_hat),
        float(rho_sphere),
        float(a_split),
        np.cos(phis),
        np.sin(phis),
        q,
        rhom1,
        gamma,
        float(log_c1),
        int(len(gamma) - 1),
        float(cutoff),
        comp,
        fail,
    )
    if fail[0]:
        from ..errors import TruncationError

        raise TruncationError(
            f"multipole sum not converged at ell_max={len(gamma) - 1} for xi_hat={xi_hat}"
        )
    # extend to the full azimuthal grid by parity and transform
    full = np.empty((pair_i.shape[0], _N_COMP, n_phi))
    half = np.transpose(comp, (0, 2, 1))
    full[:, :, :nphih] = half
    full[:, :, nphih:] = (half[:, :, 1:][:, :, ::-1]) * _PARITY[None, :, None]
    data = _fft.rfft(full, axis=2)[:, :, : m_max + 1] / n_phi
    return PairData(pair_i, pair_j, data, n, zero_freq=False)


def sphere_pair_data_zero(
    knodes, weights, rho_sphere, a_split, n_phi, m_max
) -> PairData:
    """Fourier-transformed pair data of one sphere at zero frequency."""
    n = knodes.shape[0]
    pair_i, pair_j = _pair_indices(n)
    phis, nphih = _phi_grid(n_phi)
    sqrt_w = np.sqrt(weights)
    comp = np.empty((pair_i.shape[0], nphih, 2))
    _elements_zero(
        pair_i,
        pair_j,
        knodes,
        sqrt_w,
        float(rho_sphere),
        float(a_split),
        np.cos(phis / 2.0),
        comp,
    )
    full = np.empty((pair_i.shape[0], 2, n_phi))
    half = np.transpose(comp, (0, 2, 1))
    full[:, :, :nphih] = half
    full[:, :, nphih:] = half[:, :, 1:][:, :, ::-1]
    data = _fft.rfft(full, axis=2)[:, :, : m_max + 1].real / n_phi
    return PairData(pair_i, pair_j, data, n, zero_freq=True)
