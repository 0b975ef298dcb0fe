r"""Datasets reproducing the paper-style figures at desk-scale resolution.

Each generator returns (rows, metadata); rows are flat dicts ready for CSV
emission, metadata records every input so a run can be reproduced
bit-identically.
"""

from __future__ import annotations

import math

import numpy as np

from . import analysis, dipole, hightemp, pfa
from .constants import ZETA3
from .engine import Discretization, Geometry, ThermalState, free_energy_batch, force_batch

__all__ = ["FIGURE_IDS", "figure_dataset"]

FIGURE_IDS = (2, 3, 4, 5, 6, 7, 8, 9)

_QP = math.pi / 4.0


def _fig2(points: int):
    """Temperature corrections to the PFA energy vs tau for several delta."""
    deltas = [math.pi / 5.0, 3.0 * math.pi / 10.0, pfa.DELTA_CRIT_T0, 2.0 * math.pi / 5.0, math.pi / 2.0]
    taus = np.linspace(0.02, 0.5, points)
    rows = []
    for d in deltas:
        for tau in taus:
            fe, fe_kbt = pfa.pfa_free_energy(1.0, float(tau), d)
            exact = fe - pfa.pfa_energy_T0(1.0, d)
            expansion = pfa.pfa_low_T_correction(1.0, float(tau), d)
            rows.append(
                {
                    "delta": d,
                    "tau": float(tau),
                    "dF_exact": exact,
                    "dF_expansion": expansion,
                    # energy correction in units k_B T as plotted
                    "dF_exact_kbt": exact * 4.0 * math.pi / (4.0 * math.pi) / (tau / (4 * math.pi)),
                }
            )
    return rows, {"x": 1.0, "deltas": deltas}


def _fig3(points: int):
    """PFA critical angle and energy zero versus temperature."""
    from scipy.optimize import brentq

    taus = np.geomspace(0.05, 40.0, points)
    rows = []
    for tau in taus:
        dc = pfa.pfa_critical_angle(float(tau))
        de = brentq(
            lambda d: pfa.pfa_free_energy(1.0, float(tau), d)[0],
            0.85 * _QP,
            1.05 * _QP,
        )
        rows.append({"tau": float(tau), "delta_crit": dc, "delta_energy_zero": de})
    rows.append({"tau": 0.0, "delta_crit": pfa.DELTA_CRIT_T0, "delta_energy_zero": pfa.DELTA_CRIT_T0})
    rows.sort(key=lambda r: r["tau"])
    return rows, {"asymptotes": [pfa.DELTA_CRIT_T0, pfa.pfa_critical_angle(1e9)]}


def _fig4(points: int):
    """Geometrical corrections E - E_PFA at u = 0, T = 0 versus x."""
    deltas = [math.pi / 5.0, 3.0 * math.pi / 10.0, 2.0 * math.pi / 5.0, math.pi / 2.0]
    xs = np.geomspace(1e-2, 1e2, points)
    rows = []
    for x in xs:
        geom = Geometry.from_dimensionless(float(x), 0.0)
        reps = free_energy_batch(geom, [(0.0, d) for d in deltas], ThermalState.zero())
        for d, rep in zip(deltas, reps):
            rows.append(
                {
                    "x": float(x),
                    "delta": d,
                    "E_engine": rep.free_energy,
                    "E_minus_EPFA": rep.free_energy - pfa.pfa_energy_T0(float(x), d),
                    "dE_closed": pfa.pfa_geometric_correction(float(x), 0.0, d),
                    "E_dipole_plane": dipole.dipole_plane_free_energy(
                        geom.r2, geom.script_l, 0.0, d
                    )
                    * geom.l_gap
                    / geom.script_l,
                }
            )
    return rows, {"u": 0.0, "deltas": deltas}


def _fig5(points: int):
    """zeta(3)-scaled ratio of the high-T free energy to its single round trip."""
    deltas = [0.0, math.pi / 6.0, math.pi / 3.0, math.pi / 2.0]
    ys = 1.0 + np.geomspace(1e-2, 1e2, points)
    rows = []
    for u in (0.0, 0.25):
        for y in ys:
            x = (y - 1.0) if u == 0.0 else (math.sqrt(1.0 + 2.0 * u * (y - 1.0)) - 1.0) / u
            geom = Geometry.from_dimensionless(float(x), u)
            reps = free_energy_batch(geom, [(0.0, d) for d in deltas], ThermalState.high_t())
            for d, rep in zip(deltas, reps):
                single = hightemp.single_roundtrip_highT(d, float(y), u)
                ratio = rep.free_energy_kbt / single if single != 0.0 else math.nan
                rows.append(
                    {
                        "y_minus_1": float(y - 1.0),
                        "u": u,
                        "delta": d,
                        "ratio": ratio,
                        "ratio_over_zeta3": ratio / ZETA3,
                        "phi_model": hightemp.rational_model(d, float(y)),
                    }
                )
    return rows, {"pfa_levels": [1.0, 2.0 / 3.0, 8.0 / 9.0, 3.0 / 4.0]}


def _fig6(points: int):
    """Curves of vanishing force in the (x, delta) plane for u in {0, 1/4}."""
    xs = np.geomspace(1e-2, 1e2, points)
    rows = []
    for u in (0.0, 0.25):
        for label, tau in (("T0", 0.0), ("highT", math.inf)):
            for x in xs:
                dc = analysis.critical_angle(float(x), u, tau)
                rows.append(
                    {
                        "x": float(x),
                        "u": u,
                        "temperature": label,
                        "delta_crit": math.nan if dc is None else dc,
                    }
                )
    meta = {
        "asymptotes_quarterpi": {
            "pfa_T0": pfa.DELTA_CRIT_T0 / _QP,
            "pfa_highT": pfa.pfa_critical_angle(1e9) / _QP,
            "dipole_T0": dipole.dipole_dipole_critical_angle(0.0) / _QP,
            "dipole_highT": dipole.dipole_dipole_critical_angle(1e9) / _QP,
        }
    }
    return rows, meta


def _fig7(points: int):
    """Scaled sum-rule integral y^3 I versus y - 1 in the high-T limit."""
    rows = []
    for u in (0.0, 0.01, 0.05, 0.25):
        ys = 1.0 + np.geomspace(5e-2, 1e2, points)
        for y in ys:
            x = (y - 1.0) if u == 0.0 else (math.sqrt(1.0 + 2.0 * u * (y - 1.0)) - 1.0) / u
            geom = Geometry.from_dimensionless(float(x), u)
            integral = analysis.sumrule_integral(geom, tau=math.inf, method="engine")
            rows.append(
                {
                    "y_minus_1": float(y - 1.0),
                    "u": u,
                    "I": integral,
                    "y3_I": float(y**3) * integral,
                }
            )
    # double-round-trip approximation for the sphere-plane curve (dashed)
    for y in 1.0 + np.geomspace(5e-2, 1e2, points):
        approx = hightemp.sumrule_double_roundtrip_u0(float(y))
        rows.append(
            {
                "y_minus_1": float(y - 1.0),
                "u": -1.0,  # marks the double-round-trip curve
                "I": approx,
                "y3_I": float(y**3) * approx,
            }
        )
    return rows, {"asymptote": -9.0 * math.pi / 64.0}


def _force_map(u, deltas, points):
    xs = np.geomspace(0.2, 20.0, points)
    temps = np.geomspace(0.02, 2.0, points)
    spec = analysis.PhaseMapSpec(
        u=u, x_grid=tuple(xs), temp_grid=tuple(temps), delta_grid=tuple(deltas)
    )
    return analysis.phase_map(spec)


def _fig8(points: int):
    rows = _force_map(0.0, [0.95 * _QP, 0.98 * _QP], points)
    return rows, {"u": 0.0, "deltas_quarterpi": [0.95, 0.98]}


def _fig9(points: int):
    rows = _force_map(0.25, [1.0 * _QP, 1.05 * _QP], points)
    return rows, {"u": 0.25, "deltas_quarterpi": [1.0, 1.05]}


def figure_dataset(fig_id: int, points: int | None = None):
    """Rows and metadata of the requested figure dataset."""
    gens = {2: (_fig2, 25), 3: (_fig3, 15), 4: (_fig4, 9), 5: (_fig5, 25),
            6: (_fig6, 7), 7: (_fig7, 10), 8: (_fig8, 8), 9: (_fig9, 8)}
    if fig_id not in gens:
        raise ValueError(f"unknown figure id {fig_id}; available: {sorted(gens)}")
    gen, default_pts = gens[fig_id]
    rows, meta = gen(points or default_pts)
    meta["figure"] = fig_id
    meta["points"] = points or default_pts
    return rows, meta
