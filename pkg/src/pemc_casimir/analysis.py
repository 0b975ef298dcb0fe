r"""Root finding and quadrature on top of the engine and the closed-form
asymptotics: critical material angles, stable equilibrium distances, the
sum-rule integral over the material angle, and phase-map generation.

Every scan batches the material angles so that the expensive kernel assembly
per frequency node is shared between all probed delta values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import Discretization, Geometry, ThermalState, force_batch
from .errors import ConvergenceError, DomainError
from . import dipole as _dipole
from . import pfa as _pfa

__all__ = [
    "AmbiguityError",
    "PhaseMapSpec",
    "critical_angle",
    "equilibrium_distance",
    "sumrule_integral",
    "phase_map",
]


class AmbiguityError(ConvergenceError):
    """The force changes sign more than once over the scanned interval."""

    def __init__(self, message, brackets):
        super().__init__(f"{message}; sign-change brackets: {brackets}")
        self.brackets = brackets


def _thermal(tau: float) -> ThermalState:
    return ThermalState(tau=tau)


def _force_of_deltas(geom, deltas, thermal, disc, xi_nodes):
    pairs = [(0.0, float(d)) for d in deltas]
    return force_batch(
        geom, pairs, thermal, disc, method="trace", xi_nodes=xi_nodes
    )


def critical_angle(
    x: float,
    u: float,
    tau: float,
    disc: Discretization | None = None,
    scan_points: int = 16,
    passes: int = 3,
    xi_nodes: int = 32,
):
    """Material angle at which the Casimir force vanishes, or None.

    The force is evaluated on a ``scan_points`` grid over [0, pi/2]; the
    bracket containing the sign change is refined by ``passes`` further
    batched scans (each pass shares one kernel assembly per frequency).
    """
    geom = Geometry.from_dimensionless(x, u)
    thermal = _thermal(tau)
    lo, hi = 0.0, math.pi / 2.0
    npts = scan_points
    for it in range(passes):
        deltas = np.linspace(lo, hi, npts)
        forces = _force_of_deltas(geom, deltas, thermal, disc, xi_nodes)
        signs = np.sign(forces)
        flips = [
            (deltas[i], deltas[i + 1])
            for i in range(len(deltas) - 1)
            if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]
        ]
        if not flips:
            if it == 0:
                return None
            raise ConvergenceError("force bracket lost during refinement")
        if it == 0 and len(flips) > 1:
            raise AmbiguityError("multiple force zeros in delta", flips)
        lo, hi = flips[0]
        npts = 8
    # secant polish on the last bracket
    f_lo = float(_force_of_deltas(geom, [lo], thermal, disc, xi_nodes)[0])
    f_hi = float(_force_of_deltas(geom, [hi], thermal, disc, xi_nodes)[0])
    if f_lo == f_hi:
        return 0.5 * (lo + hi)
    root = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    return float(min(max(root, lo), hi))


def equilibrium_distance(
    delta: float,
    u: float,
    lambda_t_over_reff: float | None = None,
    tau: float | None = None,
    x_grid=None,
    disc: Discretization | None = None,
    xi_nodes: int = 32,
    refine_steps: int = 18,
):
    """Stable equilibrium aspect ratio x_eq (repulsion below, attraction above).

    The temperature is fixed physically: either through lambda_T/R_eff (the
    phase-map convention, tau = 2 pi x R_eff/lambda_T at every x) or through
    the high-temperature limit (``tau=math.inf``).  Returns None when the
    force has one sign on the whole grid.
    """
    if not 0.0 <= delta <= math.pi / 2.0:
        raise DomainError(f"delta must lie in [0, pi/2], got {delta}")
    if (lambda_t_over_reff is None) == (tau is None):
        raise DomainError("specify exactly one of lambda_t_over_reff or tau")
    if x_grid is None:
        x_grid = np.geomspace(1e-3, 1e3, 25)

    def thermal_at(x):
        if tau is not None:
            return _thermal(tau)
        return _thermal(2.0 * math.pi * x / lambda_t_over_reff)

    def force_at(x):
        geom = Geometry.from_dimensionless(float(x), u)
        return float(
            force_batch(
                geom, [(0.0, delta)], thermal_at(x), disc, method="trace", xi_nodes=xi_nodes
            )[0]
        )

    forces = [force_at(x) for x in x_grid]
    signs = np.sign(forces)
    flips = [
        (x_grid[i], x_grid[i + 1], signs[i], signs[i + 1])
        for i in range(len(x_grid) - 1)
        if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]
    ]
    stable = [(a, b) for (a, b, sa, sb) in flips if sa > 0 and sb < 0]
    if not stable:
        return None
    if len(stable) > 1:
        raise AmbiguityError("multiple stable force zeros in x", stable)
    lo, hi = stable[0]
    f_lo, f_hi = force_at(lo), force_at(hi)
    for _ in range(refine_steps):
        mid = math.sqrt(lo * hi)
        f_mid = force_at(mid)
        if f_mid == 0.0:
            return mid
        if f_mid > 0.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return float(lo - f_lo * (hi - lo) / (f_hi - f_lo))


def _gauss_on(a, b, n):
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * t + 0.5 * (a + b), 0.5 * (b - a) * w


def sumrule_integral(
    geom_or_x,
    u: float | None = None,
    tau: float = math.inf,
    method: str = "engine",
    n_points: int = 32,
    disc: Discretization | None = None,
    xi_nodes: int = 32,
    check: bool = False,
):
    """Integral of the Casimir force over the material angle delta.

    In the high-temperature limit (``tau=math.inf``) the dimensionless
    integral I = (script_l/k_B T) int_0^{pi/2} F d(delta) is returned; at
    finite or zero tau the integral of F L^2/(hbar c) over delta.  The
    Gauss-Legendre rule is subdivided at the force zero when one exists.
    ``method`` selects the exact engine or the closed-form "pfa"/"dipole"
    asymptotics.
    """
    if isinstance(geom_or_x, Geometry):
        geom = geom_or_x
    else:
        geom = Geometry.from_dimensionless(float(geom_or_x), float(u))
    thermal = _thermal(tau)

    if method == "pfa":
        x = geom.x
        nodes, wts = _gauss_on(0.0, math.pi / 2.0, n_points)
        if thermal.is_infinite:
            # F_T,PFA ~ 1/L at fixed radii: F L/k_B T = -(1/4x) Re Li3(e^{2id})
            vals = [_pfa.pfa_high_T(x, d) for d in nodes]
            return float(np.dot(wts, vals)) * geom.script_l / geom.l_gap
        if thermal.is_zero:
            # E_PFA ~ 1/L^2 at fixed radii: F L^2/(hbar c) = 2 E_PFA L/(hbar c)
            vals = [2.0 * _pfa.pfa_energy_T0(x, d) for d in nodes]
            return float(np.dot(wts, vals))
        raise DomainError("pfa sum rule implemented for tau in {0, inf}")
    if method == "dipole":
        if geom.is_sphere_plane:
            return _dipole.sumrule_dipole_plane()
        if thermal.is_infinite:
            return -9.0 * math.pi / 8.0 * (geom.r1 * geom.r2 / geom.script_l**2) ** 3
        val = _dipole.sumrule_dipole_dipole(
            geom.r1, geom.r2, geom.script_l, thermal.tau_tilde(geom)
        )
        # convert hbar c/script_l^2 to the hbar c/L^2 convention
        return val * (geom.l_gap / geom.script_l) ** 2
    if method != "engine":
        raise DomainError(f"unknown method {method!r}")

    def integrate(npts):
        dc = critical_angle(geom.x, geom.u, tau, disc=disc, xi_nodes=xi_nodes)
        if dc is None:
            panels = [(0.0, math.pi / 2.0, npts)]
        else:
            n1 = max(6, int(round(npts * dc / (math.pi / 2.0))))
            panels = [(0.0, dc, n1), (dc, math.pi / 2.0, max(6, npts - n1))]
        nodes_all = []
        wts_all = []
        for a, b, n in panels:
            nd, wt = _gauss_on(a, b, n)
            nodes_all.append(nd)
            wts_all.append(wt)
        nodes_all = np.concatenate(nodes_all)
        wts_all = np.concatenate(wts_all)
        geom_local = geom
        forces = _force_of_deltas(geom_local, nodes_all, thermal, disc, xi_nodes)
        integral = float(np.dot(wts_all, forces))
        return integral

    integral = integrate(n_points)
    if check:
        integral2 = integrate(2 * n_points)
        scale = max(abs(integral), abs(integral2), 1e-300)
        if abs(integral - integral2) > 1e-4 * scale:
            raise ConvergenceError(
                f"sum-rule quadrature not converged: {integral} vs {integral2}"
            )
        integral = integral2
    if thermal.is_infinite:
        return integral * geom.script_l / geom.l_gap
    return integral


@dataclass(frozen=True)
class PhaseMapSpec:
    """Grid specification for force/critical-angle maps (Figs. 6, 8, 9)."""

    u: float
    x_grid: tuple
    temp_grid: tuple  # values of L/lambda_T (per point: tau = 2 pi L/lambda_T)
    delta_grid: tuple = ()
    target: str = "force-map"

    def __post_init__(self):
        if self.target not in {"critical-angle", "equilibrium", "force-map", "sumrule"}:
            raise DomainError(f"unknown target {self.target!r}")
        for g in (self.x_grid, self.temp_grid):
            arr = np.asarray(g, dtype=float)
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise DomainError("grids must be strictly increasing")


def phase_map(spec: PhaseMapSpec, disc=None, xi_nodes: int = 24):
    """Tabulate (x, L/lambda_T, delta, F, F/F_{delta=0}) records.

    The normalization F_{delta=0} is computed at identical geometry and
    temperature.  Cells where the engine fails are recorded with NaN entries
    and the error message instead of aborting the map.
    """
    rows = []
    deltas = list(spec.delta_grid) if spec.delta_grid else [0.0]
    for x in spec.x_grid:
        geom = Geometry.from_dimensionless(float(x), spec.u)
        for l_over_lam in spec.temp_grid:
            tau = 2.0 * math.pi * l_over_lam
            thermal = _thermal(tau)
            pairs = [(0.0, 0.0)] + [(0.0, d) for d in deltas]
            try:
                forces = force_batch(
                    geom, pairs, thermal, disc, method="trace", xi_nodes=xi_nodes
                )
            except Exception as exc:  # cell marked failed, map continues
                for d in deltas:
                    rows.append(
                        {
                            "x": float(x),
                            "L_over_lambdaT": float(l_over_lam),
                            "delta": float(d),
                            "force": math.nan,
                            "force_ratio": math.nan,
                            "error": str(exc),
                        }
                    )
                continue
            f0 = forces[0]
            for d, f in zip(deltas, forces[1:]):
                rows.append(
                    {
                        "x": float(x),
                        "L_over_lambdaT": float(l_over_lam),
                        "delta": float(d),
                        "force": float(f),
                        "force_ratio": float(f / f0) if f0 != 0 else math.nan,
                        "error": "",
                    }
                )
    return rows
