r"""Command-line interface: energies, forces, critical angles, equilibria,
sum rules and figure datasets.

Geometry is given either in SI meters (--r1/--r2/--gap, with ``--r1 plane``
for the sphere-plane setup) or dimensionless (--x/--u).  Temperature accepts
``zero``, ``inf``, ``<value>K`` (kelvin, SI mode), ``tau=<value>`` or
``ttilde=<value>``.  Angles are in units of pi/4 by default
(--angle-unit rad switches to radians).

Outputs are JSON records or CSV files with a '#'-prefixed metadata header and
a JSON sidecar; ``figure`` additionally renders a PNG unless --no-plot.
Exit codes: 0 success, 2 invalid configuration, 3 solver failure.

The environment variable PEMC_CASIMIR_THREADS controls the number of worker
threads used for frequency sweeps.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .constants import HBAR_C, K_BOLTZMANN
from .errors import ConvergenceError, DomainError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

_QP = math.pi / 4.0


class ConfigError(ValueError):
    pass


def _add_common(p, geometry=True, materials=True, temp=True):
    if geometry:
        p.add_argument("--r1", help="radius of object 1 in meters, or 'plane'")
        p.add_argument("--r2", type=float, help="radius of sphere 2 in meters")
        p.add_argument("--gap", type=float, help="surface-to-surface gap L in meters")
        p.add_argument("--x", type=float, help="aspect ratio L/R_eff (dimensionless mode)")
        p.add_argument("--u", type=float, help="geometry parameter in [0, 1/4]")
    if materials:
        p.add_argument("--theta1", type=float, help="PEMC angle of object 1")
        p.add_argument("--theta2", type=float, help="PEMC angle of object 2")
        p.add_argument("--delta", type=float, help="material difference (theta1 = 0)")
        p.add_argument(
            "--angle-unit",
            choices=("quarterpi", "rad"),
            default="quarterpi",
            help="unit of the angle options (default: pi/4)",
        )
    if temp:
        p.add_argument(
            "--temp",
            required=False,
            default="zero",
            help="'zero', 'inf', '<value>K', 'tau=<value>' or 'ttilde=<value>'",
        )
    p.add_argument("--nodes", type=int, help="radial quadrature order")
    p.add_argument("--mmax", type=int, help="azimuthal order cutoff")
    p.add_argument("--nphi", type=int, help="azimuthal FFT length (odd)")
    p.add_argument("--lmax", type=float, help="multipole cap factor (default 1.0)")
    p.add_argument("--refine", type=float, default=1.0, help="resolution multiplier")
    p.add_argument("--xi-nodes", type=int, default=32, help="zero-T frequency nodes")
    p.add_argument("--tol", type=float, default=1e-8, help="Matsubara truncation tol")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="json")


def _angle(value, unit):
    return value * (_QP if unit == "quarterpi" else 1.0)


def _parse_geometry(args):
    from .engine import Geometry

    dimensionless = args.x is not None or args.u is not None
    si = args.r2 is not None or args.gap is not None or args.r1 is not None
    if dimensionless and si:
        raise ConfigError("give either --x/--u or --r1/--r2/--gap, not both")
    if dimensionless:
        if args.x is None or args.u is None:
            raise ConfigError("dimensionless mode needs both --x and --u")
        return Geometry.from_dimensionless(args.x, args.u), None
    if args.r2 is None or args.gap is None or args.r1 is None:
        raise ConfigError("SI mode needs --r1, --r2 and --gap")
    r1 = math.inf if str(args.r1).lower() == "plane" else float(args.r1)
    return Geometry(r1=r1, r2=args.r2, l_gap=args.gap), args.gap


def _parse_temp(args, geom, gap_si):
    from .engine import ThermalState

    spec = args.temp.strip().lower()
    if spec == "zero":
        return ThermalState.zero()
    if spec in ("inf", "infinite"):
        return ThermalState.high_t()
    if spec.endswith("k"):
        if gap_si is None:
            raise ConfigError("kelvin temperatures require SI geometry inputs")
        kelvin = float(spec[:-1])
        tau = 2.0 * math.pi * gap_si * K_BOLTZMANN * kelvin / HBAR_C
        return ThermalState(tau=tau)
    if spec.startswith("tau="):
        return ThermalState(tau=float(spec[4:]))
    if spec.startswith("ttilde="):
        return ThermalState.from_tau_tilde(float(spec[7:]), geom)
    raise ConfigError(f"cannot parse temperature {args.temp!r}")


def _parse_materials(args):
    unit = args.angle_unit
    if args.delta is not None:
        if args.theta1 is not None or args.theta2 is not None:
            raise ConfigError("give either --delta or --theta1/--theta2")
        th1, th2 = 0.0, _angle(args.delta, unit)
    else:
        th1 = _angle(args.theta1 or 0.0, unit)
        th2 = _angle(args.theta2 or 0.0, unit)
    for th in (th1, th2):
        if not 0.0 <= th <= math.pi / 2.0:
            raise ConfigError(f"PEMC angle {th} outside [0, pi/2]")
    return th1, th2


def _parse_disc(args, geom):
    from .engine import Discretization

    disc = Discretization.auto(geom, refine=args.refine)
    kwargs = {}
    if args.nodes:
        kwargs["n_k"] = args.nodes
    if args.mmax:
        kwargs["m_max"] = args.mmax
    if args.nphi:
        kwargs["n_phi"] = args.nphi
    if args.lmax:
        kwargs["ell_cap_factor"] = args.lmax
    if kwargs:
        from dataclasses import replace

        disc = replace(disc, **kwargs)
    return disc


def _emit(record_or_rows, meta, args, default_name):
    if args.format == "json" or isinstance(record_or_rows, dict):
        payload = {"meta": meta, "data": record_or_rows}
        text = json.dumps(payload, indent=2, default=float)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return
    rows = record_or_rows
    path = args.out or f"{default_name}.csv"
    _write_csv(path, rows, meta)
    with open(path.rsplit(".", 1)[0] + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, default=float)
    print(path)


def _write_csv(path, rows, meta):
    import csv

    with open(path, "w", newline="") as fh:
        for key, val in sorted(meta.items()):
            fh.write(f"# {key} = {val}\n")
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _meta(args, geom, thermal, extra=None):
    meta = {
        "version": __version__,
        "x": geom.x,
        "u": geom.u,
        "y": geom.y,
        "tau": thermal.tau if thermal else None,
        "refine": args.refine,
        "xi_nodes": args.xi_nodes,
        "tol": args.tol,
    }
    if extra:
        meta.update(extra)
    return meta


def _cmd_energy(args):
    from .engine import free_energy

    geom, gap_si = _parse_geometry(args)
    thermal = _parse_temp(args, geom, gap_si)
    th1, th2 = _parse_materials(args)
    disc = _parse_disc(args, geom)
    rep = free_energy(geom, th1, th2, thermal, disc, xi_nodes=args.xi_nodes, rel_tol=args.tol)
    record = {
        "free_energy_hbar_c_over_L": rep.free_energy,
        "free_energy_kbt": rep.free_energy_kbt,
        "per_n": rep.per_n,
        "convergence": rep.convergence,
        "theta1": th1,
        "theta2": th2,
    }
    if gap_si is not None and rep.free_energy is not None:
        record["free_energy_joule"] = rep.free_energy * HBAR_C / gap_si
    _emit(record, _meta(args, geom, thermal), args, "energy")
    return EXIT_OK


def _cmd_force(args):
    from .engine import force

    geom, gap_si = _parse_geometry(args)
    thermal = _parse_temp(args, geom, gap_si)
    th1, th2 = _parse_materials(args)
    disc = _parse_disc(args, geom)
    val = force(
        geom, th1, th2, thermal, disc, method=args.force_method, xi_nodes=args.xi_nodes
    )
    units = "k_B T/L" if thermal.is_infinite else "hbar c/L^2"
    record = {"force": val, "units": units, "attractive": bool(val < 0)}
    if gap_si is not None and not thermal.is_infinite:
        record["force_newton"] = val * HBAR_C / gap_si**2
    _emit(record, _meta(args, geom, thermal), args, "force")
    return EXIT_OK


def _cmd_critical_angle(args):
    from . import analysis

    geom, gap_si = _parse_geometry(args)
    thermal = _parse_temp(args, geom, gap_si)
    disc = _parse_disc(args, geom)
    dc = analysis.critical_angle(geom.x, geom.u, thermal.tau, disc=disc, xi_nodes=args.xi_nodes)
    record = {
        "delta_crit": dc,
        "delta_crit_quarterpi": None if dc is None else dc / _QP,
    }
    _emit(record, _meta(args, geom, thermal), args, "critical_angle")
    return EXIT_OK


def _cmd_equilibrium(args):
    from . import analysis

    geom, gap_si = _parse_geometry(args)
    th1, th2 = _parse_materials(args)
    delta = abs(th2 - th1)
    disc = _parse_disc(args, geom)
    kwargs = {}
    if args.temp.strip().lower() in ("inf", "infinite"):
        kwargs["tau"] = math.inf
    elif args.lambda_t_over_reff is not None:
        kwargs["lambda_t_over_reff"] = args.lambda_t_over_reff
    else:
        raise ConfigError("equilibrium needs --lambda-t-over-reff or --temp inf")
    if args.x_lo and args.x_hi:
        import numpy as np

        kwargs["x_grid"] = np.geomspace(args.x_lo, args.x_hi, args.x_points)
    x_eq = analysis.equilibrium_distance(delta, geom.u, disc=disc, xi_nodes=args.xi_nodes, **kwargs)
    record = {"x_eq": x_eq, "delta": delta, "u": geom.u}
    _emit(record, _meta(args, geom, None), args, "equilibrium")
    return EXIT_OK


def _cmd_sumrule(args):
    from . import analysis

    geom, gap_si = _parse_geometry(args)
    thermal = _parse_temp(args, geom, gap_si)
    disc = _parse_disc(args, geom)
    val = analysis.sumrule_integral(
        geom,
        tau=thermal.tau,
        method=args.method,
        disc=disc,
        xi_nodes=args.xi_nodes,
        check=args.check,
    )
    units = "script_l/(k_B T) * hbar c/L^2" if thermal.is_infinite else "hbar c/L^2"
    record = {"integral": val, "units": units, "method": args.method, "y": geom.y}
    _emit(record, _meta(args, geom, thermal), args, "sumrule")
    return EXIT_OK


def _cmd_figure(args):
    from .figures import figure_dataset

    rows, meta = figure_dataset(args.id, points=args.points)
    meta["version"] = __version__
    base = args.out or f"figure{args.id}"
    if base.endswith(".csv"):
        base = base[:-4]
    _write_csv(base + ".csv", rows, meta)
    with open(base + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, default=float)
    outputs = [base + ".csv", base + ".json"]
    if not args.no_plot:
        from .plotting import render_figure

        render_figure(args.id, rows, meta, base + ".png")
        outputs.append(base + ".png")
    print("\n".join(outputs))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pemc-casimir",
        description="Casimir free energy and force between PEMC spheres",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", help="Casimir free energy")
    _add_common(p)
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("force", help="Casimir force")
    _add_common(p)
    p.add_argument("--force-method", choices=("fd", "trace"), default="fd")
    p.set_defaults(func=_cmd_force)

    p = sub.add_parser("critical-angle", help="material angle of vanishing force")
    _add_common(p, materials=False)
    p.set_defaults(func=_cmd_critical_angle)

    p = sub.add_parser("equilibrium", help="stable equilibrium distance")
    _add_common(p, temp=True)
    p.add_argument("--lambda-t-over-reff", type=float, help="lambda_T / R_eff")
    p.add_argument("--x-lo", type=float, help="scan lower bound in x")
    p.add_argument("--x-hi", type=float, help="scan upper bound in x")
    p.add_argument("--x-points", type=int, default=25)
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("sumrule", help="integral of the force over delta")
    _add_common(p, materials=False)
    p.add_argument("--method", choices=("engine", "pfa", "dipole"), default="engine")
    p.add_argument("--check", action="store_true", help="verify quadrature convergence")
    p.set_defaults(func=_cmd_sumrule)

    p = sub.add_parser("figure", help="regenerate a figure dataset (and PNG)")
    p.add_argument("id", type=int, choices=(2, 3, 4, 5, 6, 7, 8, 9))
    p.add_argument("--points", type=int, help="resolution override")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", help="output basename")
    p.set_defaults(func=_cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, OverflowError, FloatingPointError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
