r"""Rendering of the figure datasets to PNG files (report path)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]

_QP = math.pi / 4.0


def _group(rows, *keys):
    out = {}
    for r in rows:
        out.setdefault(tuple(r[k] for k in keys), []).append(r)
    return out


def render_figure(fig_id: int, rows, meta, path: str):
    """Render one figure dataset; layout follows the corresponding dataset."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    if fig_id == 2:
        for (d,), grp in sorted(_group(rows, "delta").items()):
            t = [r["tau"] for r in grp]
            ax.plot(t, [r["dF_exact"] for r in grp], "o", ms=3, label=f"d={d / _QP:.2f} pi/4")
            ax.plot(t, [r["dF_expansion"] for r in grp], "-", color=ax.lines[-1].get_color())
        ax.set_xlabel("tau")
        ax.set_ylabel("(F - E) L/(hbar c)")
    elif fig_id == 3:
        t = [r["tau"] for r in rows]
        ax.semilogx(t, [r["delta_crit"] / _QP for r in rows], "-", label="force zero")
        ax.semilogx(t, [r["delta_energy_zero"] / _QP for r in rows], ":", label="energy zero")
        for a in meta.get("asymptotes", []):
            ax.axhline(a / _QP, ls="--", lw=0.7, color="gray")
        ax.set_xlabel("tau")
        ax.set_ylabel("delta_crit [pi/4]")
    elif fig_id == 4:
        for (d,), grp in sorted(_group(rows, "delta").items()):
            x = [r["x"] for r in grp]
            ax.semilogx(x, [r["E_minus_EPFA"] for r in grp], "o-", ms=3, label=f"d={d / _QP:.2f} pi/4")
            ax.semilogx(x, [r["dE_closed"] for r in grp], "-", lw=0.8, color=ax.lines[-1].get_color())
            ax.semilogx(x, [r["E_dipole_plane"] for r in grp], "--", lw=0.8, color=ax.lines[-1].get_color())
        ax.set_xlabel("x = L/R_eff")
        ax.set_ylabel("(E - E_PFA) L/(hbar c)")
    elif fig_id == 5:
        for (u, d), grp in sorted(_group(rows, "u", "delta").items()):
            ls = "-" if u == 0.0 else "--"
            yv = [r["y_minus_1"] for r in grp]
            ax.semilogx(yv, [r["ratio_over_zeta3"] for r in grp], ls, label=f"u={u} d={d / _QP:.2f}")
        for lev in meta.get("pfa_levels", []):
            ax.axhline(lev / 1.2020569031595943, ls=":", lw=0.7, color="gray")
        ax.set_xlabel("y - 1")
        ax.set_ylabel("F_T/(zeta(3) F_T^(1))")
    elif fig_id == 6:
        for (u, lab), grp in sorted(_group(rows, "u", "temperature").items()):
            x = [r["x"] for r in grp]
            dc = [r["delta_crit"] / _QP for r in grp]
            ls = "-" if u == 0.0 else "--"
            color = "tab:blue" if lab == "T0" else "tab:red"
            ax.semilogx(x, dc, ls, color=color, label=f"u={u} {lab}")
        for name, val in meta.get("asymptotes_quarterpi", {}).items():
            ax.axhline(val, ls=":", lw=0.7, color="gray")
        ax.set_xlabel("x = L/R_eff")
        ax.set_ylabel("delta_crit [pi/4]")
    elif fig_id == 7:
        for (u,), grp in sorted(_group(rows, "u").items()):
            yv = [r["y_minus_1"] for r in grp]
            vals = [r["y3_I"] for r in grp]
            if u < 0:
                ax.semilogx(yv, vals, "--", color="gray", label="double round trip (u=0)")
            else:
                ax.semilogx(yv, vals, "o-", ms=3, label=f"u={u}")
        ax.axhline(meta.get("asymptote", 0.0), ls=":", lw=0.7, color="gray")
        ax.set_xlabel("y - 1")
        ax.set_ylabel("y^3 I")
    elif fig_id in (8, 9):
        deltas = sorted({r["delta"] for r in rows})
        fig.clf()
        axes = fig.subplots(1, len(deltas))
        if len(deltas) == 1:
            axes = [axes]
        for axp, d in zip(axes, deltas):
            grp = [r for r in rows if r["delta"] == d and r["error"] == ""]
            xs = sorted({r["x"] for r in grp})
            ts = sorted({r["L_over_lambdaT"] for r in grp})
            z = np.full((len(ts), len(xs)), np.nan)
            for r in grp:
                z[ts.index(r["L_over_lambdaT"]), xs.index(r["x"])] = r["force_ratio"]
            pc = axp.pcolormesh(xs, ts, z, shading="nearest", cmap="RdBu")
            axp.contour(xs, ts, z, levels=[0.0], colors="k")
            axp.set_xscale("log")
            axp.set_yscale("log")
            axp.set_title(f"delta = {d / _QP:.2f} pi/4")
            axp.set_xlabel("x")
            axp.set_ylabel("L/lambda_T")
            fig.colorbar(pc, ax=axp)
        fig.savefig(path, dpi=160)
        plt.close(fig)
        return
    else:
        raise ValueError(f"no renderer for figure {fig_id}")
    ax.legend(fontsize=7)
    fig.savefig(path, dpi=160)
    plt.close(fig)
