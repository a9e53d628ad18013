"""Bundled figure-class outputs: each figure renders a PNG next to the
delimited data it was drawn from.

Every figure writes (a) a CSV via the sweep emitters (or the Q-grid CSV
format below) and (b) a matplotlib PNG rendered with the Agg backend.
Outputs are deterministic: fixed grids, fixed formatting, no timestamps,
so repeated runs are byte-identical.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import paramp, sweep
from .phasespace import GridSpec

_PNG_OPTS = {"dpi": 150, "metadata": {"Software": "fpsteady"}}


def _save(fig, path):
    fig.savefig(path, **_PNG_OPTS)
    plt.close(fig)
    return path


def qgrid_csv_lines(qgrid, manifest):
    """Q-grid CSV: '#' manifest lines then x,y,q rows in row-major order."""
    lines = [f"# {k}: {v}" for k, v in sorted(manifest.items())]
    lines.append("x,y,q")
    for i, x in enumerate(qgrid.x_axis):
        for j, y in enumerate(qgrid.y_axis):
            lines.append(
                f"{sweep._fmt(float(x))},{sweep._fmt(float(y))},"
                f"{sweep._fmt(float(qgrid.values[i, j]))}"
            )
    return lines


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# individual figures

def render_vacuum_rabi(outdir):
    """|<a>| heatmap over (drive detuning, drive power), resonant regime."""
    cfg = sweep.parse_config({
        "schema_version": 1,
        "model": "transmon_cavity",
        "observables": ["a_moment_0_1"],
        "fixed": {"delta_ct": 0.0, "g": 115.0, "chi": -220.0,
                  "gamma_c": 2.0, "gamma_t": 0.1},
        "axes": [
            {"name": "delta_c", "min": -200.0, "max": 200.0, "count": 201},
            {"name": "epsilon", "min": 0.1, "max": 50.0, "count": 21,
             "scale": "log"},
        ],
        "output": {"format": "csv", "prefix": os.path.join(outdir, "vacuum_rabi")},
    }, where="vacuum_rabi")
    result = sweep.run_sweep(cfg)
    files = sweep.emit(result, cfg)

    amp = np.abs(result.tables["a_moment_0_1"])
    dc = result.axes[0][1]
    eps = result.axes[1][1]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    mesh = ax.pcolormesh(dc, eps, amp.T, shading="nearest", cmap="viridis")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\Delta_c/2\pi$ (MHz)")
    ax.set_ylabel(r"$\epsilon/2\pi$ (MHz)")
    fig.colorbar(mesh, ax=ax, label=r"$|\langle a\rangle|$")
    fig.tight_layout()
    files.append(_save(fig, os.path.join(outdir, "vacuum_rabi.png")))
    return files


def render_phase_diagram(outdir, count=200):
    """Mean-field phase classification over the (Delta, eps2) plane."""
    cfg = sweep.parse_config({
        "schema_version": 1,
        "model": "parametric_duffing",
        "observables": ["phase"],
        "fixed": {"gamma1": 1.0, "gamma2": 0.0, "u": 1.0, "eps1": 0.0},
        "axes": [
            {"name": "delta", "min": -3.0, "max": 3.0, "count": count},
            {"name": "eps2", "min": 0.0, "max": 3.0, "count": count},
        ],
        "output": {"format": "pgm", "prefix": os.path.join(outdir, "phase_diagram")},
    }, where="phase_diagram")
    result = sweep.run_sweep(cfg)
    files = sweep.emit(result, cfg)

    phase = result.tables["phase"]
    delta = result.axes[0][1]
    eps2 = result.axes[1][1]
    fig, ax = plt.subplots(figsize=(4.6, 3.6))
    mesh = ax.pcolormesh(delta, eps2, phase.T, shading="nearest",
                         cmap="viridis", vmin=1, vmax=3)
    ax.set_xlabel(r"$\Delta/\gamma_1$")
    ax.set_ylabel(r"$\epsilon_2/\gamma_1$")
    fig.colorbar(mesh, ax=ax, label="stable fixed points")
    fig.tight_layout()
    files.append(_save(fig, os.path.join(outdir, "phase_diagram.png")))
    return files


# drive sequence crossing the three mean-field regions (gamma1 units)
Q_SEQUENCE_EPS2 = (2.0, 4.25, 4.75, 6.25)


def render_q_sequence(outdir):
    """Q-functions across the phase transition (U=5, Delta=-12, gamma1 units)."""
    grid = GridSpec.square(3.5, 101)
    files = []
    fig, axes = plt.subplots(1, 4, figsize=(13.0, 3.2), sharey=True)
    for k, e2 in enumerate(Q_SEQUENCE_EPS2):
        p = paramp.ParampParams(
            delta=sweep.to_angular(-12.0), eps1=0.0,
            eps2=sweep.to_angular(e2), u=sweep.to_angular(5.0),
            gamma1=sweep.to_angular(1.0),
        )
        q = paramp.qfunction(p, grid)
        manifest = {
            "model": "parametric_duffing", "gamma1_mhz": 1.0, "u": "5 gamma1",
            "delta": "-12 gamma1", "eps2": f"{e2} gamma1", "eps1": 0.0,
            "code_version": sweep.CODE_VERSION,
        }
        files.append(_write_lines(
            os.path.join(outdir, f"q_sequence_{k}.csv"),
            qgrid_csv_lines(q, manifest),
        ))
        ax = axes[k]
        ax.pcolormesh(q.x_axis, q.y_axis, q.values.T, shading="nearest",
                      cmap="magma")
        ax.set_title(rf"$\epsilon_2 = {e2}\,\gamma_1$")
        ax.set_xlabel(r"Re $\alpha$")
        ax.set_aspect("equal")
    axes[0].set_ylabel(r"Im $\alpha$")
    fig.tight_layout()
    files.append(_save(fig, os.path.join(outdir, "q_sequence.png")))
    return files


# squeezing curve families: (label, U/gamma1, eps2 range)
SQUEEZING_PANELS = (
    ("small_u", (0.001, 0.02, 0.1, 0.5), 0.05, 1.3),
    ("large_u", (5.0, 20.0, 50.0), None, None),  # range scales with U
)


def render_squeezing(outdir, points=60):
    """Minimum quadrature uncertainty vs parametric drive for a U ladder."""
    files = []
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.4))
    for panel, (label, u_list, lo, hi) in zip(axes, SQUEEZING_PANELS):
        lines = [f"# model: parametric_duffing", "# gamma1_mhz: 1.0",
                 f"# code_version: {sweep.CODE_VERSION}",
                 "# units: frequencies are nu = omega/2pi in MHz"]
        header = ["eps2"] + [f"dx_min_u{u:g}" for u in u_list]
        rows = []
        curves = {}
        for u in u_list:
            e_lo = lo if lo is not None else 0.05 * u
            e_hi = hi if hi is not None else 0.8 * u
            eps2s = np.linspace(e_lo, e_hi, points)
            dx = []
            for e2 in eps2s:
                p = paramp.ParampParams(
                    delta=0.0, eps1=0.0, eps2=sweep.to_angular(float(e2)),
                    u=sweep.to_angular(u), gamma1=sweep.to_angular(1.0),
                )
                dx.append(paramp.min_quadrature_uncertainty(p)["value"])
            curves[u] = (eps2s, np.array(dx))
            panel.plot(eps2s / max(u_list) if lo is None else eps2s, dx,
                       label=rf"$U = {u:g}\,\gamma_1$")
        # column-align the CSV on each curve's own eps2 grid
        for i in range(points):
            row = []
            for j, u in enumerate(u_list):
                eps2s, dx = curves[u]
                if j == 0:
                    row.append(sweep._fmt(float(eps2s[i])))
                row.append(sweep._fmt(float(dx[i])))
            rows.append(",".join(row))
        lines.append("# note: eps2 column belongs to the first curve; "
                     "other curves share the row index on their own ranges")
        lines.append(",".join(header))
        lines.extend(rows)
        files.append(_write_lines(
            os.path.join(outdir, f"squeezing_{label}.csv"), lines))
        panel.axhline(0.25, color="gray", lw=0.8, ls="--")
        panel.axhline(0.5, color="gray", lw=0.8, ls=":")
        panel.set_xlabel(r"$\epsilon_2/\gamma_1$" if lo is not None
                         else r"$\epsilon_2/\epsilon_2^{max}$")
        panel.set_ylabel(r"$\Delta X_{min}$")
        panel.legend(fontsize=8)
    fig.tight_layout()
    files.append(_save(fig, os.path.join(outdir, "squeezing.png")))
    return files


# cat-state panels: (gamma2/gamma1, eps2 in MHz) with U/2pi=0.1, gamma1/2pi=1
CAT_PANELS = ((0.05, 1.15), (0.5, 2.28), (1.0, 3.4), (10.0, 23.5))


def render_cats(outdir):
    """Q-functions of the two-photon-driven state for a gamma2 ladder."""
    grid = GridSpec.square(4.0, 121)
    files = []
    fig, axes = plt.subplots(1, 4, figsize=(13.0, 3.2), sharey=True)
    metrics_lines = [
        "# model: parametric_duffing",
        f"# code_version: {sweep.CODE_VERSION}",
        "# units: frequencies are nu = omega/2pi in MHz",
        "gamma2,eps2,nbar,peak,bridge,bridge_ratio",
    ]
    for k, (g2, e2) in enumerate(CAT_PANELS):
        p = paramp.ParampParams(
            delta=0.0, eps1=0.0, eps2=sweep.to_angular(e2),
            u=sweep.to_angular(0.1), gamma1=sweep.to_angular(1.0),
            gamma2=sweep.to_angular(g2),
        )
        q = paramp.qfunction(p, grid)
        cm = paramp.cat_metrics(p, grid)
        manifest = {
            "model": "parametric_duffing", "gamma1_mhz": 1.0, "u_mhz": 0.1,
            "gamma2_mhz": g2, "eps2_mhz": e2, "delta": 0.0, "eps1": 0.0,
            "code_version": sweep.CODE_VERSION,
        }
        files.append(_write_lines(
            os.path.join(outdir, f"cats_{k}.csv"),
            qgrid_csv_lines(q, manifest),
        ))
        metrics_lines.append(",".join(sweep._fmt(v) for v in (
            g2, e2, cm.mean_photons, cm.peak_value, cm.bridge_value,
            cm.bridge_ratio,
        )))
        ax = axes[k]
        ax.pcolormesh(q.x_axis, q.y_axis, q.values.T, shading="nearest",
                      cmap="magma")
        ax.set_title(rf"$\gamma_1/\gamma_2 = {1.0 / g2:g}$")
        ax.set_xlabel(r"Re $\alpha$")
        ax.set_aspect("equal")
    axes[0].set_ylabel(r"Im $\alpha$")
    files.append(_write_lines(os.path.join(outdir, "cats_metrics.csv"),
                              metrics_lines))
    fig.tight_layout()
    files.append(_save(fig, os.path.join(outdir, "cats.png")))
    return files


FIGURES = {
    "vacuum_rabi": render_vacuum_rabi,
    "phase_diagram": render_phase_diagram,
    "q_sequence": render_q_sequence,
    "squeezing": render_squeezing,
    "cats": render_cats,
}


def render_all(outdir, names=None):
    """Render the requested bundled figures (all by default)."""
    os.makedirs(outdir, exist_ok=True)
    chosen = names or sorted(FIGURES)
    written = []
    for name in chosen:
        if name not in FIGURES:
            raise KeyError(f"unknown figure {name!r}; known: {sorted(FIGURES)}")
        written.extend(FIGURES[name](outdir))
    return written
