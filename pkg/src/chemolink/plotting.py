"""PNG figures rendered from experiment tables (Agg backend, no display needed)."""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .montecarlo import ExperimentResult, Table  # noqa: E402

logger = logging.getLogger(__name__)

PANEL_LABELS = {"d_m": ("d", 1e6, "um"), "eta_pa_s": ("eta", 1e3, "mPa s"), "T_s": ("T", 1.0, "s")}


def _rows_where(table: Table, **conds) -> list[tuple]:
    idx = {k: table.columns.index(k) for k in conds}
    return [r for r in table.rows if all(r[idx[k]] == v for k, v in conds.items())]


def _unique(values) -> list:
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _panel_label(panel: str, value: float) -> str:
    name, scale, unit = PANEL_LABELS[panel]
    return f"{name} = {value * scale:g} {unit}"


def plot_pdf_validation(result: ExperimentResult):
    hists = [t for t in result.tables if t.name.startswith("pdf_validation_I")]
    n = len(hists)
    cols = min(2, n)
    rows = int(np.ceil(n / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(5 * cols, 3.6 * rows), squeeze=False)
    for ax, t in zip(axes.flat, hists):
        centers, dens, pdf = t.column("bin_center"), t.column("density_emp"), t.column("pdf_analytic")
        width = t.column("bin_right") - t.column("bin_left")
        ax.bar(centers, dens, width=width, alpha=0.5, label="particle simulation")
        ax.plot(centers, pdf, "k-", lw=1.5, label="Gaussian model")
        ax.set_title(f"I = {t.rows[0][0]:g}")
        ax.set_xlabel("observation Y")
        ax.set_ylabel("density")
    for ax in list(axes.flat)[n:]:
        ax.set_visible(False)
    axes.flat[0].legend(fontsize=8)
    return fig


def plot_snr_sweep(result: ExperimentResult):
    t = result.table("snr_sweep")
    fig, ax = plt.subplots(figsize=(6, 4))
    for d in _unique(t.column("d_m")):
        rows = _rows_where(t, d_m=d)
        I = np.array([r[1] for r in rows])
        s = np.array([r[3] for r in rows])
        line, = ax.semilogx(I, s, label=f"d = {d * 1e6:g} um")
        ax.axvline(rows[0][4], color=line.get_color(), ls=":", lw=1)
    ax.set_xlabel("intensity I")
    ax.set_ylabel("SNR (dB)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _bep_panels(t: Table):
    panels = _unique(t.column("panel"))
    fig, axes = plt.subplots(1, len(panels), figsize=(4.5 * len(panels), 3.8), squeeze=False)
    return fig, dict(zip(panels, axes.flat))


def plot_bep_sensitivity(result: ExperimentResult):
    t = result.table("bep_sensitivity")
    fig, axes = _bep_panels(t)
    for panel, ax in axes.items():
        for v in _unique(r[1] for r in _rows_where(t, panel=panel)):
            rows = _rows_where(t, panel=panel, sweep_value=v)
            ax.loglog([r[2] for r in rows], np.maximum([r[3] for r in rows], 1e-300),
                      label=_panel_label(panel, v))
        ax.set_xlabel("intensity I")
        ax.set_ylabel("BEP")
        ax.set_ylim(top=1.0)
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def plot_estimation_gap(result: ExperimentResult):
    t = result.table("estimation_gap")
    fig, axes = _bep_panels(t)
    for panel, ax in axes.items():
        for v in _unique(r[2] for r in _rows_where(t, panel=panel)):
            prop = _rows_where(t, model="proposed", panel=panel, sweep_value=v)
            base = _rows_where(t, model="baseline", panel=panel, sweep_value=v)
            line, = ax.loglog([r[3] for r in prop], np.maximum([r[4] for r in prop], 1e-300),
                              label=_panel_label(panel, v))
            ax.loglog([r[3] for r in base], np.maximum([r[4] for r in base], 1e-300),
                      ls="--", color=line.get_color())
        ax.set_xlabel("intensity I")
        ax.set_ylabel("BEP (solid: active, dashed: passive)")
        ax.set_ylim(1e-20, 1.0)
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def plot_empirical_bep(result: ExperimentResult):
    t = result.table("empirical_bep")
    row = dict(zip(t.columns, t.rows[0]))
    fig, ax = plt.subplots(figsize=(4.5, 3.8))
    floor = 1e-300
    est = max(row["bep_emp"], row["mc_floor"] / 10)
    ax.errorbar([0], [est], yerr=[[est - max(row["ci_low"], floor)], [row["ci_high"] - est]],
                fmt="o", capsize=4, label="simulation (95% Wilson)")
    ax.plot([1], [max(row["bep_analytic"], floor)], "s", label="active model")
    ax.plot([2], [max(row["bep_baseline"], floor)], "^", label="passive model")
    ax.set_yscale("log")
    ax.set_xticks([0, 1, 2], ["sim", "active", "passive"])
    ax.set_title(f"I = {row['I']:.4g}, n = {row['n']}")
    ax.legend(fontsize=8)
    return fig


PLOTTERS = {
    "pdf_validation": plot_pdf_validation,
    "snr_sweep": plot_snr_sweep,
    "bep_sensitivity": plot_bep_sensitivity,
    "estimation_gap": plot_estimation_gap,
    "empirical_bep": plot_empirical_bep,
}


def render(result: ExperimentResult, directory: Path) -> Path:
    """Write ``<kind>.png`` next to the CSV files and return its path."""
    directory.mkdir(parents=True, exist_ok=True)
    fig = PLOTTERS[result.kind](result)
    path = directory / f"{result.kind}.png"
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    logger.info("wrote %s", path)
    return path
