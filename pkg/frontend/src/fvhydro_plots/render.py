"""Panel rendering: snapshots of the fields and the energy decay curves."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import RunData, RunDataError

DPI = 130

PANELS = ("density", "momentum", "K", "energy")

_FIELD = {
    "density": ("rho", r"density $\rho$"),
    "momentum": ("momentum", r"momentum $\rho u$"),
    "K": ("k", "free-energy variation"),
}


def _draw_field(ax, run: RunData, panel: str):
    attr, label = _FIELD[panel]
    for snap in run.snapshots:
        ax.plot(snap.x, getattr(snap, attr), lw=1.2, label=f"t = {snap.time:g}")
    ax.set_xlabel("x")
    ax.set_ylabel(label)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)


def _draw_energy(ax, run: RunData):
    if run.energy is None:
        raise RunDataError(f"missing energy.csv in {run.path}")
    t = run.energy[:, 0]
    ax.plot(t, run.energy[:, 1], lw=1.4, label="total energy")
    ax.plot(t, run.energy[:, 2], lw=1.4, ls="--", label="free energy")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)


def _draw(ax, run: RunData, panel: str):
    if panel == "energy":
        _draw_energy(ax, run)
    else:
        _draw_field(ax, run, panel)
    ax.set_title(f"{run.label}: {panel}")


def render(run: RunData, panels, out_dir) -> list[Path]:
    """One PNG per requested panel; all four standard panels additionally
    produce a combined 2x2 overview figure.  Returns the written paths."""
    panels = list(panels)
    for panel in panels:
        if panel not in PANELS:
            raise RunDataError(f"unknown panel {panel!r}; choose from {', '.join(PANELS)}")
    if not panels:
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for panel in panels:
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        _draw(ax, run, panel)
        fig.tight_layout()
        path = out_dir / f"{panel}.png"
        fig.savefig(path, dpi=DPI)
        plt.close(fig)
        written.append(path)
    if set(panels) == set(PANELS):
        fig, axes = plt.subplots(2, 2, figsize=(10.4, 7.2))
        for ax, panel in zip(axes.ravel(), PANELS):
            _draw(ax, run, panel)
        fig.tight_layout()
        path = out_dir / "overview.png"
        fig.savefig(path, dpi=DPI)
        plt.close(fig)
        written.append(path)
    return written
