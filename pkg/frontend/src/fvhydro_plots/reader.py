"""Readers for the fvhydro run-directory layout.

A run directory contains:
  manifest.txt      key = value metadata
  snapshots.csv     index,filename,time
  snap_XX.csv       x,rho,momentum,K,H   (one per snapshot)
  energy.csv        time,total_energy,free_energy,kinetic_energy
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class RunDataError(RuntimeError):
    pass


@dataclass
class Snapshot:
    time: float
    x: np.ndarray
    rho: np.ndarray
    momentum: np.ndarray
    k: np.ndarray
    h: np.ndarray


@dataclass
class RunData:
    path: Path
    manifest: dict
    snapshots: list
    energy: np.ndarray | None  # columns: time, total, free, kinetic

    @property
    def label(self) -> str:
        return self.manifest.get("run_name", self.path.name)


def _require(path: Path) -> Path:
    if not path.exists():
        raise RunDataError(f"missing {path.name} in {path.parent}")
    return path


def _read_table(path: Path) -> np.ndarray:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.size == 0:
        raise RunDataError(f"{path.name} has no rows")
    return np.atleast_2d(data)


def read_manifest(run_dir: Path) -> dict:
    out = {}
    for line in _require(run_dir / "manifest.txt").read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def load_run(run_dir) -> RunData:
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise RunDataError(f"run directory {run_dir} does not exist")
    manifest = read_manifest(run_dir)

    snapshots = []
    index_path = _require(run_dir / "snapshots.csv")
    for line in index_path.read_text().splitlines()[1:]:
        if not line.strip():
            continue
        _, filename, time = line.split(",")
        table = _read_table(_require(run_dir / filename.strip()))
        snapshots.append(Snapshot(float(time), table[:, 0], table[:, 1],
                                  table[:, 2], table[:, 3], table[:, 4]))

    energy = None
    energy_path = run_dir / "energy.csv"
    if energy_path.exists():
        energy = _read_table(energy_path)
    return RunData(run_dir, manifest, snapshots, energy)
