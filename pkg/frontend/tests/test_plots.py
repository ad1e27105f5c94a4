"""Rendering from synthetic and real run directories."""

import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from fvhydro_plots.cli import main
from fvhydro_plots.reader import RunDataError, load_run
from fvhydro_plots.render import render


def fmt(x):
    return f"{x:.16e}"


@pytest.fixture
def run_dir(tmp_path):
    """Synthetic run directory following the documented layout."""
    d = tmp_path / "run"
    d.mkdir()
    x = np.linspace(-4.9, 4.9, 50)
    (d / "manifest.txt").write_text("# manifest\nrun_name = demo\norder = 3\n")
    index = ["index,filename,time"]
    for i, t in enumerate((0.0, 1.0)):
        rho = np.exp(-0.5 * x * x) * (1 + 0.1 * t)
        rows = ["x,rho,momentum,K,H"]
        for j in range(len(x)):
            rows.append(",".join(fmt(v) for v in (x[j], rho[j], 0.0, -0.9, 0.5 * x[j] ** 2)))
        (d / f"snap_{i:02d}.csv").write_text("\n".join(rows) + "\n")
        index.append(f"{i},snap_{i:02d}.csv,{fmt(t)}")
    (d / "snapshots.csv").write_text("\n".join(index) + "\n")
    energy = ["time,total_energy,free_energy,kinetic_energy"]
    for t in np.linspace(0, 1, 11):
        energy.append(",".join(fmt(v) for v in (t, 1.0 - 0.3 * t, 0.8 - 0.2 * t, 0.2 - 0.1 * t)))
    (d / "energy.csv").write_text("\n".join(energy) + "\n")
    return d


class TestReader:
    def test_loads_snapshots_and_energy(self, run_dir):
        run = load_run(run_dir)
        assert run.label == "demo"
        assert len(run.snapshots) == 2
        assert run.snapshots[1].time == 1.0
        assert run.energy.shape[1] == 4

    def test_missing_directory(self, tmp_path):
        with pytest.raises(RunDataError):
            load_run(tmp_path / "nope")

    def test_missing_snapshot_file(self, run_dir):
        (run_dir / "snap_01.csv").unlink()
        with pytest.raises(RunDataError):
            load_run(run_dir)


class TestRender:
    def test_four_panel_figure(self, run_dir, tmp_path):
        out = tmp_path / "figs"
        written = render(load_run(run_dir), ["density", "momentum", "K", "energy"], out)
        names = sorted(p.name for p in written)
        assert names == ["K.png", "density.png", "energy.png", "momentum.png", "overview.png"]
        for p in written:
            assert p.stat().st_size > 0

    def test_single_panel(self, run_dir, tmp_path):
        written = render(load_run(run_dir), ["energy"], tmp_path / "figs")
        assert [p.name for p in written] == ["energy.png"]

    def test_empty_selection_writes_nothing(self, run_dir, tmp_path):
        out = tmp_path / "figs"
        assert render(load_run(run_dir), [], out) == []
        assert not out.exists()

    def test_unknown_panel_rejected(self, run_dir, tmp_path):
        with pytest.raises(RunDataError):
            render(load_run(run_dir), ["vorticity"], tmp_path / "figs")

    def test_deterministic_file_names(self, run_dir, tmp_path):
        a = render(load_run(run_dir), ["density"], tmp_path / "a")
        b = render(load_run(run_dir), ["density"], tmp_path / "b")
        assert [p.name for p in a] == [p.name for p in b]


class TestCli:
    def test_render_command(self, run_dir, tmp_path, capsys):
        out = tmp_path / "figs"
        code = main(["render", "--run", str(run_dir),
                     "--panels", "density,momentum,K,energy", "--out", str(out)])
        assert code == 0
        assert (out / "overview.png").stat().st_size > 0

    def test_missing_csv_fails_with_message(self, run_dir, tmp_path, capsys):
        (run_dir / "energy.csv").unlink()
        code = main(["render", "--run", str(run_dir), "--panels", "energy",
                     "--out", str(tmp_path / "figs")])
        assert code == 1
        assert "energy.csv" in capsys.readouterr().err

    def test_empty_panels_ok(self, run_dir, tmp_path):
        assert main(["render", "--run", str(run_dir), "--panels", "",
                     "--out", str(tmp_path / "figs")]) == 0


@pytest.mark.skipif(shutil.which("fvhydro") is None, reason="fvhydro CLI not installed")
class TestAgainstSolverOutput:
    def test_renders_real_run(self, tmp_path):
        run_out = tmp_path / "run"
        subprocess.run(["fvhydro", "run", "--scenario", "ex31", "--cells", "50",
                        "--t-end", "0.05", "--out", str(run_out)], check=True)
        figs = tmp_path / "figs"
        code = main(["render", "--run", str(run_out), "--out", str(figs),
                     "--panels", "density,momentum,K,energy"])
        assert code == 0
        assert (figs / "overview.png").stat().st_size > 0
