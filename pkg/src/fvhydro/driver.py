"""Scenario runner: executes simulations, writes CSV artifacts and manifests,
and provides the well-balance and convergence studies."""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import Boundary, DampingKind, DampingSpec, FieldState, Grid, ModelSpec, initialize_state
from .diagnostics import ConvergenceTable, EnergyMeter, l1_error, wellbalance_residual
from .freeenergy import PressureLaw, make_kernel, make_potential
from .kernels import backend_name
from .scenarios import RunSetup, get_scenario, scenario_ids
from .scheme import SolverContext
from .timeint import PositivityError, W_MIN, compute_dt, ssp_rk3_step

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_BAD_CONFIG = 3
EXIT_NUMERICAL_FAULT = 4

_T_EPS = 1e-12
WELLBALANCE_TOL = 1e-14


def _fmt(x: float) -> str:
    return f"{x:.16e}"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved knobs of one CLI invocation; None falls back to scenario defaults."""

    scenario: str = "ex31"
    order: int = 3
    n_cells: int | None = None
    t_end: float | None = None
    cfl: float = 0.7
    dt_min: float = 1e-10
    flux: str = "auto"
    ic: str = "default"
    out_dir: str | None = None
    snapshot_times: tuple | None = None
    energy_stride: int = 10
    blowup_rho_factor: float | None = None
    conv_method: str = "auto"
    boundary: str = "periodic"
    custom: dict = field(default_factory=dict)
    config_echo: dict = field(default_factory=dict)

    def validate(self):
        if self.order not in (1, 3, 5):
            raise ConfigError("order must be one of 1, 3, 5")
        if self.flux not in ("auto", "llf", "kinetic"):
            raise ConfigError("flux must be auto, llf or kinetic")
        if self.ic not in ("default", "steady"):
            raise ConfigError("ic must be default or steady")
        if self.conv_method not in ("auto", "direct", "fft"):
            raise ConfigError("conv_method must be auto, direct or fft")
        if self.boundary not in ("periodic", "outflow"):
            raise ConfigError("boundary must be periodic or outflow")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.scenario != "custom" and self.scenario not in scenario_ids():
            raise ConfigError(f"unknown scenario {self.scenario!r}")


@dataclass
class RunResult:
    name: str
    grid: Grid
    model: ModelSpec
    order: int
    ctx: SolverContext
    state0: FieldState
    state: FieldState
    energy_times: list
    energy_total: list
    energy_free: list
    steps: int = 0
    wall_time: float = 0.0
    blowup: bool = False
    blowup_time: float | None = None
    fault: str | None = None
    out_dir: Path | None = None
    min_rho: float = float("inf")
    peak_times: list = field(default_factory=list)
    peak_rho: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.fault:
            return EXIT_NUMERICAL_FAULT
        if self.blowup:
            return EXIT_BLOWUP
        return EXIT_OK


def _custom_setup(cfg: RunConfig) -> RunSetup:
    """Small parametrized scenario for `scenario = custom` config files."""
    c = cfg.custom
    try:
        x_left = float(c.get("x_left", -5.0))
        x_right = float(c.get("x_right", 5.0))
        m = float(c.get("m", 1.0))
        c_p = float(c.get("c_p", 1.0))
        potential = make_potential(c.get("potential", "none"))
        alpha = c.get("alpha")
        kernel = make_kernel(c.get("kernel", "none"),
                             alpha=float(alpha) if alpha is not None else None)
        damping_kind = DampingKind(c.get("damping", "none"))
        gamma = float(c.get("gamma", 1.0 if damping_kind is DampingKind.LINEAR else 0.0))
        profile = c.get("profile", "gaussian")
        mass = float(c.get("mass", 1.0))
        center = float(c.get("center", 0.0))
        width2 = float(c.get("width2", 16.0))
        u0 = float(c.get("velocity", 0.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad custom scenario value: {exc}") from exc

    if profile == "uniform":
        level = mass / (x_right - x_left)

        def rho0(x):
            return np.full_like(np.asarray(x, dtype=float), level)
    elif profile == "gaussian":
        norm = math.sqrt(math.pi * width2)

        def rho0(x):
            return mass * np.exp(-((x - center) ** 2) / width2) / norm
    else:
        raise ConfigError("ic profile must be gaussian or uniform")

    def mom0(x):
        return u0 * rho0(x)

    model = ModelSpec(law=PressureLaw(m, c_p), potential=potential, kernel=kernel,
                      damping=DampingSpec(damping_kind, gamma=gamma))
    return RunSetup(
        name="custom", description="user-defined scenario",
        x_left=x_left, x_right=x_right, model=model,
        rho0=rho0, mom0=mom0, t_end=1.0, total_mass=mass,
    )


def resolve_runs(cfg: RunConfig) -> list[RunSetup]:
    cfg.validate()
    if cfg.scenario == "custom":
        return [_custom_setup(cfg)]
    return list(get_scenario(cfg.scenario).runs)


def simulate(setup: RunSetup, cfg: RunConfig, out_dir: Path | None = None) -> RunResult:
    """Run one setup to t_end (or blowup/fault), writing artifacts if out_dir is set."""
    n_cells = cfg.n_cells or setup.n_cells
    t_end = cfg.t_end if cfg.t_end is not None else setup.t_end
    snapshot_times = cfg.snapshot_times if cfg.snapshot_times is not None else setup.snapshot_times
    snapshot_times = tuple(t for t in snapshot_times if t <= t_end + _T_EPS)
    rho_factor = cfg.blowup_rho_factor or setup.blowup_rho_factor
    boundary = Boundary(cfg.boundary)

    grid = Grid(n_cells, setup.x_left, setup.x_right, boundary)
    model = setup.model
    ctx = SolverContext(grid, model, cfg.order, cfg.flux, cfg.conv_method)

    rho0 = setup.rho0_steady if cfg.ic == "steady" else setup.rho0
    if rho0 is None:
        raise ConfigError(f"scenario {setup.name} has no steady initial data")
    mom0 = setup.mom0 if cfg.ic == "default" else (lambda x: np.zeros_like(x))
    state = initialize_state(grid, model, rho0, mom0, conv=ctx.conv_w)
    state0 = state.copy()
    rho_threshold = rho_factor * float(np.max(state.rho))

    result = RunResult(setup.name, grid, model, cfg.order, ctx, state0, state, [], [], [])
    result.min_rho = float(np.min(state.rho))
    meter = EnergyMeter(grid, model) if cfg.energy_stride > 0 else None
    writer = _ArtifactWriter(out_dir, grid) if out_dir is not None else None
    if writer is not None:
        result.out_dir = out_dir

    cache = {}

    def eval_of(s):
        if cache.get("arr") is not s.rho:
            rec = ctx.reconstruct(s)
            d, speed = ctx.rhs_with_speed(s, rec)
            cache.update(arr=s.rho, rec=rec, rhs=d, speed=speed)
        return cache

    def rhs_fn(s):
        return eval_of(s)["rhs"]

    def k_fn(s, rho_new):
        old_nodes = eval_of(s)["rec"].vals_rho[:, ctx.points.gauss]
        return s.K + ctx.k_increment(old_nodes, ctx.density_nodes(rho_new))

    def record_energy(s):
        result.peak_times.append(s.t)
        result.peak_rho.append(float(np.max(s.rho)))
        if meter is not None:
            e, f = meter.energies(s)
            result.energy_times.append(s.t)
            result.energy_total.append(e)
            result.energy_free.append(f)

    def snapshot(s):
        if writer is not None:
            writer.snapshot(s, ctx)

    pending = sorted(snapshot_times)
    started = time.perf_counter()
    record_energy(state)
    while pending and pending[0] <= state.t + _T_EPS:
        snapshot(state)
        pending.pop(0)

    try:
        while state.t < t_end - _T_EPS * max(1.0, abs(t_end)):
            dt = compute_dt(ctx, state, cfg.cfl, speed=eval_of(state)["speed"])
            if dt < cfg.dt_min:
                result.blowup = True
                result.blowup_time = state.t
                break
            stop = pending[0] if pending else t_end
            dt = min(dt, stop - state.t, t_end - state.t)
            state = ssp_rk3_step(state, dt, rhs_fn, k_fn, stage_fix=ctx.stage_momentum_fix)
            result.steps += 1
            low = float(np.min(state.rho))
            if low < result.min_rho:
                result.min_rho = low
            if not state.is_finite():
                result.fault = "non-finite state"
                break
            if float(np.max(state.rho)) > rho_threshold:
                result.blowup = True
                result.blowup_time = state.t
                break
            while pending and pending[0] <= state.t + _T_EPS:
                snapshot(state)
                pending.pop(0)
            if cfg.energy_stride > 0 and result.steps % cfg.energy_stride == 0:
                record_energy(state)
    except PositivityError as exc:
        result.fault = str(exc)

    result.state = state
    result.wall_time = time.perf_counter() - started
    if result.energy_times and result.energy_times[-1] != state.t:
        record_energy(state)
    if writer is not None:
        if result.blowup or result.fault:
            writer.snapshot(state, ctx)  # partial artifact at the stopping time
        writer.energies(result)
        writer.manifest(result, cfg, setup, rho_threshold, snapshot_times)
    return result


def run_scenario(cfg: RunConfig) -> list[RunResult]:
    """Run every sub-run of the configured scenario."""
    setups = resolve_runs(cfg)
    base = Path(cfg.out_dir) if cfg.out_dir else None
    results = []
    for setup in setups:
        out = None
        if base is not None:
            out = base if len(setups) == 1 else base / setup.name
        results.append(simulate(setup, cfg, out))
    return results


class _ArtifactWriter:
    def __init__(self, out_dir: Path, grid: Grid):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.grid = grid
        self.index = []

    def snapshot(self, state: FieldState, ctx: SolverContext):
        idx = len(self.index)
        name = f"snap_{idx:02d}.csv"
        h = ctx.h_cell_averages(state)
        x = self.grid.centers()
        with open(self.out_dir / name, "w") as fh:
            fh.write("x,rho,momentum,K,H\n")
            for i in range(self.grid.n_cells):
                fh.write(",".join(_fmt(v) for v in
                                  (x[i], state.rho[i], state.mom[i], state.K[i], h[i])) + "\n")
        self.index.append((idx, name, state.t))
        with open(self.out_dir / "snapshots.csv", "w") as fh:
            fh.write("index,filename,time\n")
            for idx_, name_, t_ in self.index:
                fh.write(f"{idx_},{name_},{_fmt(t_)}\n")

    def energies(self, result: RunResult):
        with open(self.out_dir / "energy.csv", "w") as fh:
            fh.write("time,total_energy,free_energy,kinetic_energy\n")
            for t, e, f in zip(result.energy_times, result.energy_total, result.energy_free):
                fh.write(f"{_fmt(t)},{_fmt(e)},{_fmt(f)},{_fmt(e - f)}\n")

    def manifest(self, result: RunResult, cfg: RunConfig, setup: RunSetup,
                 rho_threshold: float, snapshot_times):
        model = result.model
        lines = [
            "# fvhydro run manifest",
            f"fvhydro_version = {__version__}",
            f"python = {sys.version.split()[0]}",
            f"numpy = {np.__version__}",
            f"kernel_backend = {backend_name()}",
            "",
            f"run_name = {setup.name}",
            f"scenario = {cfg.scenario}",
            f"description = {setup.description}",
            f"order = {result.order}",
            f"n_cells = {result.grid.n_cells}",
            f"x_left = {_fmt(result.grid.x_left)}",
            f"x_right = {_fmt(result.grid.x_right)}",
            f"dx = {_fmt(result.grid.dx)}",
            f"boundary = {result.grid.boundary.value}",
            f"pressure_exponent = {_fmt(model.law.exponent)}",
            f"pressure_scale = {_fmt(model.law.scale)}",
            f"potential = {model.potential.name}",
            f"kernel = {model.kernel.name}",
            f"damping = {model.damping.kind.value}",
            f"gamma = {_fmt(model.damping.gamma)}",
            f"dry_threshold = {_fmt(model.dry_threshold)}",
            f"flux = {result.ctx.flux_kind.value}",
            f"conv_method = {cfg.conv_method}",
            f"ic = {cfg.ic}",
            f"cfl = {_fmt(cfg.cfl)}",
            f"w_min = {_fmt(W_MIN)}",
            f"dt_min = {_fmt(cfg.dt_min)}",
            f"t_end_requested = {_fmt(cfg.t_end if cfg.t_end is not None else setup.t_end)}",
            f"snapshot_times = {','.join(_fmt(t) for t in snapshot_times)}",
            f"energy_stride = {cfg.energy_stride}",
            f"blowup_rho_threshold = {_fmt(rho_threshold)}",
            "",
            f"steps = {result.steps}",
            f"t_final = {_fmt(result.state.t)}",
            f"wall_time_s = {result.wall_time:.3f}",
            f"blowup = {result.blowup}",
            f"blowup_time = {_fmt(result.blowup_time) if result.blowup_time is not None else 'none'}",
            f"fault = {result.fault or 'none'}",
            f"exit_code = {result.exit_code}",
        ]
        for key, val in sorted(cfg.config_echo.items()):
            lines.append(f"config_file.{key} = {val}")
        (self.out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def study_wellbalance(sid: str, orders=(3, 5), n_cells: int = 50, t_end: float = 5.0,
                      out_dir: Path | None = None, include_control: bool = True):
    """Steady-state preservation study: L1 residual after evolving to t_end."""
    rows = []
    for order in orders:
        cfg = RunConfig(scenario=sid, order=order, n_cells=n_cells, t_end=t_end,
                        ic="steady", energy_stride=0)
        res = simulate(resolve_runs(cfg)[0], cfg)
        residual = wellbalance_residual(res.state0, res.state, res.grid)
        rows.append((sid, order, n_cells, t_end, residual,
                     "PASS" if residual <= WELLBALANCE_TOL else "FAIL"))
    if include_control:
        cfg = RunConfig(scenario=sid, order=orders[0], n_cells=n_cells, t_end=min(t_end, 1.0),
                        ic="default", energy_stride=0)
        res = simulate(resolve_runs(cfg)[0], cfg)
        residual = wellbalance_residual(res.state0, res.state, res.grid)
        rows.append((f"{sid}-perturbed-control", orders[0], n_cells, min(t_end, 1.0), residual,
                     "PASS" if residual <= WELLBALANCE_TOL else "FAIL"))
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "wellbalance.csv", "w") as fh:
            fh.write("scenario,order,n_cells,t_end,l1_residual,status\n")
            for sid_, order, n, t, r, status in rows:
                fh.write(f"{sid_},{order},{n},{_fmt(t)},{_fmt(r)},{status}\n")
    return rows


def study_convergence(sid: str, order: int = 3, cells=(50, 100, 200, 400),
                      ref_cells: int = 6400, t_end: float = 0.1,
                      out_dir: Path | None = None) -> ConvergenceTable:
    """Grid-refinement study against a fine self-reference at the same order."""
    if len(resolve_runs(RunConfig(scenario=sid))) != 1:
        raise ConfigError("convergence study needs a single-run scenario")

    def run_at(n):
        cfg = RunConfig(scenario=sid, order=order, n_cells=n, t_end=t_end, energy_stride=0)
        return simulate(resolve_runs(cfg)[0], cfg)

    ref = run_at(ref_cells)
    table = ConvergenceTable()
    for n in cells:
        res = run_at(n)
        table.add(n, l1_error(res.state.rho, res.grid, ref.state.rho, ref.grid))
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "convergence.csv", "w") as fh:
            fh.write("n_cells,l1_error,observed_order\n")
            for n, err, order_ in table.rows():
                order_s = "-" if math.isnan(order_) else f"{order_:.2f}"
                fh.write(f"{n},{_fmt(err)},{order_s}\n")
    return table
