"""Built-in scenario catalog.

Each scenario fixes the domain, pressure law, potentials, damping and initial
profiles of one reference experiment; families (ex34, ex35c) expand into
several sub-runs sharing the grid.

Initial densities are normalized over the computational domain (not the whole
line) so the discrete total mass equals the nominal one to quadrature
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from .core import DampingKind, DampingSpec, ModelSpec
from .freeenergy import PressureLaw, make_kernel, make_potential



def _domain_norm(profile, x_left: float, x_right: float) -> float:
    val, _ = quad(profile, x_left, x_right, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class RunSetup:
    """One concrete simulation: model + domain + initial data + defaults."""

    name: str
    description: str
    x_left: float
    x_right: float
    model: ModelSpec
    rho0: object = field(compare=False)
    mom0: object = field(compare=False)
    rho0_steady: object = field(default=None, compare=False)
    t_end: float = 10.0
    n_cells: int = 200
    snapshot_times: tuple = ()
    blowup_rho_factor: float = 1e3
    total_mass: float = 1.0

    def steady_available(self) -> bool:
        return self.rho0_steady is not None


@dataclass(frozen=True)
class Scenario:
    sid: str
    description: str
    runs: tuple


def _gaussian_steady(mass: float, x_left: float, x_right: float):
    norm = _domain_norm(lambda x: math.exp(-0.5 * x * x), x_left, x_right)

    def rho0(x):
        return mass * np.exp(-0.5 * x * x) / norm

    return rho0


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _ex31() -> Scenario:
    profile = lambda x: math.exp(-0.5 * x * x) + 0.1 * math.exp(-5.0 * (x + 3.0) ** 2)
    norm = _domain_norm(profile, -5.0, 5.0)

    def rho0(x):
        return (np.exp(-0.5 * x * x) + 0.1 * np.exp(-5.0 * (x + 3.0) ** 2)) / norm

    model = ModelSpec(
        law=PressureLaw(1.0, 1.0),
        potential=make_potential("quadratic"),
        damping=DampingSpec(DampingKind.LINEAR, gamma=1.0),
    )
    run = RunSetup(
        name="ex31",
        description="isothermal gas in a quadratic confining potential",
        x_left=-5.0, x_right=5.0, model=model,
        rho0=rho0, mom0=_zero, rho0_steady=_gaussian_steady(1.0, -5.0, 5.0),
        t_end=12.0, snapshot_times=(0.0, 0.5, 2.0, 12.0),
    )
    return Scenario("ex31", run.description, (run,))


def _ex32() -> Scenario:
    profile = lambda x: (math.exp(-0.5 * x * x)
                         + 0.05 * math.exp(-5.0 * (x + 3.0) ** 2)
                         + 0.05 * math.exp(-5.0 * (x - 3.0) ** 2))
    norm = _domain_norm(profile, -10.0, 10.0)

    def rho0(x):
        return (np.exp(-0.5 * x * x)
                + 0.05 * np.exp(-5.0 * (x + 3.0) ** 2)
                + 0.05 * np.exp(-5.0 * (x - 3.0) ** 2)) / norm

    model = ModelSpec(
        law=PressureLaw(1.0, 1.0),
        kernel=make_kernel("quadratic"),
        damping=DampingSpec(DampingKind.LINEAR, gamma=1.0),
    )
    run = RunSetup(
        name="ex32",
        description="isothermal gas with quadratic attractive interaction kernel",
        x_left=-10.0, x_right=10.0, model=model,
        rho0=rho0, mom0=_zero, rho0_steady=_gaussian_steady(1.0, -10.0, 10.0),
        t_end=12.0, snapshot_times=(0.0, 0.5, 2.0, 12.0),
    )
    return Scenario("ex32", run.description, (run,))


def _ex33(which: str) -> Scenario:
    x0 = 0.0 if which == "a" else 1.5
    potential = "quadratic" if which == "a" else "double_well"
    norm = _domain_norm(lambda x: math.exp(-((x - x0) ** 2) / 16.0), -5.0, 5.0)

    def rho0(x):
        return np.exp(-((x - x0) ** 2) / 16.0) / norm

    def mom0(x):
        return -0.1 * np.sin(np.pi * x / 10.0)

    model = ModelSpec(
        law=PressureLaw(2.0, 1.0),
        potential=make_potential(potential),
        damping=DampingSpec(DampingKind.LINEAR, gamma=1.0),
    )
    run = RunSetup(
        name=f"ex33{which}",
        description=f"shallow-water pressure in a {potential.replace('_', ' ')} potential",
        x_left=-5.0, x_right=5.0, model=model,
        rho0=rho0, mom0=mom0,
        t_end=10.0 if which == "a" else 15.0,
        snapshot_times=(0.0, 1.0, 3.0, 10.0) if which == "a" else (0.0, 1.0, 5.0, 15.0),
    )
    return Scenario(run.name, run.description, (run,))


def _ex34() -> Scenario:
    norm_big = _domain_norm(lambda x: math.exp(-0.5 * (x + 1.0) ** 2), -5.0, 14.0)
    norm_small = _domain_norm(lambda x: math.exp(-((x - 11.0) ** 2)), -5.0, 14.0)

    def rho0(x):
        return (0.9 * np.exp(-0.5 * (x + 1.0) ** 2) / norm_big
                + 0.1 * np.exp(-((x - 11.0) ** 2)) / norm_small)

    def mom0(x):
        return np.where(x < 5.0, 2.0, -2.0) * rho0(x)

    base = ModelSpec(
        law=PressureLaw(1.0, 1.0),
        kernel=make_kernel("morse"),
        damping=DampingSpec(DampingKind.LINEAR, gamma=1.0),
    )
    dampings = (
        ("gamma", DampingSpec(DampingKind.LINEAR, gamma=1.0)),
        ("cs", DampingSpec(DampingKind.CUCKER_SMALE)),
        ("mt", DampingSpec(DampingKind.MOTSCH_TADMOR)),
    )
    runs = tuple(
        RunSetup(
            name=f"ex34_{tag}",
            description=f"two opposed agent groups, {tag} damping",
            x_left=-5.0, x_right=14.0,
            model=replace(base, damping=damping),
            rho0=rho0, mom0=mom0,
            t_end=1.0, snapshot_times=(0.0, 0.25, 0.5, 1.0),
        )
        for tag, damping in dampings
    )
    return Scenario("ex34", "damping comparison: linear vs alignment models", runs)


def _ks_rho0(mass: float):
    norm = _domain_norm(lambda x: math.exp(-x * x / 16.0), -8.0, 8.0)

    def rho0(x):
        return mass * np.exp(-x * x / 16.0) / norm

    return rho0


def _ex35(which: str) -> Scenario:
    log_kernel = make_kernel("log")
    damping = DampingSpec(DampingKind.LINEAR, gamma=1.0)
    if which == "a":
        run = RunSetup(
            name="ex35a", description="chemotaxis, subcritical mass (diffusion wins)",
            x_left=-8.0, x_right=8.0,
            model=ModelSpec(law=PressureLaw(1.0, 1.0), kernel=log_kernel, damping=damping),
            rho0=_ks_rho0(0.1), mom0=_zero, t_end=20.0,
            snapshot_times=(0.0, 1.0, 5.0, 20.0), total_mass=0.1,
        )
        return Scenario("ex35a", run.description, (run,))
    if which == "b":
        run = RunSetup(
            name="ex35b", description="chemotaxis, supercritical mass (finite-time blowup)",
            x_left=-8.0, x_right=8.0,
            model=ModelSpec(law=PressureLaw(1.0, 1.0), kernel=log_kernel, damping=damping),
            rho0=_ks_rho0(3.0), mom0=_zero, t_end=10.0,
            snapshot_times=(0.0, 2.0, 5.0, 7.0),
            blowup_rho_factor=40.0, total_mass=3.0,
        )
        return Scenario("ex35b", run.description, (run,))
    runs = tuple(
        RunSetup(
            name=f"ex35c_{tag}",
            description=f"chemotaxis with degenerate pressure {label}",
            x_left=-8.0, x_right=8.0,
            model=ModelSpec(law=law, kernel=log_kernel, damping=damping),
            rho0=_ks_rho0(1.0), mom0=_zero, t_end=t_end,
            snapshot_times=snaps, total_mass=1.0,
        )
        for tag, label, law, t_end, snaps in (
            ("m2", "P = 3 rho^2", PressureLaw(2.0, 3.0), 350.0, (0.0, 25.0, 100.0, 350.0)),
            ("m2p5", "P = 3 rho^2.5", PressureLaw(2.5, 3.0), 450.0, (0.0, 10.0, 100.0, 450.0)),
        )
    )
    return Scenario("ex35c", "chemotaxis with compactly supported steady states", runs)


_BUILDERS = {
    "ex31": _ex31,
    "ex32": _ex32,
    "ex33a": lambda: _ex33("a"),
    "ex33b": lambda: _ex33("b"),
    "ex34": _ex34,
    "ex35a": lambda: _ex35("a"),
    "ex35b": lambda: _ex35("b"),
    "ex35c": lambda: _ex35("c"),
}


def scenario_ids() -> list[str]:
    return sorted(_BUILDERS)


def get_scenario(sid: str) -> Scenario:
    try:
        return _BUILDERS[sid]()
    except KeyError:
        raise ValueError(f"unknown scenario {sid!r}; known: {', '.join(scenario_ids())}") from None
