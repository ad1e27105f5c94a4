"""Command-line interface: run, convergence, wellbalance, list-scenarios."""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .driver import (
    EXIT_BAD_CONFIG,
    ConfigError,
    RunConfig,
    run_scenario,
    study_convergence,
    study_wellbalance,
)
from .scenarios import get_scenario, scenario_ids


def _parse_times(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(tok) for tok in text.split(","))


def load_config_file(path: str) -> RunConfig:
    """Declarative key=value config (INI sections: run, model, domain, ic)."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg = RunConfig()
    echo = {}
    run = parser["run"] if parser.has_section("run") else {}
    for key in run:
        echo[f"run.{key}"] = run[key]
    try:
        cfg.scenario = run.get("scenario", cfg.scenario)
        cfg.order = int(run.get("order", cfg.order))
        if "cells" in run:
            cfg.n_cells = int(run["cells"])
        if "t_end" in run:
            cfg.t_end = float(run["t_end"])
        cfg.cfl = float(run.get("cfl", cfg.cfl))
        cfg.dt_min = float(run.get("dt_min", cfg.dt_min))
        cfg.flux = run.get("flux", cfg.flux)
        cfg.ic = run.get("ic", cfg.ic)
        if "out" in run:
            cfg.out_dir = run["out"]
        if "snapshots" in run:
            cfg.snapshot_times = _parse_times(run["snapshots"])
        cfg.energy_stride = int(run.get("energy_stride", cfg.energy_stride))
        if "blowup_rho_factor" in run:
            cfg.blowup_rho_factor = float(run["blowup_rho_factor"])
        cfg.conv_method = run.get("conv_method", cfg.conv_method)
        cfg.boundary = run.get("boundary", cfg.boundary)
    except ValueError as exc:
        raise ConfigError(f"bad value in [run]: {exc}") from exc
    for section in ("model", "domain", "ic"):
        if parser.has_section(section):
            for key, val in parser[section].items():
                cfg.custom[key] = val
                echo[f"{section}.{key}"] = val
    cfg.config_echo = echo
    return cfg


def _apply_cli_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "scenario", None):
        cfg.scenario = args.scenario
    if getattr(args, "order", None):
        cfg.order = args.order
    if getattr(args, "cells", None):
        cfg.n_cells = args.cells
    if getattr(args, "t_end", None) is not None:
        cfg.t_end = args.t_end
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    if getattr(args, "flux", None):
        cfg.flux = args.flux
    if getattr(args, "ic", None):
        cfg.ic = args.ic
    return cfg


def _add_common(sub):
    sub.add_argument("--config", help="declarative config file (key = value sections)")
    sub.add_argument("--scenario", help="built-in scenario id or 'custom'")
    sub.add_argument("--order", type=int, choices=(1, 3, 5))
    sub.add_argument("--cells", type=int, metavar="N")
    sub.add_argument("--t-end", dest="t_end", type=float, metavar="T")
    sub.add_argument("--out", metavar="DIR")
    sub.add_argument("--flux", choices=("llf", "kinetic", "auto"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvhydro",
        description="Well-balanced finite-volume solver for 1D hydrodynamics "
                    "with nonlocal free energies.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run one scenario")
    _add_common(run)
    run.add_argument("--ic", choices=("default", "steady"))

    conv = subs.add_parser("convergence", help="grid-refinement accuracy study")
    _add_common(conv)
    conv.add_argument("--cells-list", default="50,100,200,400",
                      help="comma-separated coarse grids")
    conv.add_argument("--ref-cells", type=int, default=6400)

    wb = subs.add_parser("wellbalance", help="steady-state preservation study")
    _add_common(wb)
    wb.add_argument("--orders", default="3,5", help="comma-separated orders")

    subs.add_parser("list-scenarios", help="list built-in scenarios")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for sid in scenario_ids():
            print(f"{sid:8s} {get_scenario(sid).description}")
        return 0

    try:
        cfg = load_config_file(args.config) if args.config else RunConfig()
        cfg = _apply_cli_overrides(cfg, args)
        cfg.validate()

        if args.command == "run":
            results = run_scenario(cfg)
            for res in results:
                status = "blowup" if res.blowup else (res.fault or "ok")
                where = f" -> {res.out_dir}" if res.out_dir else ""
                print(f"{res.name}: t={res.state.t:.6g} steps={res.steps} [{status}]{where}")
            return max(res.exit_code for res in results)

        if args.command == "convergence":
            cells = tuple(int(tok) for tok in args.cells_list.split(","))
            out = Path(cfg.out_dir) if cfg.out_dir else None
            table = study_convergence(cfg.scenario, order=cfg.order, cells=cells,
                                      ref_cells=args.ref_cells,
                                      t_end=cfg.t_end if cfg.t_end is not None else 0.1,
                                      out_dir=out)
            print(f"{'cells':>8s} {'L1 error':>14s} {'order':>7s}")
            for n, err, order in table.rows():
                order_s = "-" if order != order else f"{order:.2f}"
                print(f"{n:8d} {err:14.4e} {order_s:>7s}")
            return 0

        if args.command == "wellbalance":
            orders = tuple(int(tok) for tok in args.orders.split(","))
            out = Path(cfg.out_dir) if cfg.out_dir else None
            rows = study_wellbalance(cfg.scenario, orders=orders,
                                     n_cells=cfg.n_cells or 50,
                                     t_end=cfg.t_end if cfg.t_end is not None else 5.0,
                                     out_dir=out)
            for sid, order, n, t, residual, status in rows:
                print(f"{sid:24s} order={order} cells={n} t={t:g} "
                      f"L1 residual={residual:.3e} [{status}]")
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
