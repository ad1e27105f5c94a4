"""Acceptance suite: reruns the reference experiments end to end and checks
each criterion at its stated tolerance, printing one line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`.  Expect roughly 10-15
minutes on one core with the numba backend.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from fvhydro.core import FieldState, Grid, ModelSpec, connected_components
from fvhydro.driver import RunConfig, resolve_runs, simulate, study_convergence, study_wellbalance
from fvhydro.freeenergy import PressureLaw, make_potential
from fvhydro.quadrature import gauss_cell_average, richardson_source
from fvhydro.reconstruct import cweno3, cweno5, reconstruct_H
from fvhydro.scheme import SolverContext
from fvhydro.timeint import compute_dt, ssp_rk3_step

WB_TOL = 1e-14
KS_KCONST_TOL = 1e-6


def _ok(name, detail):
    print(f"\nPASS {name}: {detail}")


def _run(sid, index=0, **kw):
    kw.setdefault("order", 3)
    kw.setdefault("n_cells", 200)
    kw.setdefault("energy_stride", 20)
    cfg = RunConfig(scenario=sid, **kw)
    return simulate(resolve_runs(cfg)[index], cfg)


# --------------------------------------------------------------------- #
# shared expensive runs


@pytest.fixture(scope="module")
def ex31_run():
    return _run("ex31")


@pytest.fixture(scope="module")
def ex33a_run():
    return _run("ex33a")


@pytest.fixture(scope="module")
def ex33b_run():
    return _run("ex33b")


@pytest.fixture(scope="module")
def ex34_runs():
    cfg = RunConfig(scenario="ex34", order=3, n_cells=200, energy_stride=0)
    return {setup.name.split("_")[1]: simulate(setup, cfg) for setup in resolve_runs(cfg)}


@pytest.fixture(scope="module")
def ex35c_runs():
    cfg = RunConfig(scenario="ex35c", order=3, n_cells=200, energy_stride=0)
    return {s.name.split("_")[1]: simulate(s, cfg) for s in resolve_runs(cfg)}


# --------------------------------------------------------------------- #
# criterion: steady-state preservation


class TestWellBalance:
    @pytest.mark.parametrize("sid", ["ex31", "ex32"])
    def test_preservation_to_machine_precision(self, sid):
        rows = study_wellbalance(sid, orders=(3, 5), n_cells=50, t_end=5.0,
                                 include_control=False)
        for _, order, _, _, residual, _ in rows:
            assert residual <= WB_TOL, f"{sid} order {order}: residual {residual:.3e}"
        _ok(f"well-balance {sid}",
            "; ".join(f"order {o}: L1 residual {r:.2e}" for _, o, _, _, r, _ in rows))

    def test_perturbed_control_is_detected(self):
        rows = study_wellbalance("ex31", orders=(3,), n_cells=50, t_end=5.0,
                                 include_control=True)
        control = rows[-1]
        assert control[4] > 1e-6
        _ok("well-balance control", f"perturbed residual {control[4]:.2e} correctly flagged")


# --------------------------------------------------------------------- #
# criterion: grid-refinement accuracy


class TestConvergence:
    def test_third_order_scheme(self):
        table = study_convergence("ex31", order=3, cells=(50, 100, 200, 400),
                                  ref_cells=6400, t_end=0.1)
        final = table.orders[-1]
        assert final >= 2.6, f"final observed order {final:.2f}"
        _ok("convergence CWENO3 (ex31)",
            "errors " + ", ".join(f"{e:.2e}" for e in table.errors)
            + f"; final order {final:.2f} >= 2.6")

    def test_fifth_order_scheme(self):
        table = study_convergence("ex32", order=5, cells=(50, 100, 200, 400),
                                  ref_cells=6400, t_end=0.1)
        final = table.orders[-1]
        assert final >= 4.3, f"final observed order {final:.2f}"
        _ok("convergence CWENO5 (ex32)",
            "errors " + ", ".join(f"{e:.2e}" for e in table.errors)
            + f"; final order {final:.2f} >= 4.3")


# --------------------------------------------------------------------- #
# criterion: positivity and steady shapes with vacuum


def steady_shape_error(res, wells):
    """L1 distance to the mass-matched (C - V)+ / 2 profile per well."""
    st, grid = res.state, res.grid
    x = grid.centers()
    v = res.model.potential(x)
    rho_ref = np.zeros_like(x)
    for a, b in wells:
        sel = (x >= a) & (x < b)
        mass = float(st.rho[sel].sum()) * grid.dx
        if mass < 1e-8:
            continue
        vw = v[sel]
        c = brentq(lambda cc: np.sum(np.maximum(cc - vw, 0.0)) / 2 * grid.dx - mass,
                   vw.min() - 1e-9, vw.min() + 50.0, xtol=1e-14)
        rho_ref[sel] = np.maximum(c - vw, 0.0) / 2
    return float(np.sum(np.abs(st.rho - rho_ref))) * grid.dx


class TestVacuumSteadyStates:
    def test_single_well(self, ex33a_run):
        assert not ex33a_run.blowup and ex33a_run.fault is None
        assert ex33a_run.min_rho >= 0.0, f"min density {ex33a_run.min_rho:.2e}"
        err = steady_shape_error(ex33a_run, [(-5.0, 5.0)])
        assert err <= 5e-2, f"steady-shape L1 {err:.3f}"
        drift = abs(ex33a_run.state.mass(ex33a_run.grid)
                    - ex33a_run.state0.mass(ex33a_run.grid))
        assert drift <= 1e-10, f"mass drift {drift:.2e}"
        _ok("shallow water single well (ex33a)",
            f"min rho {ex33a_run.min_rho:.1e} >= 0; shape L1 {err:.2e} <= 5e-2; "
            f"mass drift {drift:.1e}")

    def test_double_well(self, ex33b_run):
        assert not ex33b_run.blowup and ex33b_run.fault is None
        assert ex33b_run.min_rho >= 0.0, f"min density {ex33b_run.min_rho:.2e}"
        err = steady_shape_error(ex33b_run, [(-5.0, 0.0), (0.0, 5.0)])
        assert err <= 5e-2, f"steady-shape L1 {err:.3f}"
        _ok("shallow water double well (ex33b)",
            f"min rho {ex33b_run.min_rho:.1e} >= 0; shape L1 {err:.2e} <= 5e-2")


# --------------------------------------------------------------------- #
# criterion: energy decay


class TestEnergyDecay:
    def test_total_energy_nonincreasing(self, ex31_run):
        e = np.array(ex31_run.energy_total)
        worst = float(np.diff(e).max())
        assert worst <= 1e-8, f"total energy increased by {worst:.2e}"
        # the stated numeric slack binds the total energy; the free energy has
        # no visible transient rise here (unlike ex33a, where it rises by
        # ~3e-2), so hold it to a plot-scale slack
        f = np.array(ex31_run.energy_free)
        worst_f = float(np.diff(f).max())
        assert worst_f <= 1e-6, f"free energy increased by {worst_f:.2e}"
        _ok("energy decay (ex31)",
            f"max total-energy increment {worst:.1e}; free-energy {worst_f:.1e}")

    def test_free_energy_transient_exchange_single_well(self, ex33a_run):
        e = np.array(ex33a_run.energy_total)
        f = np.array(ex33a_run.energy_free)
        assert float(np.diff(e).max()) <= 1e-8
        assert float(np.diff(f).max()) > 1e-3  # kinetic/free exchange happens here
        _ok("energy decay (ex33a)",
            f"total decays (max inc {np.diff(e).max():.1e}); free energy has the "
            f"expected transient rise ({np.diff(f).max():.2e})")


# --------------------------------------------------------------------- #
# criterion: damping comparison


class TestDampingComparison:
    def test_alignment_and_dissipation(self, ex34_runs):
        mean_u = {}
        kinetic = {}
        for tag, res in ex34_runs.items():
            st, grid = res.state, res.grid
            grp = grid.centers() > 5.0
            mean_u[tag] = float(np.sum(st.mom[grp]) / np.sum(st.rho[grp]))
            u = np.where(st.rho > 1e-10, st.mom / np.maximum(st.rho, 1e-10), 0.0)
            kinetic[tag] = 0.5 * grid.dx * float(np.sum(st.rho * u * u))
        assert mean_u["mt"] > 0.0, f"MT mean velocity {mean_u['mt']:.3f}"
        assert mean_u["cs"] < 0.0, f"CS mean velocity {mean_u['cs']:.3f}"
        assert kinetic["gamma"] < kinetic["cs"] and kinetic["gamma"] < kinetic["mt"]
        _ok("damping comparison (ex34)",
            f"small-group mean u: MT {mean_u['mt']:+.3f}, CS {mean_u['cs']:+.3f}; "
            f"kinetic energies gamma/CS/MT = {kinetic['gamma']:.3f}/"
            f"{kinetic['cs']:.3f}/{kinetic['mt']:.3f}")


# --------------------------------------------------------------------- #
# criterion: chemotaxis regimes


class TestChemotaxisRegimes:
    def test_subcritical_mass_diffuses(self):
        res = _run("ex35a")
        assert not res.blowup and res.fault is None
        peaks = np.array(res.peak_rho)
        times = np.array(res.peak_times)
        late = peaks[times >= 1.0]
        assert late[-1] < late[0], "peak density did not decrease after transients"
        assert np.all(np.diff(late) <= 1e-12)
        _ok("chemotaxis subcritical (ex35a)",
            f"no blowup through t=20; peak density {peaks[0]:.3e} -> {peaks[-1]:.3e}")

    def test_supercritical_mass_blows_up_in_window(self):
        res = _run("ex35b", energy_stride=0)
        assert res.blowup, "blowup flag not raised"
        assert 6.5 <= res.blowup_time <= 8.5, f"blowup at t={res.blowup_time:.2f}"
        _ok("chemotaxis supercritical (ex35b)",
            f"blowup flagged at t={res.blowup_time:.2f} in [6.5, 8.5]")

    @staticmethod
    def _main_component_k_spread(res):
        st, grid = res.state, res.grid
        comps = [c for c in connected_components(st.rho, 1e-3 * st.rho.max(), periodic=True)
                 if len(c) >= 10]
        main = max(comps, key=len)
        inner = main[2:-2]
        spread = float(st.K[inner].max() - st.K[inner].min())
        stray = float(st.mass(grid) - st.rho[main].sum() * grid.dx)
        compact = len(main) < grid.n_cells and st.rho.min() < 1e-6 * st.rho.max()
        return spread, stray, compact

    def test_compact_steady_quadratic_pressure(self, ex35c_runs):
        spread, stray, compact = self._main_component_k_spread(ex35c_runs["m2"])
        assert compact, "profile is not compactly supported"
        assert spread <= KS_KCONST_TOL, f"K spread on support {spread:.2e}"
        _ok("chemotaxis compact steady, P = 3 rho^2",
            f"K spread on support {spread:.2e} <= 1e-6; stray mass {stray:.1e}")

    def test_compact_steady_superquadratic_pressure(self, ex35c_runs):
        # Known limitation at this resolution: the contraction sheds faint
        # satellite puddles (about 0.1% of the mass) that drain extremely
        # slowly through the degenerate vacuum fronts, holding the main
        # support in a quasi-static state with a K spread of a few 1e-6.
        # See the decisions ledger for the parameter study.
        spread, stray, compact = self._main_component_k_spread(ex35c_runs["m2p5"])
        assert compact, "profile is not compactly supported"
        assert spread <= KS_KCONST_TOL, (
            f"K spread on support {spread:.2e} > 1e-6 (satellite debris holds the "
            f"support slightly out of equilibrium; stray mass {stray:.1e})")
        _ok("chemotaxis compact steady, P = 3 rho^2.5",
            f"K spread on support {spread:.2e} <= 1e-6; stray mass {stray:.1e}")


# --------------------------------------------------------------------- #
# criterion: property suites (self-contained, no artifacts needed)


class TestPropertySuites:
    def test_gauss_degree_five_exactness(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(100):
            coeffs = rng.uniform(-1, 1, size=6)
            poly = np.polynomial.Polynomial(coeffs)
            center, dx = rng.uniform(-2, 2), rng.uniform(0.05, 1.0)
            exact = (poly.integ()(center + dx / 2) - poly.integ()(center - dx / 2)) / dx
            err = abs(gauss_cell_average(poly, center, dx) - exact) / max(1.0, abs(exact))
            worst = max(worst, err)
        assert worst <= 1e-12
        _ok("gauss degree-5 exactness", f"worst relative error {worst:.1e} <= 1e-12")

    @pytest.mark.parametrize("order,min_slope", [(4, 3.8), (6, 5.5)])
    def test_richardson_slopes(self, order, min_slope):
        from scipy.integrate import quad

        r_rho = lambda x: 1.0 + math.sin(x)
        r_h = lambda x: math.cos(x)
        errs = []
        for dx in (0.8, 0.4, 0.2, 0.1):
            exact = quad(lambda x: r_rho(x) * (-math.sin(x)), 0.3, 0.3 + dx,
                         epsabs=1e-16, epsrel=1e-14)[0]
            errs.append(abs(richardson_source(order, r_rho, r_h, lambda x: 0.0, 0.3, dx) - exact))
        slope = math.log2(errs[0] / errs[-1]) / 3
        assert slope >= min_slope
        _ok(f"richardson order-{order} slope", f"{slope:.2f} >= {min_slope}")

    def test_cweno_constant_exactness(self):
        for c in (0.0, 1.0, -3.3e5):
            for fn in (cweno3, cweno5):
                poly = fn(np.full(5, c), dx=0.2)
                xs = np.linspace(-0.1, 0.1, 9)
                assert np.abs(poly(xs) - c).max() <= 1e-14 * max(1.0, abs(c))
        _ok("CWENO constant exactness", "both orders reproduce constants")

    def test_steady_reconstruction_identity(self):
        # discrete steady data: Pi'(R_rho) + R_H recombines to the constant
        rng = np.random.default_rng(5)
        law = PressureLaw(1.0, 1.0)
        worst = 0.0
        for _ in range(50):
            c = rng.uniform(-1, 1)
            stencil = rng.uniform(0.5, 2.0, size=5)
            for fn in (cweno3, cweno5):
                r_rho = fn(stencil, dx=0.2)
                r_k = fn(np.full(5, c), dx=0.2)
                r_h = reconstruct_H(r_k, r_rho, law)
                xs = np.linspace(-0.1, 0.1, 9)
                worst = max(worst, float(np.abs(law.pi_prime(r_rho(xs)) + r_h(xs) - c).max()))
        assert worst <= 5e-13
        _ok("steady reconstruction identity", f"worst deviation {worst:.1e} <= 5e-13")

    def test_flux_consistency(self):
        from fvhydro.flux import kinetic_flux, llf_flux

        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            rho = rng.uniform(0.05, 3.0)
            mom = rho * rng.uniform(-2, 2)
            law_l = PressureLaw(1.0, rng.uniform(0.5, 2.0))
            f = llf_flux((rho, mom), (rho, mom), law_l)
            exact = np.array([mom, mom * mom / rho + float(law_l.pressure(rho))])
            worst = max(worst, np.abs(f - exact).max() / max(1.0, np.abs(exact).max()))
            law_k = PressureLaw(rng.uniform(1.5, 3.0), rng.uniform(0.5, 3.0))
            f = kinetic_flux((rho, mom), (rho, mom), law_k)
            exact = np.array([mom, mom * mom / rho + float(law_k.pressure(rho))])
            worst = max(worst, np.abs(f - exact).max() / max(1.0, np.abs(exact).max()))
        assert worst <= 1e-12
        _ok("flux consistency F(U,U)=F(U)", f"worst relative deviation {worst:.1e}")

    def test_positivity_thousand_trials(self):
        rng = np.random.default_rng(11)
        n = 24
        grid = Grid(n, -2.0, 2.0)
        model = ModelSpec(law=PressureLaw(2.0, 1.0), potential=make_potential("quadratic"))
        ctx = SolverContext(grid, model, 3, flux="kinetic")

        def k_fn(s, rho_new):
            return s.K + ctx.k_increment(ctx.density_nodes(s.rho), ctx.density_nodes(rho_new))

        for _ in range(1000):
            rho = rng.uniform(0.0, 2.0, size=n)
            rho[rng.uniform(size=n) < 0.3] = 0.0
            state = FieldState(rho, rho * rng.uniform(-2, 2, size=n),
                               rng.uniform(-1, 1, size=n), 0.0)
            out = ssp_rk3_step(state, compute_dt(ctx, state), lambda s: ctx.rhs(s), k_fn,
                               stage_fix=ctx.stage_momentum_fix)
            assert out.rho.min() >= 0.0
        _ok("positivity under computed CFL", "1000 randomized RK3 steps kept rho >= 0")

    def test_k_invariance_on_steady_states_exact(self):
        rng = np.random.default_rng(13)
        grid = Grid(40, -3.0, 3.0)
        model = ModelSpec(law=PressureLaw(1.0, 1.0), potential=make_potential("quadratic"))
        for order in (1, 3, 5):
            ctx = SolverContext(grid, model, order)
            state = FieldState(rng.uniform(0.3, 1.5, size=40), np.zeros(40),
                               np.full(40, 0.17), 0.0)

            def k_fn(s, rho_new):
                return s.K + ctx.k_increment(ctx.density_nodes(s.rho),
                                             ctx.density_nodes(rho_new))

            out = ssp_rk3_step(state, compute_dt(ctx, state), lambda s: ctx.rhs(s), k_fn,
                               stage_fix=ctx.stage_momentum_fix)
            assert np.array_equal(out.K, state.K)
            assert np.array_equal(out.rho, state.rho)
        _ok("K-invariance on steady states", "bitwise equality after a full RK3 step")
