"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--cells 200 800] [--repeat 200]

The same comparison can be forced on a whole simulation with
FVHYDRO_NO_NUMBA=1 (see README).
"""

import argparse
import time

import numpy as np

from fvhydro import _cweno_np
from fvhydro.core import FieldState, Grid, ModelSpec
from fvhydro.freeenergy import PressureLaw, make_potential
from fvhydro.kernels import backend_name
from fvhydro.scheme import SolverContext


def timeit(fn, repeat):
    fn()  # warm (JIT) before timing
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat


def bench_cweno(n, repeat):
    rng = np.random.default_rng(7)
    gpad = rng.normal(size=n + 4)
    offsets = np.linspace(-0.5, 0.5, 7) * 0.1
    avgs = np.abs(gpad[2:-2])
    rows = []
    for order in (3, 5):
        t_np = timeit(lambda: _cweno_np.reconstruct_eval(gpad, 0.1, order, offsets, True, avgs),
                      repeat)
        try:
            from fvhydro import _cweno_nb
            t_nb = timeit(lambda: _cweno_nb.reconstruct_eval(gpad, 0.1, order, offsets, True, avgs),
                          repeat)
        except ImportError:
            t_nb = float("nan")
        rows.append((f"reconstruct_eval order={order}", t_np, t_nb))
    return rows


def bench_rhs(n, repeat):
    grid = Grid(n, -5.0, 5.0)
    model = ModelSpec(law=PressureLaw(2.0, 1.0), potential=make_potential("quadratic"))
    ctx = SolverContext(grid, model, 3, flux="kinetic")
    rng = np.random.default_rng(11)
    rho = rng.uniform(0.1, 1.0, size=n)
    state = FieldState(rho, 0.1 * rho, rng.uniform(-1, 1, size=n), 0.0)
    rec = ctx.reconstruct(state)

    def fast():
        ctx.rhs_with_speed(state, rec)

    def slow():
        ctx._fast = False
        try:
            ctx.rhs_with_speed(state, rec)
        finally:
            ctx._fast = True

    rows = [("rhs face sweep (numpy comp.)", timeit(slow, repeat),
             timeit(fast, repeat) if ctx._fast or backend_name() == "numba" else float("nan"))]
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cells", type=int, nargs="+", default=[200, 800])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    print(f"active backend: {backend_name()}")
    print(f"{'kernel':36s} {'cells':>6s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for n in args.cells:
        for name, t_np, t_nb in bench_cweno(n, args.repeat) + bench_rhs(n, args.repeat):
            ratio = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
            print(f"{name:36s} {n:6d} {t_np * 1e6:12.1f} {t_nb * 1e6:12.1f} {ratio:8.1f}")


if __name__ == "__main__":
    main()
