"""Benchmark the compiled backend against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [N ...]

Times the two hot kernels (trade inflow, geometry sweep) and a short
end-to-end run at each system size, on every available backend, and
verifies the backends produce bit-identical results while at it.
"""

import sys
import time

import numpy as np

from wealthnet import SimConfig, backend, geometry_sweep, run_simulation
from wealthnet.graph import sample_erdos_renyi
from wealthnet.state import WealthState, wealth_update_sweep


def _time(fn, min_seconds=0.3):
    """Best-of-repeats wall time for fn()."""
    best = float("inf")
    elapsed = 0.0
    while elapsed < min_seconds:
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = min(best, dt)
        elapsed += dt
    return best


def bench_size(n, seed=7):
    rng = np.random.default_rng(seed)
    g = sample_erdos_renyi(n, 4.0, rng)
    w = rng.random(n) + 0.5
    w *= n / w.sum()
    state = WealthState.from_values(w)

    rows = {}
    checks = {}
    for name in backend.available():
        prev = backend.use(name)
        try:
            sweep_rng = np.random.default_rng(seed + 1)
            t_wealth = _time(
                lambda: wealth_update_sweep(state, g, 5e-6, 0.0316, sweep_rng)
            )
            t_geom = _time(
                lambda: geometry_sweep(g, w, 0.002, 0.1, np.random.default_rng(seed + 2))
            )
            cfg = SimConfig(
                n_agents=n,
                total_geometry_sweeps=5,
                burn_in_geometry_sweeps=1,
                seed=seed,
            )
            t0 = time.perf_counter()
            out = run_simulation(cfg)
            t_run = (time.perf_counter() - t0) / 5
            rows[name] = (t_wealth, t_geom, t_run)
            checks[name] = (
                geometry_sweep(g, w, 0.002, 0.1, np.random.default_rng(9)).edge_keys(),
                out.final_weights,
            )
        finally:
            backend.use(prev)

    names = list(rows)
    if len(names) == 2:
        a, b = (checks[k] for k in names)
        assert np.array_equal(a[0], b[0]), "geometry results diverge across backends"
        assert np.array_equal(a[1], b[1]), "run results diverge across backends"

    print(f"\nN = {n} (edges = {g.num_edges})")
    print(f"  {'backend':<10} {'wealth sweep':>14} {'geometry sweep':>16} {'outer step':>12}")
    for name, (tw, tg, tr) in rows.items():
        print(f"  {name:<10} {tw * 1e3:>11.3f} ms {tg * 1e3:>13.2f} ms {tr * 1e3:>9.1f} ms")
    if len(names) == 2 and all(rows[names[0]]):
        fast, slow = rows[names[0]], rows[names[1]]
        print(
            f"  speedup ({names[0]} over {names[1]}): "
            f"wealth x{slow[0] / fast[0]:.1f}, geometry x{slow[1] / fast[1]:.1f}, "
            f"outer x{slow[2] / fast[2]:.1f}"
        )


def main(argv):
    sizes = [int(a) for a in argv] or [300, 1000, 3000]
    print(f"backends: {', '.join(backend.available())}")
    for n in sizes:
        bench_size(n)


if __name__ == "__main__":
    main(sys.argv[1:])
