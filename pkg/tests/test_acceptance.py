"""End-to-end acceptance runs for the simulator's published behaviors.

One test per published steady-state claim; each prints a single
``ACCEPTANCE <k> PASS/FAIL`` line (run with ``-s`` to stream them while
the runs cook).  The module is marked ``slow`` -- the full set takes
tens of minutes on one core.  The N=10^4 size-stability leg is gated
behind ``WEALTHNET_RUN_EXTENDED=1`` on top of that.

Every protocol here (seed, budget, fit window) was frozen from pilot
runs, so each number is a deterministic replay: the asserts are exact
re-checks, not statistical gambles.
"""

import math
import os
import time

import numpy as np
import pytest

from wealthnet.config import SimConfig
from wealthnet.dynamics import link_add_probability, run_simulation
from wealthnet.ensemble import ensemble_run, mix_seed, parameter_scan
from wealthnet.graph import Graph, stationary_link_probability
from wealthnet.observables import (
    fit_power_law_tail,
    inverse_participation_ratio,
    log_histogram,
    pearson_correlation,
)
from wealthnet.output import write_run_output
from wealthnet.state import WealthState, wealth_update_sweep

pytestmark = pytest.mark.slow

RUN_EXTENDED = os.environ.get("WEALTHNET_RUN_EXTENDED", "") == "1"


def _report(criterion, ok, detail):
    line = f"ACCEPTANCE {criterion} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line, flush=True)
    assert ok, line


def _fit(histogram, lo, hi):
    return fit_power_law_tail(histogram, lo, hi)


# ----------------------------------------------------------------------
# Shared runs (module-scoped: several criteria read the same trajectory)
# ----------------------------------------------------------------------

QUENCHED_TOPOLOGIES = ("erdos_renyi", "regular", "scale_free")

# Frozen protocol for the quenched-network slope family (criteria 2-3).
C2_TOTAL = 9000
C2_BURN = 3000
C2_SEED = 21
C2_WINDOW = (0.5, 50.0)


@pytest.fixture(scope="module")
def quenched_runs():
    """Six quenched-network runs: three topologies, with and without floor."""
    runs = {}
    for topology in QUENCHED_TOPOLOGIES:
        for w_min in (0.0, 0.01):
            cfg = SimConfig(
                n_agents=1000,
                mode="quenched_network",
                graph_topology=topology,
                graph_mean_degree=4.0,
                graph_tail_exponent=1.5,
                j_phys=0.005,
                w_min=w_min,
                total_geometry_sweeps=C2_TOTAL,
                burn_in_geometry_sweeps=C2_BURN,
                seed=C2_SEED,
            )
            runs[topology, w_min] = run_simulation(cfg)
    return runs


# Frozen protocol for the adaptive steady state (criteria 7, 11).
C7_TOTAL = 12000
C7_BURN = 3000
C7_SEED = 41
C7_WEALTH_WINDOW = (0.05, 10.0)
ADAPTIVE_DEGREE_WINDOW = (1.0, 30.0)


@pytest.fixture(scope="module")
def adaptive_runs():
    """Adaptive runs at the two ends of the beta band, floor on."""
    runs = {}
    for beta in (0.02, 0.12):
        cfg = SimConfig(
            n_agents=1000,
            mode="adaptive",
            j_phys=0.005,
            w_min=0.01,
            a_add=beta * 0.1,
            r_remove=0.1,
            total_geometry_sweeps=C7_TOTAL,
            burn_in_geometry_sweeps=C7_BURN,
            seed=C7_SEED,
        )
        runs[beta] = run_simulation(cfg)
    return runs


# ----------------------------------------------------------------------
# 1. Complete-graph wealth-tail exponent
# ----------------------------------------------------------------------


def test_01_complete_graph_exponent():
    cfg = SimConfig(
        n_agents=300,
        mode="quenched_network",
        graph_topology="complete",
        j_phys=0.5,
        sigma_phys=1.0,
        epsilon=0.001,
        w_min=0.0,
        total_geometry_sweeps=7000,
        burn_in_geometry_sweeps=2000,
        seed=12,
    )
    # 5000 recorded outer steps x 100 wealth sweeps each = 5x10^5 sweeps.
    assert (cfg.total_geometry_sweeps - cfg.burn_in_geometry_sweeps) * 100 >= 500_000
    t0 = time.perf_counter()
    out = run_simulation(cfg)
    elapsed = time.perf_counter() - t0
    fit = _fit(out.final_wealth_histogram, 0.5, 20.0)
    ok = abs(fit.slope - 2.50) <= 0.20 and elapsed < 600.0
    _report(
        1,
        ok,
        f"complete graph K300 J/sigma^2=0.5: wealth tail exponent "
        f"{fit.slope:.3f} (want 2.50 +- 0.20) in {elapsed:.0f}s",
    )


# ----------------------------------------------------------------------
# 2. Quenched-network slopes across topologies, with and without floor
# ----------------------------------------------------------------------


def test_02_quenched_network_slopes(quenched_runs):
    lo, hi = C2_WINDOW
    bands = {0.0: (1.40, 1.52), 0.01: (1.64, 1.74)}
    details = []
    ok = True
    for (topology, w_min), out in sorted(quenched_runs.items()):
        fit = _fit(out.final_wealth_histogram, lo, hi)
        band = bands[w_min]
        inside = band[0] <= fit.slope <= band[1]
        ok = ok and inside
        details.append(
            f"{topology}/wmin={w_min}: {fit.slope:.3f} in [{band[0]}, {band[1]}]"
        )
    _report(2, ok, "; ".join(details))


# ----------------------------------------------------------------------
# 3. Poverty condensation without a floor
# ----------------------------------------------------------------------


def test_03_poverty_mass(quenched_runs):
    out = quenched_runs["erdos_renyi", 0.0]
    mass = out.final_wealth_histogram.mass_below(0.01)
    ok = abs(mass - 0.80) <= 0.05
    _report(
        3,
        ok,
        f"no-floor fraction below w=0.01: {mass:.3f} (want 0.80 +- 0.05)",
    )


# ----------------------------------------------------------------------
# 4. Single-pair link-occupancy law
# ----------------------------------------------------------------------

C4_STEPS = 10**6
C4_SEED = 59


def _pair_occupancy(product, steps, seed):
    """Fraction of steps a single pair spends linked.

    One uniform per step, same convention as the geometry kernel:
    a linked pair breaks when u < r, an unlinked one forms when
    u < p_add.
    """
    rng = np.random.default_rng(seed)
    uniforms = rng.random(steps).tolist()
    w = math.sqrt(product)
    p_add = float(link_add_probability(w, w, 0.002))
    linked = False
    occupied = 0
    for u in uniforms:
        if linked:
            if u < 0.1:
                linked = False
        elif u < p_add:
            linked = True
        if linked:
            occupied += 1
    return occupied / steps


def test_04_single_pair_occupancy():
    details = []
    ok = True
    for k, product in enumerate((0.25, 1.0, 4.0)):
        w = math.sqrt(product)
        expected = float(stationary_link_probability(w, w, 0.02, 0.1))
        se = math.sqrt(expected * (1.0 - expected) / C4_STEPS)
        occupancy = _pair_occupancy(product, C4_STEPS, mix_seed(C4_SEED, k))
        z = abs(occupancy - expected) / se
        ok = ok and z <= 3.0
        details.append(f"w_iw_j={product}: occ={occupancy:.6f} p={expected:.6f} |z|={z:.2f}")
    _report(4, ok, "3-SE occupancy match -- " + "; ".join(details))


# ----------------------------------------------------------------------
# 5. Mean-degree law and the link-count bound (frozen weights)
# ----------------------------------------------------------------------


def test_05_mean_degree_law():
    cfg = SimConfig(
        n_agents=1000,
        mode="quenched_wealth",
        weights_tail_exponent=2.5,
        a_add=0.004 * 0.1,  # beta = 4/N with r = 0.1
        r_remove=0.1,
        total_geometry_sweeps=600,
        burn_in_geometry_sweeps=100,
        seed=31,
    )
    out = run_simulation(cfg)
    n = cfg.n_agents
    links = out.links.astype(float)
    mean_degree = 2.0 * links.mean() / n
    bound = cfg.beta * n * (n - 1) / 2.0
    running_mean = np.cumsum(links) / np.arange(1, links.size + 1)
    violations = int((running_mean > bound).sum())
    ok = abs(mean_degree - 4.0) <= 0.4 and violations == 0
    _report(
        5,
        ok,
        f"<q>={mean_degree:.3f} (want 4 +- 0.4); running <L> max "
        f"{running_mean.max():.1f} <= bound {bound:.1f} at all "
        f"{links.size} recorded times ({violations} violations)",
    )


# ----------------------------------------------------------------------
# 6. Degree tail under fat-tailed frozen weights
# ----------------------------------------------------------------------


def test_06_quenched_wealth_degree_tail():
    cfg = SimConfig(
        n_agents=1000,
        mode="quenched_wealth",
        weights_tail_exponent=1.5,
        a_add=0.004 * 0.1,
        r_remove=0.1,
        total_geometry_sweeps=2000,
        burn_in_geometry_sweeps=200,
        seed=32,
    )
    out = run_simulation(cfg)
    fit = _fit(out.final_degree_histogram, 1.0, 20.0)
    ok = abs(fit.slope - 2.5) <= 0.3
    _report(
        6,
        ok,
        f"Pareto(1.5) weights: degree-density exponent {fit.slope:.3f} "
        f"(want 2.5 +- 0.3)",
    )


# ----------------------------------------------------------------------
# 7. Adaptive steady state: wealth slope and rescaled-degree tail
# ----------------------------------------------------------------------


def test_07_adaptive_steady_state(adaptive_runs):
    details = []
    ok = True
    for beta, out in sorted(adaptive_runs.items()):
        wfit = _fit(out.final_wealth_histogram, *C7_WEALTH_WINDOW)
        dfit = _fit(out.final_degree_histogram, *ADAPTIVE_DEGREE_WINDOW)
        inside = (
            abs(wfit.slope - 1.64) <= 0.06
            and abs(dfit.slope - 2.10) <= 0.20
            and dfit.slope >= 2.0
        )
        ok = ok and inside
        details.append(
            f"beta={beta}: 1+mu={wfit.slope:.3f} (1.64 +- 0.06), "
            f"gamma={dfit.slope:.3f} (2.10 +- 0.20, >= 2)"
        )
    _report(7, ok, "; ".join(details))


# ----------------------------------------------------------------------
# 8. Size stability: (N=1000, beta=0.20) and extended (N=10^4, beta=0.02)
# ----------------------------------------------------------------------

C8_WEALTH_WINDOW = (0.1, 20.0)


def test_08_size_stability_n1000():
    cfg = SimConfig(
        n_agents=1000,
        mode="adaptive",
        j_phys=0.005,
        w_min=0.01,
        a_add=0.20 * 0.1,
        r_remove=0.1,
        total_geometry_sweeps=12000,
        burn_in_geometry_sweeps=3000,
        seed=41,
    )
    out = run_simulation(cfg)
    wfit = _fit(out.final_wealth_histogram, *C8_WEALTH_WINDOW)
    dfit = _fit(out.final_degree_histogram, *ADAPTIVE_DEGREE_WINDOW)
    ok = abs(wfit.slope - 1.697) <= 0.06 and abs(dfit.slope - 2.07) <= 0.20
    _report(
        8,
        ok,
        f"N=1000 beta=0.20: 1+mu={wfit.slope:.3f} (1.697 +- 0.06), "
        f"gamma={dfit.slope:.3f} (2.07 +- 0.20)",
    )


@pytest.mark.extended
@pytest.mark.skipif(
    not RUN_EXTENDED, reason="hours-scale N=10^4 run; set WEALTHNET_RUN_EXTENDED=1"
)
def test_08_size_stability_n10000():
    cfg = SimConfig(
        n_agents=10_000,
        mode="adaptive",
        j_phys=0.005,
        w_min=0.01,
        a_add=0.02 * 0.1,
        r_remove=0.1,
        total_geometry_sweeps=3200,
        burn_in_geometry_sweeps=800,
        record_every=10,
        seed=42,
    )
    out = run_simulation(cfg)
    wfit = _fit(out.final_wealth_histogram, *C8_WEALTH_WINDOW)
    dfit = _fit(out.final_degree_histogram, *ADAPTIVE_DEGREE_WINDOW)
    ok = abs(wfit.slope - 1.749) <= 0.06 and abs(dfit.slope - 2.07) <= 0.20
    _report(
        8,
        ok,
        f"N=10^4 beta=0.02 (extended): 1+mu={wfit.slope:.3f} (1.749 +- 0.06), "
        f"gamma={dfit.slope:.3f} (2.07 +- 0.20)",
    )


# ----------------------------------------------------------------------
# 9. Condensation transition under a J-scan
# ----------------------------------------------------------------------

C9_GRID = (0.001, 0.01, 0.1, 0.3, 1.0, 2.0)
C9_REPLICAS = 2
C9_SEED = 61
C9_THRESHOLD = 0.02  # Y2 level defining the transition grid index


def _scan_y2(mode, **extra):
    cfg = SimConfig(
        n_agents=1000,
        mode=mode,
        w_min=0.01,
        a_add=0.002,
        r_remove=0.1,
        total_geometry_sweeps=4000,
        burn_in_geometry_sweeps=1000,
        seed=C9_SEED,
        **extra,
    )
    points = parameter_scan(cfg, "j_phys", C9_GRID, n_replicas=C9_REPLICAS)
    return np.array([res.summary["y2_wealth"][0] for _, res in points])


def _crossing_index(y2_means):
    below = np.nonzero(y2_means < C9_THRESHOLD)[0]
    return int(below[0]) if below.size else len(y2_means)


def test_09_condensation_transition():
    y2_adaptive = _scan_y2("adaptive")
    y2_quenched = _scan_y2(
        "quenched_network", graph_topology="erdos_renyi", graph_mean_degree=4.0
    )
    monotone = bool(np.all(np.diff(y2_adaptive) <= 1e-12))
    ends = y2_adaptive[0] > 0.1 and y2_adaptive[-1] < 5.0 / 1000
    k_a = _crossing_index(y2_adaptive)
    k_q = _crossing_index(y2_quenched)
    ok = monotone and ends and abs(k_a - k_q) <= 1
    _report(
        9,
        ok,
        f"J grid {list(C9_GRID)}: adaptive Y2 {np.array2string(y2_adaptive, precision=4)} "
        f"monotone={monotone}, Y2(0.001)={y2_adaptive[0]:.3f}>0.1, "
        f"Y2({C9_GRID[-1]})={y2_adaptive[-1]:.5f}<0.005; transition index "
        f"adaptive={k_a} vs quenched-ER={k_q}",
    )


# ----------------------------------------------------------------------
# 10. Collapse without a floor
# ----------------------------------------------------------------------


def test_10_collapse_without_floor():
    cfg = SimConfig(
        n_agents=1000,
        mode="adaptive",
        j_phys=0.005,
        w_min=0.0,
        a_add=0.002,
        r_remove=0.1,
        total_geometry_sweeps=8000,
        burn_in_geometry_sweeps=0,
        record_every=100,
        seed=51,
    )
    out = run_simulation(cfg)
    isolated = float((out.final_graph_degrees == 0).mean())
    ok = isolated > 0.95
    _report(
        10,
        ok,
        f"no-floor adaptive run: isolated-node fraction {isolated:.3f} > 0.95 "
        f"after {cfg.total_geometry_sweeps} geometry sweeps",
    )


# ----------------------------------------------------------------------
# 11. Anticorrelation of concentration and link count
# ----------------------------------------------------------------------


def test_11_y2_link_anticorrelation(adaptive_runs):
    out = adaptive_runs[0.02]
    rho = float(pearson_correlation(out.y2_wealth, out.links.astype(float)))
    ok = rho < -0.3
    _report(
        11,
        ok,
        f"steady-state Pearson rho(Y2, L) = {rho:.3f} < -0.3 "
        f"(N=1000, J=0.005, beta=0.02)",
    )


# ----------------------------------------------------------------------
# 12. Always-on property suite (compact re-run of the invariants)
# ----------------------------------------------------------------------


def _check_conservation():
    rng = np.random.default_rng(3)
    n = 200
    g = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    w = rng.random(n) + 0.5
    state = WealthState.from_values(w * (n / w.sum()))
    total = state.wealth.sum()
    for _ in range(20):
        state = wealth_update_sweep(state, g, 0.002, 0.0, rng)
        assert abs(state.wealth.sum() - total) <= 1e-12 * total
    return "conservation at sigma0=0 (1e-12/sweep)"


def _check_scale_invariance():
    n = 100
    g = Graph.from_edges(n, [(i, j) for i in range(0, n - 4, 7) for j in (i + 1, i + 3)])
    base = np.random.default_rng(5).random(n) + 0.5
    lam = 1024.0  # power of two: rescaling is exact in binary floating point
    s1 = WealthState.from_values(base)
    s2 = WealthState.from_values(lam * base)
    r1, r2 = np.random.default_rng(11), np.random.default_rng(11)
    for _ in range(50):
        s1 = wealth_update_sweep(s1, g, 0.003, 0.05, r1)
        s2 = wealth_update_sweep(s2, g, 0.003, 0.05, r2)
    assert np.array_equal(s2.wealth, lam * s1.wealth)
    return "scale invariance (x1024 bit-exact over 50 sweeps)"


def _check_y2_pareto_law():
    rng = np.random.default_rng(17)
    mu = 0.6
    values = []
    for _ in range(400):
        u = 1.0 - rng.random(100_000)
        w = u ** (-1.0 / mu)
        y2 = inverse_participation_ratio(w * (w.size / w.sum()))
        assert 1.0 / w.size <= y2 <= 1.0
        values.append(y2)
    mean = float(np.mean(values))
    assert abs(mean - (1.0 - mu)) <= 0.05
    return f"Y2 bounds and Pareto law (mean {mean:.3f} vs {1 - mu})"


def _check_graph_invariants():
    from wealthnet.dynamics import geometry_sweep

    rng = np.random.default_rng(23)
    n = 40
    g = Graph.from_edges(n, [(i, (i + 5) % n) for i in range(n)])
    w = rng.random(n) + 0.5
    for _ in range(5):
        g = geometry_sweep(g, w, 0.4, 0.2, rng)
        keys = np.asarray(g.edge_keys())
        lo, hi = keys // n, keys % n
        assert np.all(lo < hi)
        assert len(set(keys.tolist())) == keys.size
        recount = np.bincount(np.concatenate([lo, hi]), minlength=n)
        assert np.array_equal(recount, g.degrees)
        assert g.num_edges == keys.size
    return "graph invariants vs brute-force recount (N=40)"


def _check_fit_recovery():
    rng = np.random.default_rng(29)
    u = 1.0 - rng.random(1_000_000)
    w = u ** (-1.0 / 1.5)
    hist = log_histogram(w, 10, 1e-8, 1e4)
    fit = fit_power_law_tail(hist, 1.0, 100.0)
    assert abs(fit.slope - 2.5) <= 2.0 * max(fit.stderr, 0.01)
    return f"synthetic Pareto fit recovery ({fit.slope:.3f} vs 2.5)"


def _check_byte_determinism(tmp_path):
    cfg = SimConfig(
        n_agents=80, total_geometry_sweeps=30, burn_in_geometry_sweeps=5, seed=77
    )
    dirs = []
    for name in ("a", "b"):
        out = run_simulation(cfg)
        target = tmp_path / name
        write_run_output(out, target)
        dirs.append(target)
    for path in sorted(dirs[0].iterdir()):
        twin = dirs[1] / path.name
        assert path.read_bytes() == twin.read_bytes()
    return "end-to-end byte determinism (two identical runs)"


def _check_worker_invariance():
    cfg = SimConfig(
        n_agents=80, total_geometry_sweeps=30, burn_in_geometry_sweeps=5, seed=78
    )
    serial = ensemble_run(cfg, n_replicas=3, workers=1)
    parallel = ensemble_run(cfg, n_replicas=3, workers=3)
    for a, b in zip(serial.replicas, parallel.replicas):
        for field in ("index", "seed", "y2_wealth", "mean_degree"):
            va, vb = getattr(a, field), getattr(b, field)
            assert va == vb or (
                isinstance(va, float) and math.isnan(va) and math.isnan(vb)
            )
    return "worker-count invariance of ensemble aggregates"


def test_12_property_suite(tmp_path):
    checks = [
        _check_conservation(),
        _check_scale_invariance(),
        _check_y2_pareto_law(),
        _check_graph_invariants(),
        _check_fit_recovery(),
        _check_byte_determinism(tmp_path),
        _check_worker_invariance(),
    ]
    _report(12, True, "; ".join(checks))
