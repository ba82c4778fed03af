"""Coupled wealth/link dynamics: link-update rules and the master scheduler.

One outer step is `wealth_sweeps_per_geometry_sweep` wealth sweeps (each:
update -> floor -> normalize) followed by one geometry sweep of N(N-1)/2
link trials.  The three run modes gate the two sectors:

    adaptive          both sectors evolve, links driven by current weights
    quenched_network  fixed generator graph, wealth evolves on it
    quenched_wealth   fixed weight sample, links evolve around it

Determinism contract: a run consumes its rng stream in a pinned order
(frozen weight sample if any, then initial graph, then the alternating
dynamics), and geometry trials are drawn in fixed-size chunks, so equal
(config, seed) gives bit-identical output on every backend.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from ._version import __version__
from .errors import FitError, GraphError
from .graph import (
    Graph,
    _pairs_from_linear,
    sample_erdos_renyi,
    sample_regular,
    sample_scale_free,
    stationary_link_probability,
)
from .observables import (
    Histogram,
    TailFit,
    fit_power_law_tail,
    inverse_participation_ratio,
)
from .state import (
    WealthState,
    apply_wealth_floor,
    normalize_wealth,
    normalized_weights,
    wealth_update_sweep,
)

__all__ = [
    "RunOutput",
    "link_add_probability",
    "continuous_scaling",
    "geometry_sweep",
    "run_simulation",
]

CHUNK_TRIALS = 1 << 19  # geometry trials drawn per rng batch (fixed: determinism)

WEALTH_HIST_LO, WEALTH_HIST_HI = 1e-8, 1e4
DEGREE_HIST_LO, DEGREE_HIST_HI = 1e-4, 1e3  # in q/<q> units
HIST_BINS_PER_DECADE = 10


def link_add_probability(wi, wj, a):
    """Probability a*wi*wj / (1 + a*wi*wj) of creating a missing link."""
    wi = np.asarray(wi, dtype=np.float64)
    wj = np.asarray(wj, dtype=np.float64)
    if np.any(wi < 0.0) or np.any(wj < 0.0):
        raise ValueError("weights must be >= 0")
    if a < 0.0:
        raise ValueError(f"a must be >= 0, got {a}")
    x = a * wi * wj
    p = x / (1.0 + x)
    if p.ndim == 0:
        return float(p)
    return p


def continuous_scaling(j_phys, sigma_phys, epsilon):
    """Map physical (J, sigma) to per-sweep (j0, sigma0) = (eps*J, sqrt(eps)*sigma)."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if j_phys < 0.0:
        raise ValueError(f"j_phys must be >= 0, got {j_phys}")
    if sigma_phys < 0.0:
        raise ValueError(f"sigma_phys must be >= 0, got {sigma_phys}")
    if epsilon * j_phys >= 1.0:
        raise ValueError(
            f"epsilon*j_phys = {epsilon * j_phys} >= 1 breaks wealth positivity"
        )
    return float(epsilon * j_phys), float(math.sqrt(epsilon) * sigma_phys)


def geometry_sweep(graph, weights, a, r, rng):
    """One full sweep of N(N-1)/2 link trials; returns the updated graph.

    Each trial picks an unordered pair uniformly with replacement.  An
    existing link is removed with probability r; a missing one is created
    with link_add_probability(w_i, w_j, a).  Weights are frozen for the
    whole sweep.
    """
    n = graph.n_nodes
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.size != n:
        raise ValueError(f"weights length {w.size} does not match n_nodes {n}")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise ValueError("weights must be finite and >= 0")
    if a < 0.0:
        raise ValueError(f"a must be >= 0, got {a}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must be in (0, 1], got {r}")
    m = n * (n - 1) // 2
    if m == 0:
        return graph.copy()
    sweep = backend.active().GeometrySweep(n, graph.edge_keys())
    done = 0
    while done < m:
        c = int(min(CHUNK_TRIALS, m - done))
        pi = rng.integers(0, n, size=c)
        pj = rng.integers(0, n - 1, size=c)
        u = rng.random(c)
        sweep.run_chunk(w, a, r, pi, pj, u)
        done += c
    return graph.replaced(sweep.finish())


@dataclass
class RunOutput:
    """Everything one simulation run emits.

    The histograms accumulate over every recorded observation after
    burn-in, not just the final snapshot; `final_weights` and the graph
    fields are the last-step snapshot.  `final_degree_histogram` is built
    over q/<q> (log bins, isolated nodes excluded, <q> per snapshot);
    `final_degree_histogram_raw` is plain q in unit-width bins.
    """

    config: object
    version: str
    sweep: np.ndarray
    links: np.ndarray
    y2_wealth: np.ndarray
    mean_wealth: np.ndarray
    final_wealth_histogram: Histogram
    final_degree_histogram: Histogram
    final_degree_histogram_raw: Histogram
    wealth_fit: Optional[TailFit]
    degree_fit: Optional[TailFit]
    final_weights: np.ndarray
    final_graph_degrees: np.ndarray
    final_graph: Graph


def _sample_pareto_weights(n, mu, rng):
    """Mean-1 weights with tail Prob(w) ~ w^-(1+mu)."""
    u = 1.0 - rng.random(n)  # (0, 1]
    x = u ** (-1.0 / mu)     # classic Pareto, support [1, inf)
    return x * (n / x.sum())


def _sample_stationary_graph(weights, beta, r, rng):
    """Independent per-pair Bernoulli draw at the stationary occupancy."""
    n = weights.size
    m = n * (n - 1) // 2
    if beta == 0.0 or m == 0:
        return Graph.empty(n)
    parts = []
    chunk = 1 << 22
    start = 0
    while start < m:
        c = int(min(chunk, m - start))
        t = np.arange(start, start + c, dtype=np.int64)
        i, j = _pairs_from_linear(t, n)
        p = stationary_link_probability(weights[i], weights[j], beta, r)
        sel = rng.random(c) < p
        parts.append(i[sel] * n + j[sel])
        start += c
    return Graph(n, np.concatenate(parts), validate=False)


def _sample_topology(config, rng):
    kind = config.graph_topology
    n = config.n_agents
    if kind == "erdos_renyi":
        return sample_erdos_renyi(n, config.graph_mean_degree, rng)
    if kind == "regular":
        degree = int(round(config.graph_mean_degree))
        if abs(config.graph_mean_degree - degree) > 1e-9:
            raise GraphError(
                f"regular topology needs an integer degree, "
                f"got {config.graph_mean_degree}"
            )
        return sample_regular(n, degree, rng)
    if kind == "scale_free":
        return sample_scale_free(
            n, config.graph_tail_exponent, config.graph_mean_degree, rng
        )
    return Graph.complete(n)


def _try_fit(hist, lo, hi):
    try:
        return fit_power_law_tail(hist, lo, hi)
    except FitError:
        return None


def run_simulation(config, rng=None, *, initial_weights=None, initial_graph=None):
    """Run one simulation to completion and collect its RunOutput.

    `rng` defaults to a fresh PCG64 generator seeded with config.seed.
    `initial_weights`/`initial_graph` override the mode's default
    initialization (used by invariance tests and ensemble plumbing); the
    defaults are W_i = 1 (adaptive/quenched_network), a Pareto sample
    (quenched_wealth), and per config.initial_graph either a stationary
    Bernoulli seed graph or an edgeless start for the evolving-graph modes.
    """
    config.validate()
    n = config.n_agents
    if rng is None:
        rng = np.random.default_rng(config.seed)
    j0, sigma0 = continuous_scaling(
        config.j_phys, config.sigma_phys, config.epsilon
    )
    a = config.a_add
    r = config.r_remove
    mode = config.mode
    wealth_active = mode != "quenched_wealth"
    geometry_active = mode != "quenched_network"

    if initial_weights is not None:
        state = WealthState.from_values(initial_weights)
        if state.n_agents != n:
            raise ValueError(
                f"initial_weights length {state.n_agents} != n_agents {n}"
            )
    elif mode == "quenched_wealth":
        state = WealthState.from_values(
            _sample_pareto_weights(n, config.weights_tail_exponent, rng)
        )
    else:
        state = WealthState.from_values(np.ones(n))
    frozen_weights = None if wealth_active else normalized_weights(state)

    if initial_graph is not None:
        if initial_graph.n_nodes != n:
            raise ValueError(
                f"initial_graph has {initial_graph.n_nodes} nodes, expected {n}"
            )
        graph = initial_graph.copy()
    elif mode == "quenched_network":
        graph = _sample_topology(config, rng)
    elif config.initial_graph == "stationary":
        w0 = frozen_weights if frozen_weights is not None else normalized_weights(state)
        graph = _sample_stationary_graph(w0, config.beta, r, rng)
    else:
        graph = Graph.empty(n)

    sweeps_per = config.wealth_sweeps_per_geometry_sweep
    w_min = config.w_min
    burn_in = config.burn_in_geometry_sweeps
    every = config.record_every

    wealth_hist = Histogram.logarithmic(
        WEALTH_HIST_LO, WEALTH_HIST_HI, HIST_BINS_PER_DECADE
    )
    degree_hist = Histogram.logarithmic(
        DEGREE_HIST_LO, DEGREE_HIST_HI, HIST_BINS_PER_DECADE
    )
    degree_hist_raw = Histogram.linear(0.0, float(n + 1), n + 1)

    rec_sweep = []
    rec_links = []
    rec_y2 = []
    rec_mean_w = []
    mean_w_last = state.total / n

    for outer in range(1, config.total_geometry_sweeps + 1):
        if wealth_active:
            for _ in range(sweeps_per):
                state = wealth_update_sweep(state, graph, j0, sigma0, rng)
                if w_min > 0.0:
                    state = apply_wealth_floor(state, w_min)
                mean_w_last = state.total / n
                state = normalize_wealth(state)
        if geometry_active:
            w_link = (
                frozen_weights
                if frozen_weights is not None
                else normalized_weights(state)
            )
            graph = geometry_sweep(graph, w_link, a, r, rng)
        if outer > burn_in and (outer - burn_in) % every == 0:
            w = (
                frozen_weights
                if frozen_weights is not None
                else normalized_weights(state)
            )
            rec_sweep.append(outer)
            rec_links.append(graph.num_edges)
            rec_y2.append(inverse_participation_ratio(w))
            rec_mean_w.append(mean_w_last)
            wealth_hist.add(w)
            deg = graph.degrees
            degree_hist_raw.add(deg)
            n_links = graph.num_edges
            if n_links > 0:
                q_pos = deg[deg > 0].astype(np.float64)
                degree_hist.add(q_pos * (n / (2.0 * n_links)))

    final_weights = (
        frozen_weights.copy()
        if frozen_weights is not None
        else normalized_weights(state)
    )
    return RunOutput(
        config=config,
        version=__version__,
        sweep=np.asarray(rec_sweep, dtype=np.int64),
        links=np.asarray(rec_links, dtype=np.int64),
        y2_wealth=np.asarray(rec_y2, dtype=np.float64),
        mean_wealth=np.asarray(rec_mean_w, dtype=np.float64),
        final_wealth_histogram=wealth_hist,
        final_degree_histogram=degree_hist,
        final_degree_histogram_raw=degree_hist_raw,
        wealth_fit=_try_fit(wealth_hist, config.wealth_fit_lo, config.wealth_fit_hi),
        degree_fit=_try_fit(degree_hist, config.degree_fit_lo, config.degree_fit_hi),
        final_weights=final_weights,
        final_graph_degrees=graph.degrees.copy(),
        final_graph=graph,
    )
