"""Wealth state and the per-sweep wealth update.

N agents hold wealth W_i > 0.  One synchronous sweep first exchanges
wealth along the links: agent j sends a fraction j0 of its wealth, split
evenly over its q_j links (so W_j * j0 / q_j per link), and then every
agent's holding is multiplied by an i.i.d. log-normal growth factor
exp(eta_i) with eta_i ~ N(0, sigma0^2):

    W_i' = (W_i - j0*W_i*[q_i > 0] + j0 * sum_{j~i} W_j/q_j) * exp(eta_i)

Isolated agents trade nothing but still receive growth noise.  The trade
step conserves total wealth exactly in real arithmetic; in floating point
the total is preserved to ~1e-12 relative per sweep.  For 0 <= j0 < 1 and
positive input wealth the update keeps every W_i strictly positive.
"""

from dataclasses import dataclass

import numpy as np

from . import backend

__all__ = [
    "WealthState",
    "sample_noise",
    "wealth_update_sweep",
    "apply_wealth_floor",
    "normalize_wealth",
    "normalized_weights",
]


@dataclass(frozen=True, eq=False)
class WealthState:
    """Wealth vector plus its cached total (kept in sync by the ops)."""

    wealth: np.ndarray  # float64, strictly positive
    total: float

    @classmethod
    def from_values(cls, values):
        w = np.asarray(values, dtype=np.float64).copy()
        if w.ndim != 1 or w.size == 0:
            raise ValueError("wealth must be a non-empty 1-d array")
        if not np.all(np.isfinite(w)):
            raise ValueError("wealth values must be finite")
        if np.any(w <= 0.0):
            raise ValueError("wealth values must be strictly positive")
        return cls(w, float(w.sum()))

    @property
    def n_agents(self):
        return self.wealth.size


def sample_noise(rng, sigma0, n):
    """Draw the sweep's n growth exponents, one per agent in index order."""
    if sigma0 < 0.0:
        raise ValueError(f"sigma0 must be >= 0, got {sigma0}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return rng.standard_normal(n) * sigma0


def wealth_update_sweep(state, graph, j0, sigma0, rng):
    """One synchronous trade-and-grow sweep; returns a new WealthState."""
    n = graph.n_nodes
    if state.wealth.size != n:
        raise ValueError(
            f"state has {state.wealth.size} agents but graph has {n} nodes"
        )
    if not 0.0 <= j0 < 1.0:
        raise ValueError(f"j0 must be in [0, 1), got {j0}")
    w = state.wealth
    eta = sample_noise(rng, sigma0, n)
    if graph.num_edges > 0:
        ei, ej = graph.edge_arrays()
        inflow = backend.active().trade_inflow(ei, ej, w, graph.degrees, n)
        traded = w - (j0 * w) * (graph.degrees > 0) + j0 * inflow
    else:
        traded = w
    new = traded * np.exp(eta)
    return WealthState(new, float(new.sum()))


def apply_wealth_floor(state, w_min):
    """Clamp every holding below w_min up to w_min (no-op for w_min = 0)."""
    if w_min < 0.0:
        raise ValueError(f"w_min must be >= 0, got {w_min}")
    if w_min == 0.0:
        return state
    w = np.maximum(state.wealth, w_min)
    return WealthState(w, float(w.sum()))


def normalize_wealth(state):
    """Rescale so the total is N (i.e. mean wealth 1)."""
    if not state.total > 0.0 or not np.isfinite(state.total):
        raise ValueError(f"cannot normalize: total wealth is {state.total}")
    w = state.wealth * (state.wealth.size / state.total)
    return WealthState(w, float(w.sum()))


def normalized_weights(state):
    """The mean-1 weight vector w_i = W_i / Wbar used by the link dynamics."""
    if not state.total > 0.0 or not np.isfinite(state.total):
        raise ValueError(f"cannot normalize: total wealth is {state.total}")
    return state.wealth * (state.wealth.size / state.total)
