"""Undirected simple graphs: storage, random generators, stationary link law.

A graph on n labeled nodes stores its edges canonically as sorted int64
keys ``lo*n + hi`` with ``lo < hi``.  The sorted key array feeds the
vectorized kernels; a Python set view is materialized lazily the first
time per-edge mutation or membership queries need it, giving expected
O(1) lookup/insert/delete.  Degrees are cached and rebuilt on demand.
"""

import numpy as np

from .errors import GraphError

__all__ = [
    "Graph",
    "stationary_link_probability",
    "sample_erdos_renyi",
    "sample_regular",
    "sample_scale_free",
]


class Graph:
    """Undirected simple graph on ``n_nodes`` labeled nodes (0-based)."""

    __slots__ = ("n_nodes", "_keys", "_edge_set", "_endpoints", "_degrees")

    def __init__(self, n_nodes, edge_keys=None, validate=True):
        n = int(n_nodes)
        if n < 1:
            raise GraphError(f"graph needs at least one node, got n={n_nodes}")
        self.n_nodes = n
        if edge_keys is None:
            keys = np.empty(0, dtype=np.int64)
        else:
            keys = np.ascontiguousarray(edge_keys, dtype=np.int64)
        if validate and keys.size:
            if np.any(np.diff(keys) <= 0):
                raise GraphError("edge keys must be strictly ascending")
            if keys[0] < 0 or keys[-1] >= n * n:
                raise GraphError("edge key out of range")
            lo = keys // n
            if np.any(lo >= keys - lo * n):
                raise GraphError("edge keys must encode pairs lo < hi")
        self._keys = keys
        self._edge_set = None   # lazily materialized set of int keys
        self._endpoints = None  # cached (ei, ej) arrays
        self._degrees = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def empty(cls, n_nodes):
        return cls(n_nodes, None, validate=False)

    @classmethod
    def complete(cls, n_nodes):
        n = int(n_nodes)
        if n < 1:
            raise GraphError(f"graph needs at least one node, got n={n_nodes}")
        ei, ej = np.triu_indices(n, k=1)
        keys = ei.astype(np.int64) * n + ej.astype(np.int64)
        return cls(n, keys, validate=False)

    @classmethod
    def from_edges(cls, n_nodes, edges):
        g = cls.empty(n_nodes)
        for i, j in edges:
            g.add_edge(i, j)
        return g

    # -- canonical views -------------------------------------------------

    def _materialize_keys(self):
        if self._keys is None:
            arr = np.fromiter(self._edge_set, dtype=np.int64, count=len(self._edge_set))
            arr.sort()
            self._keys = arr
        return self._keys

    def edge_keys(self):
        """Sorted int64 array of pair keys lo*n + hi."""
        return self._materialize_keys()

    def edge_arrays(self):
        """Endpoint arrays (ei, ej) with ei[k] < ej[k], ascending by key."""
        if self._endpoints is None:
            keys = self._materialize_keys()
            ei = keys // self.n_nodes
            ej = keys - ei * self.n_nodes
            self._endpoints = (ei, ej)
        return self._endpoints

    @property
    def degrees(self):
        if self._degrees is None:
            ei, ej = self.edge_arrays()
            self._degrees = np.bincount(ei, minlength=self.n_nodes) + np.bincount(
                ej, minlength=self.n_nodes
            )
        return self._degrees

    @property
    def num_edges(self):
        if self._keys is not None:
            return int(self._keys.size)
        return len(self._edge_set)

    # -- queries and mutation ---------------------------------------------

    def _pair_key(self, i, j):
        n = self.n_nodes
        i = int(i)
        j = int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"node index out of range: ({i}, {j}) with n={n}")
        if i == j:
            raise GraphError(f"self-loop ({i}, {i}) not allowed")
        if i > j:
            i, j = j, i
        return i * n + j

    def has_edge(self, i, j):
        if i == j:
            return False
        key = self._pair_key(i, j)
        if self._edge_set is not None:
            return key in self._edge_set
        keys = self._keys
        pos = np.searchsorted(keys, key)
        return pos < keys.size and keys[pos] == key

    def _live_set(self):
        if self._edge_set is None:
            self._edge_set = set(self._keys.tolist())
        return self._edge_set

    def _invalidate(self):
        self._keys = None
        self._endpoints = None
        self._degrees = None

    def add_edge(self, i, j):
        key = self._pair_key(i, j)
        edge_set = self._live_set()
        if key in edge_set:
            raise GraphError(f"edge ({i}, {j}) already present")
        edge_set.add(key)
        self._invalidate()

    def remove_edge(self, i, j):
        key = self._pair_key(i, j)
        edge_set = self._live_set()
        if key not in edge_set:
            raise GraphError(f"edge ({i}, {j}) not present")
        edge_set.remove(key)
        self._invalidate()

    def replaced(self, edge_keys):
        """New Graph with the same node count and the given sorted keys.

        Used by the geometry sweep with kernel output, which is sorted and
        in-range by construction; validation is skipped.
        """
        return Graph(self.n_nodes, edge_keys, validate=False)

    def copy(self):
        return Graph(self.n_nodes, self.edge_keys().copy(), validate=False)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and np.array_equal(
            self.edge_keys(), other.edge_keys()
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, num_edges={self.num_edges})"

    def edge_list_text(self):
        """Edge list as text: one "i j" line per edge, lexicographically sorted."""
        ei, ej = self.edge_arrays()
        if ei.size == 0:
            return ""
        lines = [f"{i} {j}" for i, j in zip(ei.tolist(), ej.tolist())]
        return "\n".join(lines) + "\n"


def stationary_link_probability(wi, wj, beta, r):
    """Stationary occupancy of a link between weights wi, wj.

    With add probability a*wi*wj/(1 + a*wi*wj) and removal probability r,
    the two-state chain for one pair has stationary occupancy

        p = beta*wi*wj / (1 + beta*(1+r)*wi*wj),   beta = a/r.

    Accepts scalars or arrays (broadcasting); returns a float for scalar
    input.  Always in [0, 1/(1+r)] and hence in [0, 1).
    """
    wi = np.asarray(wi, dtype=np.float64)
    wj = np.asarray(wj, dtype=np.float64)
    if np.any(wi < 0.0) or np.any(wj < 0.0):
        raise ValueError("weights must be >= 0")
    if beta < 0.0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must be in (0, 1], got {r}")
    x = beta * wi * wj
    p = x / (1.0 + (1.0 + r) * x)
    if p.ndim == 0:
        return float(p)
    return p


# -- generators -------------------------------------------------------------


def _pairs_from_linear(t, n):
    """Decode linear indices over the pairs (i, j), i < j, in row-major order."""
    b = 2 * n - 1
    tt = t.astype(np.float64)
    i = np.floor((b - np.sqrt(b * b - 8.0 * tt)) / 2.0).astype(np.int64)

    def row_start(row):
        return row * (2 * n - row - 1) // 2

    # Guard against off-by-one from the float sqrt, one step each way.
    i -= row_start(i) > t
    i += row_start(i + 1) <= t
    j = i + 1 + (t - row_start(i))
    return i, j


def sample_erdos_renyi(n, mean_degree, rng):
    """G(n, p) with p = mean_degree/(n-1), sampled by geometric gap skipping."""
    n = int(n)
    if n < 2:
        raise GraphError(f"need n >= 2, got {n}")
    if not 0.0 < mean_degree <= n - 1:
        raise GraphError(
            f"mean_degree must be in (0, n-1], got {mean_degree} with n={n}"
        )
    p = mean_degree / (n - 1)
    m = n * (n - 1) // 2
    if p >= 1.0:
        return Graph.complete(n)

    batch = max(int(m * p * 1.2) + 64, 64)  # deterministic in (n, p)
    parts = []
    idx = -1
    while True:
        gaps = rng.geometric(p, size=batch)
        pos = idx + np.cumsum(gaps)
        if pos[-1] >= m:
            parts.append(pos[pos < m])
            break
        parts.append(pos)
        idx = int(pos[-1])
    t = np.concatenate(parts)
    i, j = _pairs_from_linear(t, n)
    return Graph(n, i * n + j, validate=False)


def sample_regular(n, degree, rng):
    """Random simple graph with every node of the given degree."""
    n = int(n)
    degree = int(degree)
    if n < 1:
        raise GraphError(f"need n >= 1, got {n}")
    if not 0 <= degree < n:
        raise GraphError(f"degree must be in [0, n), got {degree} with n={n}")
    if (n * degree) % 2:
        raise GraphError(f"n*degree must be even, got n={n}, degree={degree}")
    if degree == 0:
        return Graph.empty(n)
    qseq = np.full(n, degree, dtype=np.int64)
    return Graph(n, _pair_degree_sequence(qseq, rng), validate=False)


def sample_scale_free(n, tail_exponent_mu, mean_degree, rng):
    """Configuration-model graph with degree tail Prob(q) ~ q^-(1+mu).

    Degrees are floor(X) for X Pareto-distributed above a real-valued
    floor q_min, clamped to [1, q_cap] with q_cap ~ sqrt(2*n*mean_degree)
    (the structural cutoff keeps the stub pairing repairable).  q_min is
    calibrated so the sequence mean matches mean_degree; the exact
    discrete expectation is solved by bisection, so the match is tight.
    """
    n = int(n)
    mu = float(tail_exponent_mu)
    if mu <= 1.0:
        raise GraphError(f"tail exponent must exceed 1 for a finite mean, got {mu}")
    if mean_degree < 1.0:
        raise GraphError(f"mean_degree must be >= 1, got {mean_degree}")
    if n < 4:
        raise GraphError(f"need n >= 4, got {n}")
    q_cap = int(np.sqrt(2.0 * n * mean_degree))
    q_cap = min(max(q_cap, int(mean_degree) + 2), n - 1)
    if mean_degree > q_cap:
        raise GraphError(
            f"mean_degree {mean_degree} unreachable under degree cap {q_cap}"
        )
    q_min = _calibrate_pareto_floor(mu, float(mean_degree), q_cap)

    u = 1.0 - rng.random(n)  # in (0, 1], avoids the U=0 pole
    x = q_min * u ** (-1.0 / mu)
    qseq = np.clip(np.floor(x).astype(np.int64), 1, q_cap)
    if int(qseq.sum()) % 2:
        k = int(rng.integers(n))
        qseq[k] += 1 if qseq[k] < q_cap else -1
    return Graph(n, _pair_degree_sequence(qseq, rng), validate=False)


def _calibrate_pareto_floor(mu, target_mean, q_cap):
    """Solve for the Pareto floor giving E[clip(floor(X), 1, q_cap)] = target.

    E[q] = 1 + sum_{k=2}^{q_cap} P(X >= k) with P(X >= k) = min(1, (qm/k)^mu),
    continuous and increasing in qm, so plain bisection works.
    """
    k = np.arange(2, q_cap + 1, dtype=np.float64)

    def expected(qm):
        return 1.0 + float(np.minimum(1.0, (qm / k) ** mu).sum())

    lo, hi = 1e-9, float(q_cap)
    if expected(hi) < target_mean:
        raise GraphError(
            f"mean degree {target_mean} not reachable with cap {q_cap}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if expected(mid) < target_mean:
            lo = mid
        else:
            hi = mid
    qm = 0.5 * (lo + hi)
    got = expected(qm)
    if abs(got - target_mean) > 0.05 * target_mean:
        raise GraphError(
            f"degree-mean calibration landed at {got:.4f}, "
            f"outside 5% of target {target_mean}"
        )
    return qm


def _pair_degree_sequence(qseq, rng, max_restarts=60):
    """Realize a degree sequence as a simple graph via stub pairing + rewiring.

    Returns the sorted edge-key array.  Each random pairing is repaired by
    degree-preserving edge swaps; if a defect cannot be placed after a
    bounded number of swap attempts the whole pairing is redrawn.
    """
    n = qseq.size
    total = int(qseq.sum())
    if total % 2:
        raise GraphError("degree sequence must have even sum")
    if total == 0:
        return np.empty(0, dtype=np.int64)
    if np.any(qseq < 0) or np.any(qseq >= n):
        raise GraphError("degrees must lie in [0, n)")
    for _ in range(max_restarts):
        keys = _try_pairing(qseq, rng)
        if keys is not None:
            return keys
    raise GraphError(
        f"could not realize the degree sequence as a simple graph "
        f"after {max_restarts} pairings"
    )


def _try_pairing(qseq, rng):
    n = qseq.size
    stubs = np.repeat(np.arange(n, dtype=np.int64), qseq)
    rng.shuffle(stubs)
    a = stubs[0::2]
    b = stubs[1::2]
    lo = np.minimum(a, b).tolist()
    hi = np.maximum(a, b).tolist()

    edge_set = set()
    bad = []
    for u, v in zip(lo, hi):
        if u == v:
            bad.append((u, v))
            continue
        key = u * n + v
        if key in edge_set:
            bad.append((u, v))
        else:
            edge_set.add(key)

    if bad:
        edge_list = list(edge_set)
        pos_of = {key: idx for idx, key in enumerate(edge_list)}
        for u, v in bad:
            if not _place_defect(u, v, n, edge_set, edge_list, pos_of, rng):
                return None

    keys = np.fromiter(edge_set, dtype=np.int64, count=len(edge_set))
    keys.sort()
    return keys


def _place_defect(u, v, n, edge_set, edge_list, pos_of, rng, max_attempts=400):
    """Place the leftover stub pair (u, v) by splitting a random existing edge.

    Replacing edge (x, y) with (u, x) and (v, y) preserves all degrees and
    adds the one edge the defective pair owed.  Handles u == v (a would-be
    self-loop) the same way.
    """
    for _ in range(max_attempts):
        key_xy = edge_list[int(rng.integers(len(edge_list)))]
        x, y = divmod(key_xy, n)
        if rng.integers(2):
            x, y = y, x
        if u == x or v == y:
            continue
        k1 = (u * n + x) if u < x else (x * n + u)
        k2 = (v * n + y) if v < y else (y * n + v)
        if k1 == k2 or k1 in edge_set or k2 in edge_set:
            continue
        edge_set.remove(key_xy)
        edge_set.add(k1)
        edge_set.add(k2)
        # swap-remove key_xy from the pick list, then append the new edges
        idx = pos_of.pop(key_xy)
        last = edge_list.pop()
        if last != key_xy:
            edge_list[idx] = last
            pos_of[last] = idx
        for k in (k1, k2):
            pos_of[k] = len(edge_list)
            edge_list.append(k)
        return True
    return False
