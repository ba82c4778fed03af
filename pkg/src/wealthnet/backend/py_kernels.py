"""Pure-numpy implementations of the inner-loop kernels.

This module is the fallback used when the compiled extension
(``wealthnet.backend._speedups``) is not built.  Both backends consume the
same pre-drawn random-variate arrays and are written to produce
bit-identical results: every floating-point operation here has the same
IEEE-754 operand order as its compiled counterpart.
"""

import numpy as np

name = "python"


def _in_sorted(haystack, needles):
    """Boolean membership of ``needles`` in the sorted array ``haystack``."""
    if haystack.size == 0:
        return np.zeros(needles.shape, dtype=bool)
    idx = np.searchsorted(haystack, needles)
    # idx == size means the needle exceeds every element; any in-range slot
    # works because the equality test below rejects it.
    idx[idx == haystack.size] = 0
    return haystack[idx] == needles


def trade_inflow(ei, ej, wealth, degrees, n):
    """Per-agent trade inflow S_i = sum over neighbours j of W_j / q_j.

    ``ei``/``ej`` are the edge endpoint arrays with ei[k] < ej[k]; every
    endpoint therefore has degree >= 1.  np.bincount accumulates weights
    sequentially in k order, matching the compiled loop exactly.
    """
    s = np.bincount(ei, weights=wealth[ej] / degrees[ej], minlength=n)
    s2 = np.bincount(ej, weights=wealth[ei] / degrees[ei], minlength=n)
    return s + s2


class GeometrySweep:
    """Stateful link-update pass over pre-drawn trial arrays.

    Trials are processed in chunks.  A chunk is handled by grouping trials
    by pair (stable sort, so each pair's own trial order is preserved) and
    advancing all pairs' two-state chains round by round.  Because the
    add/remove probabilities depend only on the frozen weights, a pair's
    final state depends only on its own trial subsequence, which makes this
    identical to processing the whole chunk sequentially.
    """

    def __init__(self, n, edge_keys):
        self.n = int(n)
        self.keys = np.asarray(edge_keys, dtype=np.int64)  # sorted pair keys lo*n+hi

    def run_chunk(self, w, a, r, pi, pj, u):
        n = self.n
        j = pj + (pj >= pi)  # second endpoint uniform over the other n-1 agents
        lo = np.minimum(pi, j)
        hi = np.maximum(pi, j)
        trial_keys = lo * n + hi

        order = np.argsort(trial_keys, kind="stable")
        sk = trial_keys[order]
        su = u[order]

        # Group boundaries of equal keys in the sorted trial stream.
        is_first = np.empty(sk.shape, dtype=bool)
        is_first[:1] = True
        is_first[1:] = sk[1:] != sk[:-1]
        first = np.flatnonzero(is_first)
        counts = np.diff(np.append(first, sk.size))
        uq = sk[first]

        linked = _in_sorted(self.keys, uq)
        qlo = uq // n
        qhi = uq - qlo * n
        # Same operand order as the compiled kernel: (a * w[lo]) * w[hi].
        x = a * w[qlo] * w[qhi]
        p_add = x / (1.0 + x)

        rounds = int(counts.max()) if counts.size else 0
        for t in range(rounds):
            act = counts > t
            uu = su[first[act] + t]
            was = linked[act]
            # linked: removed iff u < r; unlinked: added iff u < p_add.
            linked[act] = np.where(was, uu >= r, uu < p_add[act])

        untouched = self.keys[~_in_sorted(uq, self.keys)]
        merged = np.concatenate([untouched, uq[linked]])
        merged.sort()
        self.keys = merged

    def finish(self):
        return self.keys
