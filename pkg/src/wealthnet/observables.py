"""Measurement machinery: participation ratios, histograms, tail fits,
autocorrelation times, and wealth-degree association.

Histograms follow a half-open bin convention [e_k, e_{k+1}), with values
outside the edge span counted as underflow/overflow.  The density view
divides by the grand total (in-range + under + overflow), so it integrates
to 1 exactly when nothing fell outside and to < 1 otherwise; a constant
normalization factor never affects log-log slope fits.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FitError

__all__ = [
    "Histogram",
    "TailFit",
    "inverse_participation_ratio",
    "degree_participation_ratio",
    "log_histogram",
    "poverty_fraction",
    "fit_power_law_tail",
    "autocorrelation_time",
    "pearson_correlation",
    "mean_wealth_by_degree",
    "spearman_rank_correlation",
]


@dataclass
class Histogram:
    bin_edges: np.ndarray        # ascending, len = n_bins + 1
    counts: np.ndarray           # int64, len = n_bins
    scheme: str                  # "linear" or "logarithmic"
    total_count: int = 0
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def linear(cls, lo, hi, n_bins):
        if not lo < hi:
            raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
        if n_bins < 1:
            raise ValueError(f"need at least one bin, got {n_bins}")
        edges = np.linspace(float(lo), float(hi), int(n_bins) + 1)
        return cls(edges, np.zeros(int(n_bins), dtype=np.int64), "linear")

    @classmethod
    def logarithmic(cls, lo, hi, bins_per_decade):
        if not 0.0 < lo < hi:
            raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
        if bins_per_decade < 1:
            raise ValueError(f"need bins_per_decade >= 1, got {bins_per_decade}")
        decades = np.log10(hi / lo)
        n_bins = max(int(round(bins_per_decade * decades)), 1)
        edges = 10.0 ** np.linspace(np.log10(lo), np.log10(hi), n_bins + 1)
        edges[0] = lo   # pin the bounds exactly; interior stays log-spaced
        edges[-1] = hi
        return cls(edges, np.zeros(n_bins, dtype=np.int64), "logarithmic")

    @property
    def n_bins(self):
        return self.counts.size

    def add(self, values):
        """Count the values into bins; outside the span -> under/overflow."""
        v = np.asarray(values, dtype=np.float64).ravel()
        idx = np.searchsorted(self.bin_edges, v, side="right") - 1
        in_range = (idx >= 0) & (idx < self.n_bins)
        self.counts += np.bincount(idx[in_range], minlength=self.n_bins).astype(
            np.int64
        )
        self.underflow += int(np.count_nonzero(idx < 0))
        self.overflow += int(np.count_nonzero(idx >= self.n_bins))
        self.total_count += int(v.size)

    def widths(self):
        return np.diff(self.bin_edges)

    def centers(self):
        """Arithmetic bin centers for linear bins, geometric for log bins."""
        e = self.bin_edges
        if self.scheme == "logarithmic":
            return np.sqrt(e[:-1] * e[1:])
        return 0.5 * (e[:-1] + e[1:])

    def density(self):
        """Per-width density; integrates to (in-range count)/(total count)."""
        if self.total_count == 0:
            return np.zeros(self.n_bins)
        return self.counts / (self.total_count * self.widths())

    def mass_below(self, x):
        """Fraction of all counted values in bins entirely below x,
        underflow included.  x should sit on (or just above) a bin edge."""
        if self.total_count == 0:
            return 0.0
        k = int(np.searchsorted(self.bin_edges, x * (1.0 + 1e-12), side="right")) - 1
        k = min(max(k, 0), self.n_bins)
        return (self.underflow + int(self.counts[:k].sum())) / self.total_count


@dataclass
class TailFit:
    slope: float                # positive exponent s, density ~ x^(-s)
    stderr: float
    fit_range: tuple            # (lo, hi) in the variable's units
    n_bins_used: int


def inverse_participation_ratio(weights):
    """Y2 = sum_i (w_i/N)^2 for mean-1 weights; 1/N (uniform) .. 1 (condensed)."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size == 0:
        raise ValueError("weights must be non-empty")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    mean = w.mean()
    if abs(mean - 1.0) > 1e-6:
        raise ValueError(f"weights must have mean 1 within 1e-6, got {mean}")
    n = w.size
    return float(np.dot(w, w)) / (n * n)


def degree_participation_ratio(graph):
    """Y2 over the rescaled degrees Q_i = N q_i / (2L)."""
    n_links = graph.num_edges
    if n_links < 1:
        raise ValueError("degree participation ratio needs at least one edge")
    q = graph.degrees.astype(np.float64)
    return float(np.dot(q, q)) / (4.0 * n_links * n_links)


def log_histogram(values, bins_per_decade, lo, hi):
    """Histogram positive values into log-spaced bins over [lo, hi)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if np.any(v <= 0.0):
        raise ValueError("log histogram requires strictly positive values")
    h = Histogram.logarithmic(lo, hi, bins_per_decade)
    h.add(v)
    return h


def poverty_fraction(weights, delta):
    """Fraction of weights strictly below delta."""
    if delta <= 0.0:
        raise ValueError(f"delta must be > 0, got {delta}")
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size == 0:
        return 0.0
    return float(np.count_nonzero(w < delta)) / w.size


def fit_power_law_tail(hist, lo, hi):
    """OLS line through (log center, log density) over non-empty bins in range.

    Sign convention: returns the positive exponent s with density ~ x^(-s),
    i.e. s = -slope of the log-log line.  stderr is the standard error of
    the slope from the regression residuals.
    """
    if not 0.0 < lo < hi:
        raise FitError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    c = hist.centers()
    d = hist.density()
    sel = (c >= lo) & (c <= hi) & (hist.counts > 0)
    m = int(np.count_nonzero(sel))
    if m < 4:
        raise FitError(
            f"tail fit needs >= 4 non-empty bins in [{lo}, {hi}], found {m}"
        )
    x = np.log(c[sel])
    y = np.log(d[sel])
    dx = x - x.mean()
    sxx = float(np.dot(dx, dx))
    if sxx <= 0.0:
        raise FitError("degenerate fit: zero variance in log bin centers")
    dy = y - y.mean()
    slope = float(np.dot(dx, dy)) / sxx
    resid = dy - slope * dx
    var = float(np.dot(resid, resid)) / (m - 2) if m > 2 else 0.0
    stderr = float(np.sqrt(var / sxx))
    return TailFit(
        slope=float(0.0 - slope),
        stderr=stderr,
        fit_range=(float(lo), float(hi)),
        n_bins_used=m,
    )


def autocorrelation_time(series):
    """Integrated autocorrelation time with first-negative-rho truncation.

    tau = 1 + 2*sum_k rho(k), summing k = 1, 2, ... until the first k with
    rho(k) < 0 (exclusive).  A constant series has tau = 1 by convention.
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if n < 100:
        raise ValueError(f"autocorrelation time needs >= 100 points, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series must be finite")
    if np.all(x == x[0]):
        return 1.0
    d = x - x.mean()
    c0 = float(np.dot(d, d)) / n
    if c0 <= 0.0:
        return 1.0
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(d, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n] / n
    rho = acov / acov[0]
    neg = np.flatnonzero(rho[1:] < 0.0)
    stop = int(neg[0]) + 1 if neg.size else n
    return float(1.0 + 2.0 * rho[1:stop].sum())


def pearson_correlation(a, b):
    """Standard Pearson correlation coefficient, clipped to [-1, 1]."""
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ValueError(f"need at least 3 points, got {x.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx <= 0.0 or sy <= 0.0:
        raise ValueError("pearson correlation undefined for zero-variance input")
    r = float(np.dot(dx, dy)) / np.sqrt(sx * sy)
    return float(min(1.0, max(-1.0, r)))


def mean_wealth_by_degree(graph, weights):
    """Rows (q, mean weight over nodes of degree q, node count), sorted by q."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size != graph.n_nodes:
        raise ValueError(
            f"weights length {w.size} does not match n_nodes {graph.n_nodes}"
        )
    uq, inv = np.unique(graph.degrees, return_inverse=True)
    sums = np.bincount(inv, weights=w)
    cnts = np.bincount(inv)
    return [
        (int(q), float(s / c), int(c)) for q, s, c in zip(uq, sums, cnts)
    ]


def spearman_rank_correlation(a, b):
    """Pearson correlation of the rank vectors (average-rank-free variant)."""

    def ranks(v):
        v = np.asarray(v, dtype=np.float64).ravel()
        order = np.argsort(v, kind="stable")
        r = np.empty(v.size)
        r[order] = np.arange(v.size, dtype=np.float64)
        return r

    return pearson_correlation(ranks(a), ranks(b))
