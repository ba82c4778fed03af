"""Deterministic text/CSV serialization of run outputs.

All real numbers are written with 17 significant digits (format .17g),
which round-trips IEEE doubles exactly, so a given RunOutput always
serializes to byte-identical files.
"""

from pathlib import Path

import numpy as np

from .config import render_config
from .observables import Histogram

__all__ = ["write_run_output", "read_histogram_csv", "format_real"]


def format_real(x):
    return format(float(x), ".17g")


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _timeseries_csv(out):
    lines = ["sweep,links,y2_wealth,mean_wealth"]
    for s, l, y, m in zip(
        out.sweep.tolist(),
        out.links.tolist(),
        out.y2_wealth.tolist(),
        out.mean_wealth.tolist(),
    ):
        lines.append(f"{s},{l},{format_real(y)},{format_real(m)}")
    return "\n".join(lines) + "\n"


def histogram_csv(hist):
    edges = hist.bin_edges
    counts = hist.counts
    dens = hist.density()
    lines = ["bin_lo,bin_hi,count,density"]
    for k in range(hist.n_bins):
        lines.append(
            f"{format_real(edges[k])},{format_real(edges[k + 1])},"
            f"{int(counts[k])},{format_real(dens[k])}"
        )
    return "\n".join(lines) + "\n"


def _fit_line(label, fit):
    if fit is None:
        return f"{label}: unavailable"
    lo, hi = fit.fit_range
    return (
        f"{label}: slope={format_real(fit.slope)} stderr={format_real(fit.stderr)} "
        f"range=[{format_real(lo)},{format_real(hi)}] bins={fit.n_bins_used}"
    )


def _fits_text(out):
    return (
        _fit_line("wealth_tail", out.wealth_fit)
        + "\n"
        + _fit_line("degree_tail", out.degree_fit)
        + "\n"
    )


def write_run_output(out, directory):
    """Write the run's files into `directory` (created if needed).

    Emits timeseries.csv, wealth_hist.csv, degree_hist.csv (q/<q> bins),
    degree_hist_raw.csv, fits.txt, config.txt, and edges.txt.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    _write_text(d / "timeseries.csv", _timeseries_csv(out))
    _write_text(d / "wealth_hist.csv", histogram_csv(out.final_wealth_histogram))
    _write_text(d / "degree_hist.csv", histogram_csv(out.final_degree_histogram))
    _write_text(
        d / "degree_hist_raw.csv", histogram_csv(out.final_degree_histogram_raw)
    )
    _write_text(d / "fits.txt", _fits_text(out))
    _write_text(d / "config.txt", render_config(out.config))
    _write_text(d / "edges.txt", out.final_graph.edge_list_text())
    return d


def read_histogram_csv(path):
    """Rebuild a Histogram from a histogram CSV (for re-fitting).

    Under/overflow counts are not serialized, so the reconstructed
    density differs from the original by a constant factor; log-log
    slope fits are unaffected.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "bin_lo,bin_hi,count,density":
        raise ValueError(f"{path}: not a histogram CSV (bad header)")
    lo = []
    hi = []
    counts = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 columns")
        lo.append(float(parts[0]))
        hi.append(float(parts[1]))
        counts.append(int(parts[2]))
    if not lo:
        raise ValueError(f"{path}: histogram has no bins")
    lo = np.asarray(lo)
    hi = np.asarray(hi)
    if not np.all(lo[1:] == hi[:-1]):
        raise ValueError(f"{path}: bins are not contiguous")
    edges = np.append(lo, hi[-1])
    if np.any(np.diff(edges) <= 0):
        raise ValueError(f"{path}: bin edges not strictly increasing")
    scheme = _detect_scheme(edges)
    h = Histogram(
        bin_edges=edges,
        counts=np.asarray(counts, dtype=np.int64),
        scheme=scheme,
        total_count=int(sum(counts)),
    )
    return h


def _detect_scheme(edges):
    if edges.size < 3:
        return "linear"
    diffs = np.diff(edges)
    if np.allclose(diffs, diffs[0], rtol=1e-9, atol=0.0):
        return "linear"
    if edges[0] > 0:
        ratios = edges[1:] / edges[:-1]
        if np.allclose(ratios, ratios[0], rtol=1e-9, atol=0.0):
            return "logarithmic"
    return "linear"
