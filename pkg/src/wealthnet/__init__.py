"""Seeded Monte-Carlo simulator of wealth exchange on adaptive networks.

Agents hold wealth that multiplicatively fluctuates and flows along the
links of a trading graph; links appear preferentially between rich
agents and decay at a constant rate. The package simulates the coupled
dynamics (or either quenched limit), extracts distributional
observables, fits power-law tails, and writes deterministic CSV
reports. Hot kernels run on a compiled backend when available, with a
bit-identical pure-Python fallback.
"""

from . import backend
from ._version import __version__
from .config import (
    MODES,
    TOPOLOGIES,
    SimConfig,
    parse_config,
    render_config,
)
from .dynamics import (
    RunOutput,
    continuous_scaling,
    geometry_sweep,
    link_add_probability,
    run_simulation,
)
from .ensemble import EnsembleResult, ReplicaMetrics, ensemble_run, mix_seed, parameter_scan
from .errors import ConfigError, FitError, GraphError
from .graph import (
    Graph,
    sample_erdos_renyi,
    sample_regular,
    sample_scale_free,
    stationary_link_probability,
)
from .observables import (
    Histogram,
    TailFit,
    autocorrelation_time,
    degree_participation_ratio,
    fit_power_law_tail,
    inverse_participation_ratio,
    log_histogram,
    mean_wealth_by_degree,
    pearson_correlation,
    poverty_fraction,
)
from .output import read_histogram_csv, write_run_output
from .state import (
    WealthState,
    apply_wealth_floor,
    normalize_wealth,
    normalized_weights,
    sample_noise,
    wealth_update_sweep,
)

__all__ = [
    "__version__",
    "backend",
    "MODES",
    "TOPOLOGIES",
    "SimConfig",
    "parse_config",
    "render_config",
    "RunOutput",
    "continuous_scaling",
    "geometry_sweep",
    "link_add_probability",
    "run_simulation",
    "EnsembleResult",
    "ReplicaMetrics",
    "ensemble_run",
    "mix_seed",
    "parameter_scan",
    "ConfigError",
    "FitError",
    "GraphError",
    "Graph",
    "sample_erdos_renyi",
    "sample_regular",
    "sample_scale_free",
    "stationary_link_probability",
    "Histogram",
    "TailFit",
    "autocorrelation_time",
    "degree_participation_ratio",
    "fit_power_law_tail",
    "inverse_participation_ratio",
    "log_histogram",
    "mean_wealth_by_degree",
    "pearson_correlation",
    "poverty_fraction",
    "read_histogram_csv",
    "write_run_output",
    "WealthState",
    "apply_wealth_floor",
    "normalize_wealth",
    "normalized_weights",
    "sample_noise",
    "wealth_update_sweep",
]
