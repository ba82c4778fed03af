"""Simulation configuration: the SimConfig record and its text format.

The config file format is plain ``key = value`` lines, keys matching the
SimConfig field names, with '#' comments and blank lines allowed.  Unknown
or duplicate keys are errors (reported with line numbers), and
``parse_config(render_config(c)) == c`` holds exactly: floats are rendered
via repr, which round-trips every IEEE double.
"""

import math
from dataclasses import dataclass, fields

from .errors import ConfigError

__all__ = ["SimConfig", "MODES", "TOPOLOGIES", "parse_config", "render_config"]

MODES = ("adaptive", "quenched_network", "quenched_wealth")
TOPOLOGIES = ("erdos_renyi", "regular", "scale_free", "complete")
INITIAL_GRAPHS = ("stationary", "edgeless")

MAX_SEED = 2**64


@dataclass(frozen=True)
class SimConfig:
    n_agents: int                                # N
    mode: str = "adaptive"
    j_phys: float = 0.005                        # trade coupling J (physical units)
    sigma_phys: float = 1.0                      # noise scale sigma (physical units)
    epsilon: float = 0.001                       # time step; J0 = eps*J, sigma0 = sqrt(eps)*sigma
    a_add: float = 0.002                         # link-creation rate a; beta = a/r
    r_remove: float = 0.1                        # link-removal probability r
    w_min: float = 0.01                          # wealth floor on W_i; 0 disables
    seed: int = 1                                # 64-bit unsigned
    total_geometry_sweeps: int = 1000            # outer steps
    burn_in_geometry_sweeps: int = 200           # outer steps discarded before recording
    record_every: int = 1                        # record cadence in outer steps
    wealth_sweeps_per_geometry_sweep: int = 100
    initial_graph: str = "stationary"            # or "edgeless"; evolving-graph modes only
    graph_topology: str = "erdos_renyi"          # quenched_network generator
    graph_mean_degree: float = 4.0               # ER/regular/scale-free target
    graph_tail_exponent: float = 1.5             # scale-free mu: P(q) ~ q^-(1+mu)
    weights_tail_exponent: float = 2.5           # quenched_wealth Pareto mu
    wealth_fit_lo: float = 0.05                  # wealth-tail fit window (w units)
    wealth_fit_hi: float = 20.0
    degree_fit_lo: float = 1.0                   # degree-tail fit window (q/<q> units)
    degree_fit_hi: float = 30.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            object.__setattr__(self, f.name, _coerce(f.name, value))

    @property
    def beta(self):
        return self.a_add / self.r_remove

    @property
    def j0(self):
        return self.epsilon * self.j_phys

    @property
    def sigma0(self):
        return math.sqrt(self.epsilon) * self.sigma_phys

    def validate(self, source_lines=None):
        """Raise ConfigError on any invariant violation.

        source_lines maps field names to config-file line numbers so parse
        errors can point at the offending line.
        """

        def fail(key, message):
            if source_lines and key in source_lines:
                raise ConfigError(f"line {source_lines[key]}: {message}")
            raise ConfigError(message)

        c = self
        if c.n_agents < 1:
            fail("n_agents", f"n_agents must be >= 1, got {c.n_agents}")
        if c.mode not in MODES:
            fail("mode", f"mode must be one of {MODES}, got {c.mode!r}")
        if not (math.isfinite(c.j_phys) and c.j_phys >= 0.0):
            fail("j_phys", f"j_phys must be finite and >= 0, got {c.j_phys}")
        if not (math.isfinite(c.sigma_phys) and c.sigma_phys > 0.0):
            fail("sigma_phys", f"sigma_phys must be > 0, got {c.sigma_phys}")
        if not (math.isfinite(c.epsilon) and c.epsilon > 0.0):
            fail("epsilon", f"epsilon must be > 0, got {c.epsilon}")
        if c.epsilon * c.j_phys >= 1.0:
            fail(
                "epsilon",
                f"epsilon*j_phys must be < 1 for wealth positivity, "
                f"got {c.epsilon * c.j_phys}",
            )
        if not (math.isfinite(c.a_add) and c.a_add >= 0.0):
            fail("a_add", f"a_add must be >= 0, got {c.a_add}")
        if not 0.0 < c.r_remove <= 1.0:
            fail("r_remove", f"r_remove must be in (0, 1], got {c.r_remove}")
        if not (math.isfinite(c.w_min) and c.w_min >= 0.0):
            fail("w_min", f"w_min must be >= 0, got {c.w_min}")
        if not 0 <= c.seed < MAX_SEED:
            fail("seed", f"seed must be a 64-bit unsigned integer, got {c.seed}")
        if c.total_geometry_sweeps < 1:
            fail(
                "total_geometry_sweeps",
                f"total_geometry_sweeps must be >= 1, got {c.total_geometry_sweeps}",
            )
        if c.burn_in_geometry_sweeps < 0:
            fail(
                "burn_in_geometry_sweeps",
                f"burn_in_geometry_sweeps must be >= 0, "
                f"got {c.burn_in_geometry_sweeps}",
            )
        if c.total_geometry_sweeps <= c.burn_in_geometry_sweeps:
            fail(
                "total_geometry_sweeps",
                f"total_geometry_sweeps ({c.total_geometry_sweeps}) must exceed "
                f"burn_in_geometry_sweeps ({c.burn_in_geometry_sweeps})",
            )
        if c.record_every < 1:
            fail("record_every", f"record_every must be >= 1, got {c.record_every}")
        if c.wealth_sweeps_per_geometry_sweep < 1:
            fail(
                "wealth_sweeps_per_geometry_sweep",
                f"wealth_sweeps_per_geometry_sweep must be >= 1, "
                f"got {c.wealth_sweeps_per_geometry_sweep}",
            )
        if c.initial_graph not in INITIAL_GRAPHS:
            fail(
                "initial_graph",
                f"initial_graph must be one of {INITIAL_GRAPHS}, "
                f"got {c.initial_graph!r}",
            )
        if c.graph_topology not in TOPOLOGIES:
            fail(
                "graph_topology",
                f"graph_topology must be one of {TOPOLOGIES}, "
                f"got {c.graph_topology!r}",
            )
        if not (math.isfinite(c.graph_mean_degree) and c.graph_mean_degree > 0.0):
            fail(
                "graph_mean_degree",
                f"graph_mean_degree must be > 0, got {c.graph_mean_degree}",
            )
        if not c.graph_tail_exponent > 1.0:
            fail(
                "graph_tail_exponent",
                f"graph_tail_exponent must be > 1, got {c.graph_tail_exponent}",
            )
        if not c.weights_tail_exponent > 0.0:
            fail(
                "weights_tail_exponent",
                f"weights_tail_exponent must be > 0, got {c.weights_tail_exponent}",
            )
        if not 0.0 < c.wealth_fit_lo < c.wealth_fit_hi:
            fail(
                "wealth_fit_lo",
                f"need 0 < wealth_fit_lo < wealth_fit_hi, "
                f"got [{c.wealth_fit_lo}, {c.wealth_fit_hi}]",
            )
        if not 0.0 < c.degree_fit_lo < c.degree_fit_hi:
            fail(
                "degree_fit_lo",
                f"need 0 < degree_fit_lo < degree_fit_hi, "
                f"got [{c.degree_fit_lo}, {c.degree_fit_hi}]",
            )
        return self


_INT_FIELDS = {
    "n_agents",
    "seed",
    "total_geometry_sweeps",
    "burn_in_geometry_sweeps",
    "record_every",
    "wealth_sweeps_per_geometry_sweep",
}
_STR_FIELDS = {"mode", "initial_graph", "graph_topology"}
_FLOAT_FIELDS = {f.name for f in fields(SimConfig)} - _INT_FIELDS - _STR_FIELDS


def _coerce(name, value):
    if name in _INT_FIELDS:
        if isinstance(value, bool):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        if isinstance(value, float):
            if not value.is_integer():
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            return int(value)
        if isinstance(value, int):
            return int(value)
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string, got {value!r}")
        return value
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a real number, got {value!r}") from None


def _parse_value(key, text, lineno):
    if key in _STR_FIELDS:
        return text
    if key in _INT_FIELDS:
        try:
            return int(text, 10)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: {key} expects an integer, got {text!r}"
            ) from None
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: {key} expects a real number, got {text!r}"
        ) from None
    if not math.isfinite(value):
        raise ConfigError(f"line {lineno}: {key} must be finite, got {text!r}")
    return value


def _parse_text(text):
    """Parse config-file text into ({key: value}, {key: line number})."""
    known = {f.name for f in fields(SimConfig)}
    values = {}
    source_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = _parse_value(key, value, lineno)
        source_lines[key] = lineno
    return values, source_lines


def parse_config(text):
    """Parse config-file text into a validated SimConfig."""
    values, source_lines = _parse_text(text)
    if "n_agents" not in values:
        raise ConfigError("missing required key 'n_agents'")
    config = SimConfig(**values)
    config.validate(source_lines)
    return config


def render_config(config):
    """Render a SimConfig as config-file text (exact round-trip)."""
    parts = []
    for f in fields(SimConfig):
        value = getattr(config, f.name)
        if f.name in _STR_FIELDS:
            parts.append(f"{f.name} = {value}")
        elif f.name in _INT_FIELDS:
            parts.append(f"{f.name} = {value}")
        else:
            parts.append(f"{f.name} = {value!r}")
    return "\n".join(parts) + "\n"
