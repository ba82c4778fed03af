"""Replica ensembles: seed derivation, parallel execution, aggregation.

Replica k runs with an independent seed derived from the base seed by a
SplitMix64 step, so ensembles are reproducible regardless of how many
worker processes execute them or in which order replicas finish.
"""

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dynamics import run_simulation
from .errors import ConfigError
from .output import format_real, write_run_output

__all__ = [
    "mix_seed",
    "ReplicaMetrics",
    "EnsembleResult",
    "ensemble_run",
    "parameter_scan",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_METRICS = ("y2_wealth", "mean_degree", "wealth_slope", "degree_slope")

# Parameters a scan may sweep, mapped to how a value is applied.
_SCAN_PARAMS = ("j_phys", "a_add", "beta")


def mix_seed(seed, index):
    """Seed for replica `index`: SplitMix64 finalizer of seed + (k+1)*golden."""
    if index < 0:
        raise ValueError(f"replica index must be >= 0, got {index}")
    z = (int(seed) + (int(index) + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ReplicaMetrics:
    """Scalar summary of one replica run."""

    index: int
    seed: int                 # derived seed the replica actually ran with
    y2_wealth: float          # time-averaged wealth participation ratio
    mean_degree: float        # 2 <L> / N over the recorded window
    wealth_slope: float       # nan when the tail fit failed
    degree_slope: float       # nan when the tail fit failed


@dataclass(frozen=True)
class EnsembleResult:
    replicas: tuple           # ReplicaMetrics in ascending replica order
    summary: dict             # metric -> (mean, stderr, n_used)


def _run_replica(config, index, out_dir):
    cfg = replace(config, seed=mix_seed(config.seed, index))
    out = run_simulation(cfg)
    if out_dir is not None:
        write_run_output(out, Path(out_dir) / f"replica_{index:03d}")
    y2 = float(np.mean(out.y2_wealth)) if out.y2_wealth.size else math.nan
    mean_degree = (
        2.0 * float(np.mean(out.links)) / config.n_agents
        if out.links.size
        else math.nan
    )
    wealth_slope = out.wealth_fit.slope if out.wealth_fit is not None else math.nan
    degree_slope = out.degree_fit.slope if out.degree_fit is not None else math.nan
    return ReplicaMetrics(
        index=index,
        seed=cfg.seed,
        y2_wealth=y2,
        mean_degree=mean_degree,
        wealth_slope=wealth_slope,
        degree_slope=degree_slope,
    )


def _aggregate(metrics):
    summary = {}
    for name in _METRICS:
        values = np.array([getattr(m, name) for m in metrics], dtype=float)
        values = values[np.isfinite(values)]
        n = int(values.size)
        if n == 0:
            summary[name] = (math.nan, math.nan, 0)
        elif n == 1:
            summary[name] = (float(values[0]), 0.0, 1)
        else:
            mean = float(values.mean())
            stderr = float(values.std(ddof=1) / math.sqrt(n))
            summary[name] = (mean, stderr, n)
    return summary


def _summary_csv(summary):
    lines = ["metric,mean,stderr,n_replicas"]
    for name in _METRICS:
        mean, stderr, n = summary[name]
        lines.append(f"{name},{format_real(mean)},{format_real(stderr)},{n}")
    return "\n".join(lines) + "\n"


def ensemble_run(config, n_replicas, workers=1, out_dir=None):
    """Run `n_replicas` independent replicas of `config` and aggregate.

    The result is a function of (config, n_replicas) only: worker count
    changes scheduling, never the numbers. Replica failures propagate
    with the failing replica's index attached.
    """
    config.validate()
    if n_replicas < 1:
        raise ValueError(f"n_replicas must be >= 1, got {n_replicas}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    out_path = None
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)

    if workers == 1 or n_replicas == 1:
        metrics = [_run_replica(config, k, out_path) for k in range(n_replicas)]
    else:
        results = {}
        with ProcessPoolExecutor(max_workers=min(workers, n_replicas)) as pool:
            futures = {
                pool.submit(_run_replica, config, k, out_path): k
                for k in range(n_replicas)
            }
            for fut in as_completed(futures):
                k = futures[fut]
                try:
                    results[k] = fut.result()
                except Exception as exc:
                    raise RuntimeError(f"replica {k} failed: {exc}") from exc
        metrics = [results[k] for k in range(n_replicas)]

    summary = _aggregate(metrics)
    if out_path is not None:
        with open(out_path / "ensemble.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_summary_csv(summary))
    return EnsembleResult(replicas=tuple(metrics), summary=summary)


def _apply_scan_value(config, param, value):
    value = float(value)
    if param == "j_phys":
        return replace(config, j_phys=value)
    if param == "a_add":
        return replace(config, a_add=value)
    if param == "beta":
        return replace(config, a_add=value * config.r_remove)
    raise ConfigError(
        f"unknown scan parameter {param!r} (choose from {', '.join(_SCAN_PARAMS)})"
    )


def parameter_scan(config, param, values, n_replicas, workers=1, out_dir=None):
    """Run an ensemble per value of `param` and collect the summaries.

    Returns a list of (value, EnsembleResult) in the given order. With
    out_dir set, point k's replicas land in point_k/ and a scan.csv
    table of the per-point summaries is written alongside them.
    """
    if param not in _SCAN_PARAMS:
        raise ConfigError(
            f"unknown scan parameter {param!r} (choose from {', '.join(_SCAN_PARAMS)})"
        )
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("parameter scan needs at least one value")
    out_path = None
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)

    points = []
    for k, value in enumerate(values):
        cfg = _apply_scan_value(config, param, value)
        cfg.validate()
        point_dir = None if out_path is None else out_path / f"point_{k:02d}"
        points.append((value, ensemble_run(cfg, n_replicas, workers, point_dir)))

    if out_path is not None:
        lines = ["param,value,y2_mean,y2_stderr,mean_degree,wealth_slope"]
        for value, res in points:
            y2_mean, y2_err, _ = res.summary["y2_wealth"]
            deg_mean = res.summary["mean_degree"][0]
            slope_mean = res.summary["wealth_slope"][0]
            lines.append(
                f"{param},{format_real(value)},{format_real(y2_mean)},"
                f"{format_real(y2_err)},{format_real(deg_mean)},{format_real(slope_mean)}"
            )
        with open(out_path / "scan.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return points
