"""Command-line interface: run, ensemble, scan, and fit verbs.

Flag precedence is CLI > config file > built-in defaults. Exit codes:
0 success, 1 configuration error, 2 runtime error.
"""

import argparse
import sys
from pathlib import Path

from . import backend
from ._version import __version__
from .config import _parse_text, SimConfig
from .dynamics import run_simulation
from .ensemble import ensemble_run, parameter_scan
from .errors import ConfigError, FitError
from .observables import fit_power_law_tail
from .output import format_real, read_histogram_csv, write_run_output

__all__ = ["main", "build_parser"]

# CLI mode spellings (hyphenated) -> SimConfig mode values.
_MODES = {
    "adaptive": "adaptive",
    "quenched-net": "quenched_network",
    "quenched-wealth": "quenched_wealth",
}

# (flag dest, SimConfig field) pairs that overlay file/default values.
_OVERRIDES = (
    ("n_agents", "n_agents"),
    ("j_phys", "j_phys"),
    ("sigma_phys", "sigma_phys"),
    ("epsilon", "epsilon"),
    ("a_add", "a_add"),
    ("r_remove", "r_remove"),
    ("w_min", "w_min"),
    ("seed", "seed"),
    ("total_geometry_sweeps", "total_geometry_sweeps"),
    ("burn_in_geometry_sweeps", "burn_in_geometry_sweeps"),
    ("record_every", "record_every"),
    ("sweeps_per", "wealth_sweeps_per_geometry_sweep"),
    ("initial_graph", "initial_graph"),
    ("graph_topology", "graph_topology"),
    ("graph_mean_degree", "graph_mean_degree"),
    ("graph_tail_exponent", "graph_tail_exponent"),
    ("weights_tail_exponent", "weights_tail_exponent"),
)


def _add_config_flags(p):
    p.add_argument("--config", metavar="PATH", help="config file (key = value lines)")
    p.add_argument("--mode", choices=sorted(_MODES), help="dynamics mode")
    p.add_argument("--n", dest="n_agents", type=int, metavar="N", help="agent count")
    p.add_argument("--j", dest="j_phys", type=float, help="trade coupling J")
    p.add_argument("--sigma", dest="sigma_phys", type=float, help="noise scale sigma")
    p.add_argument("--epsilon", type=float, help="time step epsilon")
    p.add_argument("--a", dest="a_add", type=float, help="link-creation rate a")
    p.add_argument("--r", dest="r_remove", type=float, help="link-removal rate r")
    p.add_argument(
        "--beta", type=float, help="sets a = beta * r (conflicts with --a)"
    )
    p.add_argument("--wmin", dest="w_min", type=float, help="wealth floor (0 = off)")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument(
        "--sweeps",
        dest="total_geometry_sweeps",
        type=int,
        help="total geometry sweeps",
    )
    p.add_argument(
        "--burn-in",
        dest="burn_in_geometry_sweeps",
        type=int,
        help="geometry sweeps discarded before recording",
    )
    p.add_argument(
        "--record-every", dest="record_every", type=int, help="record cadence"
    )
    p.add_argument(
        "--sweeps-per",
        dest="sweeps_per",
        type=int,
        help="wealth sweeps per geometry sweep",
    )
    p.add_argument(
        "--initial-graph",
        dest="initial_graph",
        choices=("stationary", "edgeless"),
        help="starting graph for evolving-graph modes",
    )
    p.add_argument(
        "--topology",
        dest="graph_topology",
        choices=("erdos_renyi", "regular", "scale_free", "complete"),
        help="quenched-net graph generator",
    )
    p.add_argument(
        "--mean-degree",
        dest="graph_mean_degree",
        type=float,
        help="generator mean degree",
    )
    p.add_argument(
        "--graph-mu",
        dest="graph_tail_exponent",
        type=float,
        help="scale-free degree tail exponent mu",
    )
    p.add_argument(
        "--weights-mu",
        dest="weights_tail_exponent",
        type=float,
        help="quenched-wealth Pareto exponent mu",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wealthnet",
        description="Monte-Carlo simulator of coupled wealth/link dynamics "
        "on adaptive trading networks.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    p_run = sub.add_parser("run", help="run a single simulation")
    _add_config_flags(p_run)
    p_run.add_argument("--out", metavar="DIR", required=True, help="output directory")

    p_ens = sub.add_parser("ensemble", help="run replicas and aggregate")
    _add_config_flags(p_ens)
    p_ens.add_argument("--replicas", type=int, default=4, help="replica count")
    p_ens.add_argument("--workers", type=int, default=1, help="worker processes")
    p_ens.add_argument("--out", metavar="DIR", required=True, help="output directory")

    p_scan = sub.add_parser("scan", help="1-D parameter grid of ensembles")
    _add_config_flags(p_scan)
    p_scan.add_argument(
        "--param",
        required=True,
        choices=("j_phys", "a_add", "beta"),
        help="parameter to sweep",
    )
    p_scan.add_argument(
        "--values",
        required=True,
        metavar="V1,V2,...",
        help="comma-separated grid values",
    )
    p_scan.add_argument("--replicas", type=int, default=4, help="replica count")
    p_scan.add_argument("--workers", type=int, default=1, help="worker processes")
    p_scan.add_argument("--out", metavar="DIR", required=True, help="output directory")

    p_fit = sub.add_parser("fit", help="re-fit a histogram CSV over a new range")
    p_fit.add_argument("--input", metavar="PATH", required=True, help="histogram CSV")
    p_fit.add_argument("--lo", type=float, required=True, help="fit range lower edge")
    p_fit.add_argument("--hi", type=float, required=True, help="fit range upper edge")

    return parser


def _build_config(args):
    values = {}
    if args.config is not None:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        values, _ = _parse_text(text)

    if args.beta is not None and args.a_add is not None:
        raise ConfigError("--beta conflicts with --a (both set the creation rate)")
    if args.mode is not None:
        values["mode"] = _MODES[args.mode]
    for dest, field in _OVERRIDES:
        v = getattr(args, dest, None)
        if v is not None:
            values[field] = v
    if args.beta is not None:
        r = values.get("r_remove", SimConfig.__dataclass_fields__["r_remove"].default)
        values["a_add"] = args.beta * float(r)
    if "n_agents" not in values:
        raise ConfigError("n_agents is required (--n or a config file)")
    config = SimConfig(**values)
    config.validate()
    return config


def _print_summary(res):
    for name in ("y2_wealth", "mean_degree", "wealth_slope", "degree_slope"):
        mean, stderr, n = res.summary[name]
        print(
            f"{name}: mean={format_real(mean)} stderr={format_real(stderr)} n={n}"
        )


def _cmd_run(args):
    config = _build_config(args)
    out = run_simulation(config)
    write_run_output(out, args.out)
    n_rec = out.sweep.size
    y2 = format_real(out.y2_wealth.mean()) if n_rec else "nan"
    links = format_real(out.links.mean()) if n_rec else "nan"
    print(f"backend: {backend.name()}")
    print(f"recorded {n_rec} observations; mean y2={y2} mean links={links}")
    if out.wealth_fit is not None:
        print(f"wealth tail slope: {format_real(out.wealth_fit.slope)}")
    if out.degree_fit is not None:
        print(f"degree tail slope: {format_real(out.degree_fit.slope)}")
    print(f"wrote {args.out}")
    return 0


def _cmd_ensemble(args):
    config = _build_config(args)
    res = ensemble_run(config, args.replicas, args.workers, args.out)
    _print_summary(res)
    print(f"wrote {args.out}")
    return 0


def _cmd_scan(args):
    config = _build_config(args)
    try:
        grid = [float(tok) for tok in args.values.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values entry: {exc}") from exc
    if not grid:
        raise ConfigError("--values must list at least one number")
    points = parameter_scan(config, args.param, grid, args.replicas, args.workers,
                            args.out)
    for value, res in points:
        y2_mean, y2_err, _ = res.summary["y2_wealth"]
        print(
            f"{args.param}={format_real(value)}: "
            f"y2={format_real(y2_mean)} stderr={format_real(y2_err)}"
        )
    print(f"wrote {args.out}")
    return 0


def _cmd_fit(args):
    if not 0.0 < args.lo < args.hi:
        raise ConfigError(f"need 0 < lo < hi, got [{args.lo}, {args.hi}]")
    hist = read_histogram_csv(args.input)
    fit = fit_power_law_tail(hist, args.lo, args.hi)
    print(
        f"slope={format_real(fit.slope)} stderr={format_real(fit.stderr)} "
        f"range=[{format_real(fit.fit_range[0])},{format_real(fit.fit_range[1])}] "
        f"bins={fit.n_bins_used}"
    )
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "ensemble": _cmd_ensemble,
    "scan": _cmd_scan,
    "fit": _cmd_fit,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors; bad
        # flags are configuration errors under this tool's exit contract.
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps to exit code
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
