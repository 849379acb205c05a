"""Command-line front end.

Subcommands write their results into ``--output-dir`` together with
``<command>.config.json``, the fully resolved parameters of the run.
Parameters come from, in increasing priority, built-in defaults, a JSON
file given with ``--config`` and explicit flags.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 golden mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import c_l1, c_trace, mqi_spectrum
from .dephasing import COMMON, INDEPENDENT, NoiseModel
from .errors import CoherenceError, GoldenMismatch, OrderOutOfRange, ParamOutOfRange, ParseError, UnknownExample
from .figures import (
    DEPHASING_FIGURES,
    FIG4_PHI,
    METROLOGY_FIGURES,
    dephasing_figure,
    dephasing_table,
    metrology_figure,
    metrology_sweep,
    render_plot,
    write_plot_script,
)
from .io import Table, check_goldens, read_state, write_table
from .metrology import PhaseEncoding, witness
from .operator_basis import n_qubits_of, order_grid
from .states import FAMILIES, StateFamilySpec, make_state

log = logging.getLogger("coherence_orders")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_GOLDEN = 0, 1, 2, 3
REPRODUCE_MC_TRAJ = 2000

_COMMON_DEFAULTS = {"output_dir": "out", "format": "csv", "seed": 7, "render": True}
_STATE_DEFAULTS = {"state": None, "n": 3, "p": None, "phi": None, "input": None}

DEFAULTS = {
    "decompose": {**_STATE_DEFAULTS},
    "dephase": {
        **_STATE_DEFAULTS,
        "state": "plus",
        "figure": None,
        "gamma": 10.0,
        "Gamma": 100.0,
        "couplings": [1.0],
        "topology": COMMON,
        "omega0": 0.0,
        "t_max": 0.5,
        "points": 100,
        "monte_carlo": 0,
        "dt": 1e-3,
    },
    "metrology": {**_STATE_DEFAULTS, "tau": math.pi / 6, "figure": None, "points": 101},
    "reproduce-all": {"monte_carlo": REPRODUCE_MC_TRAJ, "golden_dir": None, "update_goldens": False},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_ANGLE = re.compile(r"^\s*(?:([0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_angle(text) -> float:
    """Float or a multiple of pi such as ``pi/6`` or ``2pi/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE.match(str(text))
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_common(p):
    p.add_argument("--config", help="JSON file of parameters (flags override it)")
    p.add_argument("--output-dir", help="directory for results (default: out)")
    p.add_argument("--format", choices=("csv", "json"), help="table format (default: csv)")
    p.add_argument("--seed", type=int, help="master seed for Monte Carlo columns (default: 7)")
    p.add_argument(
        "--render",
        action=argparse.BooleanOptionalAction,
        help="render figure PNGs when matplotlib is available (default: on)",
    )


def _add_state(p):
    p.add_argument("--state", help=f"state family: {', '.join(FAMILIES)}")
    p.add_argument("--n", type=int, help="number of qubits (default: 3)")
    p.add_argument("--p", type=float, help="mixing weight for parametric families")
    p.add_argument("--phi", type=parse_angle, help="angle for parametric families (accepts pi/6)")
    p.add_argument("--in", dest="input", help="read the state from a matrix text file instead")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coherence-orders", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="per-order coherence table", argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_state(p)

    p = sub.add_parser("dephase", help="coherence decay under dephasing", argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_state(p)
    p.add_argument("--figure", choices=sorted(DEPHASING_FIGURES), help="use a stored parameter set")
    p.add_argument("--gamma", type=float, help="inverse correlation time, 1/s (default: 10)")
    p.add_argument("--Gamma", type=float, help="damping rate (default: 100)")
    p.add_argument("--couplings", type=_float_list, help="comma-separated coupling strengths")
    p.add_argument("--topology", choices=(COMMON, INDEPENDENT))
    p.add_argument("--omega0", type=float, help="qubit splitting, rad/s (default: 0)")
    p.add_argument("--t-max", type=float, help="last time point, s (default: 0.5)")
    p.add_argument("--points", type=int, help="number of time points (default: 100)")
    p.add_argument("--monte-carlo", type=int, metavar="N", help="add Monte Carlo columns from N trajectories")
    p.add_argument("--dt", type=float, help="Monte Carlo integration step (default: 1e-3)")

    p = sub.add_parser("metrology", help="metrology report or figure sweep", argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_state(p)
    p.add_argument("--tau", type=parse_angle, help="encoded phase (default: pi/6)")
    p.add_argument("--figure", choices=["4"] + [k for k in METROLOGY_FIGURES if k.startswith("A")], help="sweep a figure")
    p.add_argument("--points", type=int, help="sweep points (default: 101)")

    p = sub.add_parser("reproduce-all", help="regenerate every figure and compare with goldens", argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--monte-carlo", type=int, metavar="N", help=f"trajectories for MC columns (default: {REPRODUCE_MC_TRAJ})")
    p.add_argument("--golden-dir", help="golden directory (default: the packaged goldens)")
    p.add_argument("--update-goldens", action="store_true", help="overwrite the goldens instead of comparing")
    return parser


# --------------------------------------------------------------------------
# configuration


def resolve_config(command: str, ns: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "verbose")}
    cfg = {**_COMMON_DEFAULTS, **DEFAULTS[command]}
    path = flags.pop("config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        cfg.update(loaded)
    cfg.update(flags)
    for key in ("phi", "tau"):
        if cfg.get(key) is not None:
            cfg[key] = parse_angle(cfg[key])
    if "couplings" in cfg:
        cfg["couplings"] = _float_list(cfg["couplings"])
    return cfg


def write_resolved(cfg: dict, command: str) -> Path:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    record = {k: v for k, v in cfg.items() if k != "output_dir"}
    record = {"command": command, "version": __version__, **record}
    path = out / f"{command}.config.json"
    path.write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")
    return path


def _state_from(cfg) -> tuple[np.ndarray, dict]:
    if cfg.get("input"):
        try:
            rho = read_state(cfg["input"])
        except OSError as exc:
            raise UsageError(f"cannot read {cfg['input']}: {exc}") from None
        return rho, {"input": str(cfg["input"])}
    if not cfg.get("state"):
        raise UsageError("give --state or --in")
    spec = StateFamilySpec(cfg["state"], n_qubits=cfg["n"], p=cfg.get("p"), phi=cfg.get("phi"))
    desc = {"state": spec.name, "n_qubits": spec.n_qubits}
    if spec.p is not None:
        desc["p"] = spec.p
    if spec.phi is not None:
        desc["phi"] = spec.phi
    return make_state(spec), desc


def _emit(table: Table, cfg: dict, plot: bool = False) -> list[Path]:
    out = Path(cfg["output_dir"])
    paths = [write_table(table, out, cfg["format"], __version__)]
    if plot:
        if cfg["format"] != "csv":
            # plot scripts read the CSV form
            paths.append(write_table(table, out, "csv", __version__))
        script = write_plot_script(table, out)
        paths.append(script)
        if cfg["render"]:
            png = render_plot(script)
            if png is None:
                log.warning("matplotlib not installed; wrote %s without rendering it", script.name)
            else:
                paths.append(png)
    return paths


# --------------------------------------------------------------------------
# commands


def cmd_decompose(cfg) -> list[Path]:
    rho, desc = _state_from(cfg)
    n = n_qubits_of(rho)
    grid = order_grid(n)
    i_m = mqi_spectrum(rho)
    rows = []
    for m in range(n + 1):
        trace = c_trace(rho, m) if m > 0 else math.nan
        rows.append((m, int(np.count_nonzero(grid == m)), c_l1(rho, m), trace, float(i_m[m])))
    table = Table("decompose", ["m", "n_m", "c_l1", "c_trace", "i_m"], rows, desc)
    return _emit(table, cfg)


def cmd_dephase(cfg) -> list[Path]:
    if cfg.get("figure"):
        table = dephasing_figure(cfg["figure"], cfg["monte_carlo"], cfg["seed"], cfg["dt"])
    else:
        rho, desc = _state_from(cfg)
        model = NoiseModel(cfg["gamma"], cfg["Gamma"], tuple(cfg["couplings"]), cfg["topology"], cfg["omega0"])
        if cfg["points"] < 1 or cfg["t_max"] < 0:
            raise UsageError("need --points >= 1 and --t-max >= 0")
        times = np.linspace(0.0, cfg["t_max"], cfg["points"])
        table = dephasing_table("dephase", rho, model, times, cfg["monte_carlo"], cfg["seed"], cfg["dt"], params=desc)
    return _emit(table, cfg, plot=True)


def _fig4_id(phi: float | None) -> str | None:
    for text, fig in FIG4_PHI.items():
        if phi is not None and abs(parse_angle(text) - phi) < 1e-12:
            return fig
    return None


def cmd_metrology(cfg) -> list[Path]:
    fig = cfg.get("figure")
    tau = cfg["tau"]
    if fig == "4":
        phi = cfg.get("phi")
        if phi is None:
            raise UsageError("--figure 4 needs --phi")
        fig_id = _fig4_id(phi)
        if fig_id is not None and cfg["points"] == METROLOGY_FIGURES[fig_id].n_points:
            table = metrology_figure(fig_id, tau)
        else:
            values = np.linspace(0.0, 1.0, cfg["points"])
            table = metrology_sweep("fig4", "ghz_family", "p", values, {"phi": phi}, tau, cfg["n"], params={"figure": "4"})
        return _emit(table, cfg, plot=True)
    if fig:
        spec = METROLOGY_FIGURES[fig]
        if cfg["points"] == spec.n_points:
            table = metrology_figure(fig, tau)
        else:
            values = np.linspace(spec.lo, spec.hi, cfg["points"])
            table = metrology_sweep(
                f"fig{fig}", spec.family, spec.sweep, values, dict(spec.fixed), tau, spec.n_qubits, params={"figure": fig}
            )
        return _emit(table, cfg, plot=True)
    rho, desc = _state_from(cfg)
    rep = witness(rho, PhaseEncoding.collective(n_qubits_of(rho), tau))
    rows = [(k, rep.to_dict()[k]) for k in ("n_qubits", "tau", "f_q", "s_tau", "b_mmax", "f_i", "f_i_mmax", "m_max")]
    rows += [(f"i_m[{m}]", v) for m, v in enumerate(rep.i_m)]
    rows += [(f"b_tau_m[{m}]", v) for m, v in enumerate(rep.b_tau_m)]
    rows += [("threshold", rep.threshold), ("witness_b", rep.witness_b), ("witness_fi", rep.witness_fi)]
    table = Table("metrology", ["quantity", "value"], rows, {**desc, "tau": tau})
    return _emit(table, cfg)


def default_golden_dir() -> Path:
    return Path(str(resources.files("coherence_orders") / "goldens"))


def reproduce_tables(mc_traj: int, seed: int) -> list[Table]:
    tables = [dephasing_figure(k, mc_traj, seed) for k in DEPHASING_FIGURES]
    tables += [metrology_figure(k) for k in METROLOGY_FIGURES]
    return tables


def cmd_reproduce_all(cfg) -> list[Path]:
    out = Path(cfg["output_dir"])
    paths = []
    produced = []
    for table in reproduce_tables(cfg["monte_carlo"], cfg["seed"]):
        log.info("writing %s", table.name)
        if cfg["format"] == "json":
            paths.append(write_table(table, out, "json", __version__))
        csv_path = write_table(table, out, "csv", __version__)
        produced.append(csv_path)
        paths += [csv_path] + _emit_plot_only(table, cfg)
    golden_dir = Path(cfg["golden_dir"]) if cfg.get("golden_dir") else default_golden_dir()
    if cfg["update_goldens"]:
        golden_dir.mkdir(parents=True, exist_ok=True)
        for p in produced:
            (golden_dir / p.name).write_text(p.read_text())
        log.info("updated %d goldens in %s", len(produced), golden_dir)
    else:
        check_goldens([(p, golden_dir / p.name) for p in produced])
    return paths


def _emit_plot_only(table: Table, cfg) -> list[Path]:
    script = write_plot_script(table, cfg["output_dir"])
    paths = [script]
    if cfg["render"]:
        png = render_plot(script)
        if png is not None:
            paths.append(png)
    return paths


COMMANDS = {
    "decompose": cmd_decompose,
    "dephase": cmd_dephase,
    "metrology": cmd_metrology,
    "reproduce-all": cmd_reproduce_all,
}

_USAGE_ERRORS = (UsageError, ParamOutOfRange, UnknownExample, ParseError, OrderOutOfRange, argparse.ArgumentTypeError, OSError)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(ns.command, ns)
        write_resolved(cfg, ns.command)
        for path in COMMANDS[ns.command](cfg):
            print(path)
    except GoldenMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GOLDEN
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CoherenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
