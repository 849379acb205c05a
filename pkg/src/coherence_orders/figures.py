"""Figure tables and their plot scripts.

Each figure is a :class:`~coherence_orders.io.Table`: the dephasing panels
hold normalised per-order l1 coherence against time, the metrology panels
hold the five figures of merit against the swept parameter. The plot
script for a figure is plain text; it only needs numpy and matplotlib at
the moment someone runs it, never at build or test time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .closed_forms import CLASSICAL_QFI
from .dephasing import COMMON, INDEPENDENT, NoiseModel, default_workers, evolve, monte_carlo_dephase
from .io import Table
from .metrology import PhaseEncoding, witness
from .states import StateFamilySpec, make_state

FIG4_TAU = math.pi / 6

# --------------------------------------------------------------------------
# dephasing


@dataclass(frozen=True)
class DephasingFigure:
    topology: str
    couplings: tuple[float, ...]
    t_max: float
    gamma: float = 10.0
    Gamma: float = 100.0
    n_points: int = 100
    state: str = "plus"
    n_qubits: int = 3


DEPHASING_FIGURES = {
    "3a": DephasingFigure(COMMON, (1.0,), 0.5),
    "3b": DephasingFigure(INDEPENDENT, (1.0, 0.8, 0.2), 1.0),
}


def _mc_grid(report: np.ndarray, dt: float) -> np.ndarray:
    """Uniform step ``dt`` grid merged with the report times."""
    fine = np.arange(0.0, report[-1] + dt / 2, dt)
    merged = np.union1d(fine, report)
    keep = np.concatenate([[True], np.diff(merged) > 1e-12])
    merged = merged[keep]
    # snap near-duplicates onto the exact report times
    idx = np.searchsorted(merged, report - 1e-12)
    merged[idx] = report
    return merged


def dephasing_table(
    name: str,
    rho,
    model: NoiseModel,
    times,
    mc_traj: int = 0,
    seed: int = 7,
    dt: float = 1e-3,
    workers: int | None = None,
    params: dict | None = None,
) -> Table:
    """Normalised C^l1_|m|(t) from the exact channel, plus optional MC columns."""
    times = np.asarray(times, dtype=float)
    res = evolve(rho, times, model)
    n = res.per_order_l1.shape[1] - 1
    data = {"t": times}
    for m in range(n + 1):
        data[f"c{m}"] = res.normalized[:, m]
    if mc_traj:
        mc = monte_carlo_dephase(rho, _mc_grid(times, dt), model, mc_traj, seed, report_times=times, workers=workers)
        for m in range(n + 1):
            data[f"mc_c{m}"] = mc.normalized[:, m]
        for m in range(n + 1):
            data[f"mc_se{m}"] = mc.stderr[:, m]
    p = dict(params or {})
    p.update(
        topology=model.topology,
        gamma=model.gamma,
        Gamma=model.Gamma,
        couplings=list(model.couplings),
        omega0=model.omega0,
        monte_carlo=int(mc_traj),
    )
    if mc_traj:
        p.update(seed=int(seed), dt=dt)
    return Table.from_arrays(name, data, p)


def dephasing_figure(fig_id: str, mc_traj: int = 0, seed: int = 7, dt: float = 1e-3, workers=None) -> Table:
    spec = DEPHASING_FIGURES[fig_id]
    model = NoiseModel(spec.gamma, spec.Gamma, spec.couplings, spec.topology)
    rho = make_state(spec.state, n_qubits=spec.n_qubits)
    times = np.linspace(0.0, spec.t_max, spec.n_points)
    params = {"figure": fig_id, "state": spec.state, "n_qubits": spec.n_qubits}
    return dephasing_table(f"fig{fig_id}", rho, model, times, mc_traj, seed, dt, workers, params)


# --------------------------------------------------------------------------
# metrology


METROLOGY_COLUMNS = ("f_q", "s_tau", "b_mmax", "f_i", "f_i_mmax", "m_max", "f_q_class")


@dataclass(frozen=True)
class MetrologyFigure:
    family: str
    sweep: str  # "p" or "phi"
    lo: float
    hi: float
    fixed: tuple = ()  # ((name, value), ...)
    n_points: int = 101
    n_qubits: int = 3


METROLOGY_FIGURES = {
    "4a": MetrologyFigure("ghz_family", "p", 0.0, 1.0, (("phi", 0.0),)),
    "4b": MetrologyFigure("ghz_family", "p", 0.0, 1.0, (("phi", math.pi / 6),)),
    "4c": MetrologyFigure("ghz_family", "p", 0.0, 1.0, (("phi", math.pi / 4),)),
    "4d": MetrologyFigure("ghz_family", "p", 0.0, 1.0, (("phi", math.pi / 3),)),
    "A1": MetrologyFigure("example1", "phi", 0.0, math.pi),
    "A2": MetrologyFigure("example2", "phi", 0.0, math.pi),
    "A4": MetrologyFigure("example4", "p", 0.0, 1.0),
    "A5": MetrologyFigure("example5", "p", 0.0, 1.0),
}

FIG4_PHI = {"0": "4a", "pi/6": "4b", "pi/4": "4c", "pi/3": "4d"}


def metrology_row(rho, tau: float) -> dict:
    rep = witness(rho, PhaseEncoding.collective(int(rho.shape[0]).bit_length() - 1, tau))
    return {
        "f_q": rep.f_q,
        "s_tau": rep.s_tau,
        "b_mmax": rep.b_mmax,
        "f_i": rep.f_i,
        "f_i_mmax": rep.f_i_mmax,
        "m_max": rep.m_max,
        "f_q_class": CLASSICAL_QFI,
    }


def metrology_sweep(
    name: str,
    family: str,
    sweep: str,
    values,
    fixed: dict,
    tau: float = FIG4_TAU,
    n_qubits: int = 3,
    workers: int | None = None,
    params: dict | None = None,
) -> Table:
    """Figures of merit along one parameter of a state family.

    Grid points are evaluated in parallel but collected in grid order.
    """
    values = [float(v) for v in values]

    def point(v):
        spec = StateFamilySpec(family, n_qubits=n_qubits, **{**fixed, sweep: v})
        return metrology_row(make_state(spec), tau)

    workers = workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(v) for v in values]
    data = {sweep: values}
    for c in METROLOGY_COLUMNS:
        data[c] = [r[c] for r in rows]
    p = dict(params or {})
    p.update(family=family, tau=tau, n_qubits=n_qubits, **fixed)
    return Table.from_arrays(name, data, p)


def metrology_figure(fig_id: str, tau: float = FIG4_TAU, workers=None) -> Table:
    spec = METROLOGY_FIGURES[fig_id]
    values = np.linspace(spec.lo, spec.hi, spec.n_points)
    return metrology_sweep(
        f"fig{fig_id}", spec.family, spec.sweep, values, dict(spec.fixed), tau, spec.n_qubits, workers, {"figure": fig_id}
    )


ALL_FIGURES = tuple(f"fig{k}" for k in DEPHASING_FIGURES) + tuple(f"fig{k}" for k in METROLOGY_FIGURES)


# --------------------------------------------------------------------------
# plot scripts

_DEPHASING_STYLE = [
    ("c0", r"$\tilde C_0$", "tab:green", "-"),
    ("c1", r"$\tilde C_1$", "black", "-"),
    ("c2", r"$\tilde C_2$", "tab:blue", "--"),
    ("c3", r"$\tilde C_3$", "tab:red", "-."),
]

_METROLOGY_STYLE = [
    ("f_q", r"$F_Q$", "tab:red", "-"),
    ("s_tau", r"$S_\tau$", "tab:blue", "--"),
    ("b_mmax", r"$B_{\tau,m_{max}}$", "black", "-."),
    ("f_i", r"$F_I$", "tab:brown", ":"),
    ("f_i_mmax", r"$F_I^{m_{max}}$", "tab:pink", (0, (3, 5, 1, 5))),
    ("f_q_class", r"$F_Q$ of $|{+}{+}{+}\rangle$", "gray", ":"),
]

_SCRIPT = '''"""Plot {name}.csv to {name}.png. Needs numpy and matplotlib."""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
SERIES = {series!r}
XLABEL = {xlabel!r}
YLABEL = {ylabel!r}


def load(path):
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    cols = lines[0].split(",")
    data = np.atleast_2d(np.loadtxt(lines[1:], delimiter=","))
    return {{c: data[:, i] for i, c in enumerate(cols)}}


def main():
    d = load(HERE / "{name}.csv")
    x = d["{x}"]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for col, label, color, ls in SERIES:
        if col not in d:
            continue
        ax.plot(x, d[col], color=color, ls=ls, label=label)
        mc = d.get("mc_" + col)
        if mc is not None:
            se = d["mc_se" + col[1:]]
            ax.errorbar(x[::5], mc[::5], yerr=se[::5], fmt="o", ms=2.5, color=color, lw=0.8)
    ax.set_xlabel(XLABEL)
    ax.set_ylabel(YLABEL)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(HERE / "{name}.png", dpi=120, metadata={{"Software": None}})
    plt.close(fig)


if __name__ == "__main__":
    main()
'''


def plot_script(table: Table) -> str:
    x = table.columns[0]
    if x == "t":
        series, xlabel, ylabel = _DEPHASING_STYLE, "t (s)", "normalised coherence"
    else:
        series, xlabel, ylabel = _METROLOGY_STYLE, {"p": "p", "phi": r"$\phi$"}.get(x, x), "information"
    return _SCRIPT.format(name=table.name, series=series, x=x, xlabel=xlabel, ylabel=ylabel)


def write_plot_script(table: Table, out_dir) -> Path:
    path = Path(out_dir) / f"plot_{table.name}.py"
    path.write_text(plot_script(table))
    return path


def render_plot(script_path) -> Path | None:
    """Run a generated plot script in-process; ``None`` if matplotlib is absent."""
    try:
        import matplotlib  # noqa: F401
    except ImportError:
        return None
    script_path = Path(script_path)
    code = compile(script_path.read_text(), str(script_path), "exec")
    exec(code, {"__name__": "__main__", "__file__": str(script_path)})
    return script_path.with_name(script_path.stem.removeprefix("plot_") + ".png")
