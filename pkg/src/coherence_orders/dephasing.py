"""Collective-Z Gaussian dephasing.

A qubit register precesses at ``omega0`` while a classical Gaussian field
B_l(t) shifts each qubit's phase by ``lambda_l * integral(B_l)``. Averaging
over the field gives exact channels:

* common bath (one field for all qubits): the order-m component is scaled by
  exp(-i m omega0 t) * exp(-m^2 lambda^2 beta(t));
* independent baths: every product-operator coefficient is scaled by
  exp(-i m omega0 t) * exp(-sum_l [letter_l in {+,-}] lambda_l^2 beta_l(t)).

``beta(t) = 1/2 int_0^t int_0^t K(s - s') ds ds'``. For the Ornstein-Uhlenbeck
field used here beta(t) = Gamma / (2 gamma^2) (gamma t + exp(-gamma t) - 1),
which is what K(u) = (Gamma / 2) exp(-gamma |u|) integrates to.

:func:`monte_carlo_dephase` samples the field directly and serves as an
independent check on both channels.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .coherence import c_l1, decompose
from .errors import EmptyGrid, NegativeTime, ParamOutOfRange, TopologyMismatch
from .linalg import as_square
from .operator_basis import ALPHABET, coefficient_tensor, n_qubits_of, tensor_to_matrix

COMMON = "common"
INDEPENDENT = "independent"
THREADS_ENV = "COHERENCE_ORDERS_THREADS"


@dataclass(frozen=True)
class OUKernel:
    """Ornstein-Uhlenbeck autocorrelation (Gamma / 2) exp(-gamma |u|).

    ``gamma`` is the inverse correlation time (1/s) and ``Gamma`` the damping
    rate. The normalisation is fixed by the closed form of :meth:`beta`; the
    often quoted (Gamma gamma / 2) exp(-gamma |u|) would make beta larger by
    a factor gamma.
    """

    gamma: float
    Gamma: float

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ParamOutOfRange(f"gamma must be positive, got {self.gamma}")
        if not (self.Gamma >= 0 and math.isfinite(self.Gamma)):
            raise ParamOutOfRange(f"Gamma must be non-negative, got {self.Gamma}")

    @property
    def variance(self) -> float:
        return 0.5 * self.Gamma

    def __call__(self, u):
        return self.variance * np.exp(-self.gamma * np.abs(u))

    def beta(self, t: float) -> float:
        x = self.gamma * t
        if x < 1e-4:
            # x + exp(-x) - 1 loses digits to cancellation here
            g = x * x / 2 - x**3 / 6 + x**4 / 24
        else:
            g = x + math.expm1(-x)
        return self.Gamma / (2 * self.gamma**2) * g


@dataclass(frozen=True)
class GenericKernel:
    """Stationary autocorrelation given as an even callable K(u)."""

    fn: Callable[[float], float]

    def __call__(self, u):
        return self.fn(u)

    def beta(self, t: float) -> float:
        # The double integral of K(s - s') over [0, t]^2 reduces to
        # 2 * int_0^t (t - u) K(u) du for an even kernel.
        if t == 0:
            return 0.0
        val, _ = integrate.quad(lambda u: (t - u) * self.fn(u), 0.0, t, epsabs=0.0, epsrel=1e-10, limit=200)
        return float(val)


def beta(t: float, kernel) -> float:
    """Dephasing exponent beta(t) for a kernel or a :class:`NoiseModel`."""
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if isinstance(kernel, NoiseModel):
        kernel = kernel.kernel
    return kernel.beta(float(t))


def beta_quadrature(t: float, kernel: Callable[[float], float]) -> float:
    """beta(t) by adaptive 2-D quadrature of the kernel, no shortcuts."""
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if t == 0:
        return 0.0
    # Integrate the triangles on either side of s = s' separately: kernels
    # such as exp(-|u|) have a kink on the diagonal that stalls a single
    # adaptive pass over the square.
    f = lambda sp, s: kernel(s - sp)  # noqa: E731
    lower, _ = integrate.dblquad(f, 0.0, t, 0.0, lambda s: s, epsabs=0.0, epsrel=1e-11)
    upper, _ = integrate.dblquad(f, 0.0, t, lambda s: s, t, epsabs=0.0, epsrel=1e-11)
    return 0.5 * float(lower + upper)


@dataclass(frozen=True)
class NoiseModel:
    """Dephasing environment.

    Attributes:
        gamma: inverse noise correlation time (1/s).
        Gamma: damping rate ((rad/s)^2).
        couplings: per-qubit coupling strengths lambda_l.
        topology: ``"common"`` or ``"independent"``.
        omega0: qubit splitting (rad/s).
        kernels: optional per-qubit kernels for independent baths; default is
            the same OU kernel on every qubit.
    """

    gamma: float
    Gamma: float
    couplings: tuple[float, ...] = (1.0,)
    topology: str = COMMON
    omega0: float = 0.0
    kernels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        if not all(math.isfinite(c) for c in self.couplings):
            raise ParamOutOfRange("couplings must be finite")
        if self.topology not in (COMMON, INDEPENDENT):
            raise ParamOutOfRange(f"unknown topology {self.topology!r}")
        if not math.isfinite(self.omega0):
            raise ParamOutOfRange("omega0 must be finite")
        OUKernel(self.gamma, self.Gamma)  # validates
        if self.kernels is not None:
            object.__setattr__(self, "kernels", tuple(self.kernels))

    @property
    def kernel(self) -> OUKernel:
        return OUKernel(self.gamma, self.Gamma)

    def couplings_for(self, n_qubits: int) -> np.ndarray:
        lam = np.asarray(self.couplings, dtype=float)
        if lam.size == 1:
            return np.full(n_qubits, lam[0])
        if lam.size != n_qubits:
            raise ParamOutOfRange(f"{lam.size} couplings given for {n_qubits} qubits")
        return lam

    def bath_kernels(self, n_qubits: int) -> list:
        if self.topology == COMMON:
            return [self.kernel]
        if self.kernels is None:
            return [self.kernel] * n_qubits
        if len(self.kernels) != n_qubits:
            raise ParamOutOfRange(f"{len(self.kernels)} kernels given for {n_qubits} qubits")
        return list(self.kernels)


@dataclass
class DephasingResult:
    times: np.ndarray
    states: np.ndarray  # (T, d, d)
    per_order_l1: np.ndarray  # (T, N+1), column m holds C^l1_|m|
    normalized: np.ndarray  # per_order_l1 / per_order_l1[t=0]; nan where the order is empty
    stderr: np.ndarray | None = None  # standard errors of ``normalized`` (Monte Carlo only)
    n_traj: int | None = None
    patterns: np.ndarray | None = None  # (P, N) winding vectors
    pattern_mean: np.ndarray | None = None  # (T, P) complex
    pattern_stderr: np.ndarray | None = None  # (T, P, 2) real/imag standard errors
    extra: dict = field(default_factory=dict)


def apply_common(rho, t: float, model: NoiseModel) -> np.ndarray:
    """Common-bath channel: scale order m by exp(-i m w0 t - m^2 lambda^2 beta)."""
    if model.topology != COMMON:
        raise TopologyMismatch("apply_common needs a common-bath model")
    r = as_square(rho)
    n = n_qubits_of(r)
    lam = model.couplings_for(n)
    if np.ptp(lam) > 0:
        raise ParamOutOfRange("a common bath needs equal couplings on every qubit")
    b = beta(t, model.kernel)
    dec = decompose(r)
    out = np.zeros_like(r)
    for m in dec.orders:
        out += np.exp(-1j * m * model.omega0 * t - m * m * lam[0] ** 2 * b) * dec[m]
    return out


def independent_decay_tensor(n: int, t: float, model: NoiseModel) -> np.ndarray:
    """Per-label factor of the independent-bath channel, shape ``(4,) * n``."""
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    lam = model.couplings_for(n)
    kernels = model.bath_kernels(n)
    letter_order = np.array([{"0": 0, "+": 1, "-": -1, "z": 0}[c] for c in ALPHABET])
    out = np.ones((4,) * n, dtype=complex)
    for l in range(n):
        rate = lam[l] ** 2 * kernels[l].beta(t)
        site = np.exp(-1j * letter_order * model.omega0 * t - np.abs(letter_order) * rate)
        shape = [1] * n
        shape[l] = 4
        out = out * site.reshape(shape)
    return out


def apply_independent(rho, t: float, model: NoiseModel) -> np.ndarray:
    """Independent-bath channel, applied coefficient by coefficient."""
    if model.topology != INDEPENDENT:
        raise TopologyMismatch("apply_independent needs an independent-bath model")
    r = as_square(rho)
    n = n_qubits_of(r)
    coeffs = coefficient_tensor(r)
    return tensor_to_matrix(coeffs * independent_decay_tensor(n, t, model))


def apply_channel(rho, t: float, model: NoiseModel) -> np.ndarray:
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if model.topology == COMMON:
        return apply_common(rho, t, model)
    return apply_independent(rho, t, model)


def l1_table(rho) -> np.ndarray:
    """C^l1_|m| for m = 0..N."""
    r = as_square(rho)
    n = n_qubits_of(r)
    return np.array([c_l1(r, m) for m in range(n + 1)])


def _normalize(table: np.ndarray, initial: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(initial > 0, table / np.where(initial > 0, initial, 1.0), np.nan)


def evolve(rho, times: Sequence[float], model: NoiseModel) -> DephasingResult:
    """Analytic channel evaluated on a time grid."""
    r = as_square(rho)
    ts = np.asarray(times, dtype=float)
    if ts.size == 0:
        raise EmptyGrid("empty time grid")
    states = np.array([apply_channel(r, float(t), model) for t in ts])
    table = np.array([l1_table(s) for s in states])
    return DephasingResult(ts, states, table, _normalize(table, l1_table(r)))


# --------------------------------------------------------------------------
# Monte Carlo


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _pairwise_sum(parts: list):
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


class _Sampler:
    """Shared machinery for one Monte Carlo run."""

    def __init__(self, rho, grid, report_idx, model, seed):
        self.n = n_qubits_of(rho)
        self.grid = grid
        self.report_idx = report_idx
        self.model = model
        self.seed = seed
        self.lam = model.couplings_for(self.n)
        self.kernels = model.bath_kernels(self.n)
        dt = np.diff(grid)
        self.decay = np.array([np.exp(-k.gamma * dt) for k in self.kernels])  # (baths, steps)
        self.sigma = np.array([math.sqrt(k.variance) for k in self.kernels])
        self.dt = dt
        # qubit l listens to bath l (independent) or bath 0 (common)
        self.bath_of = np.arange(self.n) if model.topology == INDEPENDENT else np.zeros(self.n, dtype=int)

    def phases(self, start: int, stop: int) -> np.ndarray:
        """phi_l(t) at the report times, shape (chunk, T, N)."""
        n_b, n_t = len(self.kernels), self.grid.size
        draws = [_trajectory_rng(self.seed, k).standard_normal((n_t, n_b)) for k in range(start, stop)]
        xi = np.ascontiguousarray(np.stack(draws, axis=1))  # time-major: (steps, chunk, baths)
        b = np.empty_like(xi)
        b[0] = self.sigma * xi[0]
        innov = self.sigma[None, :] * np.sqrt(-np.expm1(-2 * np.array([k.gamma for k in self.kernels])[None, :] * self.dt[:, None]))
        for j in range(n_t - 1):
            np.multiply(b[j], self.decay[:, j], out=b[j + 1])
            b[j + 1] += innov[j] * xi[j + 1]
        h = np.zeros_like(b)
        h[1:] = np.cumsum(0.5 * (b[1:] + b[:-1]) * self.dt[:, None, None], axis=0)
        h = h[self.report_idx].transpose(1, 0, 2)  # (chunk, T, baths)
        t_rep = self.grid[self.report_idx]
        return self.model.omega0 * t_rep[None, :, None] + self.lam[None, None, :] * h[:, :, self.bath_of]


def monte_carlo_dephase(
    rho,
    t_grid: Sequence[float],
    model: NoiseModel,
    n_traj: int,
    seed: int,
    report_times: Sequence[float] | None = None,
    workers: int | None = None,
    chunk_size: int = 512,
) -> DephasingResult:
    """Trajectory average of the dephasing channel.

    OU paths are sampled with the exact AR(1) update on ``t_grid`` (which is
    prefixed with 0 if needed), integrated by the trapezoid rule, and the
    resulting rotations averaged. Trajectory ``k`` draws from its own Philox
    stream keyed by ``(seed, k)`` and chunks are reduced in a fixed order,
    so results do not depend on ``workers``.

    Standard errors of C^l1_|m| come from linearising the l1 estimator
    around the sample mean; a second pass regenerates the same paths to
    accumulate them.

    Args:
        rho: initial density matrix.
        t_grid: integration grid (s), increasing.
        model: noise model.
        n_traj: number of trajectories (>= 1).
        seed: master seed.
        report_times: subset of ``t_grid`` at which to report; default all.
        workers: thread count; default from ``COHERENCE_ORDERS_THREADS`` or 1.
        chunk_size: trajectories per work unit.
    """
    r = as_square(rho)
    n = n_qubits_of(r)
    grid = np.asarray(t_grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("empty time grid")
    if n_traj < 1:
        raise ParamOutOfRange("n_traj must be at least 1")
    if np.any(grid < 0):
        raise NegativeTime("time grid has negative entries")
    if np.any(np.diff(grid) <= 0):
        raise ParamOutOfRange("time grid must be strictly increasing")
    if grid[0] > 0:
        grid = np.concatenate([[0.0], grid])
    if report_times is None:
        rep = np.asarray(t_grid, dtype=float)
    else:
        rep = np.asarray(report_times, dtype=float)
    report_idx = np.searchsorted(grid, rep)
    if np.any(report_idx >= grid.size) or not np.allclose(grid[np.minimum(report_idx, grid.size - 1)], rep, rtol=0, atol=1e-12):
        raise ParamOutOfRange("report_times must be points of t_grid")
    workers = workers or default_workers()

    # Winding patterns w = bits(c) - bits(r) present in rho.
    bits = (np.arange(1 << n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    wind = bits[None, :, :] - bits[:, None, :]  # (d, d, N) indexed [r, c]
    nonzero = r != 0
    patterns, elem_pat = np.unique(wind.reshape(-1, n), axis=0, return_inverse=True)
    elem_pat = elem_pat.reshape(r.shape)
    used = np.unique(elem_pat[nonzero])
    patterns = patterns[used]
    remap = np.full(int(elem_pat.max()) + 1, -1)
    remap[used] = np.arange(used.size)
    elem_pat = remap[elem_pat]

    # Pattern weights c_w = 1/2 sum |a_L| over labels with that winding.
    coeffs = coefficient_tensor(r)
    letter_w = np.array([{"0": 0, "+": 1, "-": -1, "z": 0}[c] for c in ALPHABET])
    label_w = np.stack(np.meshgrid(*([letter_w] * n), indexing="ij"), axis=-1).reshape(-1, n)
    abs_a = np.abs(coeffs).reshape(-1)
    weight = np.zeros(patterns.shape[0])
    for i, w in enumerate(patterns):
        if np.any(w != 0):
            weight[i] = 0.5 * abs_a[np.all(label_w == w, axis=1)].sum()
    pat_order = np.abs(patterns.sum(axis=1))

    sampler = _Sampler(r, grid, report_idx, model, seed)
    starts = list(range(0, n_traj, chunk_size))

    def xi_chunk(start):
        stop = min(start + chunk_size, n_traj)
        # exp(-i w.phi) as a product of per-qubit phasors; w_l is -1, 0 or 1
        z = np.exp(-1j * sampler.phases(start, stop))  # (chunk, T, N)
        table = np.stack([z.conj(), np.ones_like(z), z], axis=-1)  # indexed by w_l + 1
        out = table[:, :, 0, patterns[:, 0] + 1]
        for l in range(1, n):
            out = out * table[:, :, l, patterns[:, l] + 1]
        return out  # (chunk, T, P)

    def run(fn):
        if workers > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, starts))
        return [fn(s) for s in starts]

    mean = _pairwise_sum(run(lambda s: xi_chunk(s).sum(axis=0))) / n_traj  # (T, P)
    mag = np.abs(mean)
    unit = np.where(mag > 0, mean / np.where(mag > 0, mag, 1.0), 1.0)

    def second(start):
        xi = xi_chunk(start)
        dev = xi - mean[None]
        proj = np.real(np.conj(unit)[None] * xi) * weight[None, None, :]  # (chunk, T, P)
        y = np.stack([proj[..., pat_order == m].sum(axis=-1) for m in range(n + 1)], axis=-1)
        return np.stack([dev.real**2, dev.imag**2], axis=-1).sum(axis=0), y

    parts = run(second)
    sq_pat = _pairwise_sum([p[0] for p in parts])
    per_order = np.stack([(weight * mag)[..., pat_order == m].sum(axis=-1) for m in range(n + 1)], axis=-1)
    ssq_y = _pairwise_sum([((p[1] - per_order[None]) ** 2).sum(axis=0) for p in parts])
    ddof = max(n_traj - 1, 1)
    se_order = np.sqrt(ssq_y / ddof / n_traj)
    se_pat = np.sqrt(sq_pat / ddof / n_traj)

    states = r[None] * mean[:, elem_pat]
    states[:, ~nonzero] = 0
    initial = l1_table(r)
    norm = _normalize(per_order, initial)
    with np.errstate(divide="ignore", invalid="ignore"):
        se_norm = np.where(initial > 0, se_order / np.where(initial > 0, initial, 1.0), np.nan)
    return DephasingResult(
        times=rep,
        states=states,
        per_order_l1=per_order,
        normalized=norm,
        stderr=se_norm,
        n_traj=n_traj,
        patterns=patterns,
        pattern_mean=mean,
        pattern_stderr=se_pat,
    )
