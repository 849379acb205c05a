"""Phase-estimation figures of merit and the coherence-order witness.

The phase ``tau`` is imprinted by U = exp(-i tau H) with H diagonal in the
computational basis, by default the collective Z = sum_l I_z^(l). Under H
the matrix element |r><c| winds with order ``h_r - h_c``, which for the
collective Z is the coherence order of :mod:`coherence_orders.coherence`.

The QFI is normalised so that a pure state gives Var(H), a quarter of the
other common convention; multiply by :data:`~coherence_orders.constants.GHR_QFI_FACTOR`
to convert. With this normalisation a value above N/4 certifies
entanglement-enhanced precision.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .constants import MQI_EPS, QFI_CUTOFF
from .errors import OrderOutOfRange, ZeroTau
from .linalg import hermitian_eig
from .states import validate_state


@dataclass(frozen=True)
class PhaseEncoding:
    """Diagonal generator (stored as its diagonal) and encoded phase."""

    generator: np.ndarray
    phase_tau: float

    def __post_init__(self):
        g = np.asarray(self.generator)
        if g.ndim == 2:
            if np.any(g != np.diag(np.diag(g))):
                raise ValueError("only generators diagonal in the computational basis are supported")
            g = np.diag(g)
        g = np.real_if_close(g).astype(float)
        if np.any(np.abs(2 * g - np.round(2 * g)) > 1e-12):
            raise ValueError("generator eigenvalues must be half-integers")
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "phase_tau", float(self.phase_tau))

    @classmethod
    def collective(cls, n_qubits: int, tau: float) -> "PhaseEncoding":
        weights = np.array([bin(i).count("1") for i in range(1 << n_qubits)])
        return cls(n_qubits / 2 - weights, tau)

    @property
    def n_qubits(self) -> int:
        return int(self.generator.size).bit_length() - 1

    def order_grid(self) -> np.ndarray:
        g = self.generator
        return np.rint(g[:, None] - g[None, :]).astype(int)

    def max_order(self) -> int:
        return int(np.rint(np.ptp(self.generator)))

    def rotate(self, rho, tau: float | None = None) -> np.ndarray:
        t = self.phase_tau if tau is None else tau
        ph = np.exp(-1j * t * self.generator)
        return ph[:, None] * rho * ph.conj()[None, :]


def _encoding_for(rho: np.ndarray, enc: PhaseEncoding | None, tau: float = 0.0) -> PhaseEncoding:
    if enc is None:
        return PhaseEncoding.collective(int(rho.shape[0]).bit_length() - 1, tau)
    if enc.generator.size != rho.shape[0]:
        raise ValueError("generator and state dimensions differ")
    return enc


def qfi(rho0, enc: PhaseEncoding, eig_method: str = "lapack") -> float:
    """Quantum Fisher information of rho_tau = U rho0 U^H.

    F_Q = 1/2 sum_{q_n + q_m > cutoff} (q_n - q_m)^2 |H_nm|^2 / (q_n + q_m),
    evaluated in the eigenbasis of rho_tau.
    """
    r = validate_state(rho0)
    enc = _encoding_for(r, enc)
    rt = enc.rotate(r)
    q, v = hermitian_eig(0.5 * (rt + rt.conj().T), method=eig_method)
    h = v.conj().T @ (enc.generator[:, None] * v)
    qs = q[:, None] + q[None, :]
    keep = qs > QFI_CUTOFF
    num = (q[:, None] - q[None, :]) ** 2 * np.abs(h) ** 2
    return 0.5 * float(np.sum(num[keep] / qs[keep]))


def generator_variance(psi, enc: PhaseEncoding) -> float:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    p = np.abs(psi) ** 2
    mean = float(p @ enc.generator)
    return float(p @ enc.generator**2) - mean**2


def _require_tau(enc: PhaseEncoding) -> float:
    if enc.phase_tau == 0:
        raise ZeroTau("phase_tau must be non-zero")
    return enc.phase_tau


def squared_speed(rho0, enc: PhaseEncoding) -> float:
    """(Tr rho0^2 - Tr(rho_tau rho0)) / tau^2.

    For a diagonal generator the bracket splits exactly into the per-order
    terms of :func:`b_term`, which are summed here instead of subtracting
    two nearly equal traces (that would lose ~eps / tau^2 at small tau).
    Summing non-negative terms also keeps ``b_term(m) <= squared_speed``
    exact in floating point.
    """
    r = validate_state(rho0)
    enc = _encoding_for(r, enc)
    tau = _require_tau(enc)
    i = intensities(r, enc)
    return float(sum(_b(i[m], m, tau) for m in range(1, i.size)))


def intensities(rho0, enc: PhaseEncoding | None = None) -> np.ndarray:
    """Multiple-quantum intensities I_m = ||rho_m||_2^2 for m = 0..max order."""
    r = np.asarray(rho0, dtype=complex)
    enc = _encoding_for(r, enc)
    grid = enc.order_grid()
    sq = np.abs(r) ** 2
    return np.array([float(sq[grid == m].sum()) for m in range(enc.max_order() + 1)])


def _check_m(m: int, enc: PhaseEncoding) -> None:
    if not 0 <= m <= enc.max_order():
        raise OrderOutOfRange(f"order {m} outside [0, {enc.max_order()}]")


def b_term(rho0, enc: PhaseEncoding, m: int) -> float:
    """Order-m share of the squared speed, (2/tau^2)(1 - cos(m tau)) I_m."""
    r = validate_state(rho0)
    enc = _encoding_for(r, enc)
    tau = _require_tau(enc)
    _check_m(m, enc)
    return _b(intensities(r, enc)[m], m, tau)


def _b(i_m: float, m: int, tau: float) -> float:
    # 2 (1 - cos x) == 4 sin^2(x / 2), without the cancellation at small x
    return 4.0 * math.sin(m * tau / 2) ** 2 / tau**2 * i_m


def f_i(rho0, enc: PhaseEncoding | None = None) -> float:
    """sum_m m^2 I_m, a lower bound on the QFI."""
    r = validate_state(rho0)
    i = intensities(r, enc)
    return float(np.sum(np.arange(i.size) ** 2 * i))


def f_i_m(rho0, m: int, enc: PhaseEncoding | None = None) -> float:
    r = validate_state(rho0)
    enc = _encoding_for(r, enc)
    _check_m(m, enc)
    return m * m * float(intensities(r, enc)[m])


def highest_order(i_m) -> int:
    nz = [m for m, v in enumerate(i_m) if v > MQI_EPS]
    return max(nz) if nz else 0


@dataclass
class MetrologyReport:
    n_qubits: int
    tau: float
    f_q: float
    s_tau: float
    i_m: np.ndarray
    b_tau_m: np.ndarray
    f_i: float
    f_i_mmax: float
    m_max: int
    witness_b: bool
    witness_fi: bool
    threshold: float

    @property
    def b_mmax(self) -> float:
        return float(self.b_tau_m[self.m_max])

    def to_dict(self) -> dict:
        d = asdict(self)
        d["i_m"] = [float(x) for x in self.i_m]
        d["b_tau_m"] = [float(x) for x in self.b_tau_m]
        d["b_mmax"] = self.b_mmax
        return d


def witness(rho0, enc: PhaseEncoding) -> MetrologyReport:
    """Full metrology report with the highest-order witness.

    The witness is sufficient only: ``witness_b`` or ``witness_fi`` being
    true certifies precision beyond N/4, false says nothing.
    """
    r = validate_state(rho0)
    enc = _encoding_for(r, enc)
    tau = _require_tau(enc)
    n = enc.n_qubits
    i = intensities(r, enc)
    orders = np.arange(i.size)
    b = np.array([_b(i[m], m, tau) for m in orders])
    m_max = highest_order(i)
    f_i_mmax = m_max * m_max * float(i[m_max])
    threshold = n / 4
    return MetrologyReport(
        n_qubits=n,
        tau=tau,
        f_q=qfi(r, enc),
        s_tau=squared_speed(r, enc),
        i_m=i,
        b_tau_m=b,
        f_i=float(np.sum(orders**2 * i)),
        f_i_mmax=f_i_mmax,
        m_max=m_max,
        witness_b=bool(m_max > 0 and b[m_max] > threshold),
        witness_fi=bool(m_max > 0 and f_i_mmax > threshold),
        threshold=threshold,
    )
