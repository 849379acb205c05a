"""State factories and density-matrix validation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import STATE_TOL
from .errors import InvalidState, ParamOutOfRange
from .linalg import as_square, hermiticity_error


def ket(bits: str) -> np.ndarray:
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def ghz_ket(n: int) -> np.ndarray:
    return (ket("0" * n) + ket("1" * n)) / math.sqrt(2)


def plus_ket(n: int) -> np.ndarray:
    return np.full(1 << n, 2 ** (-n / 2), dtype=complex)


def dicke_ket(n: int, k: int) -> np.ndarray:
    """Uniform superposition of all n-bit strings with k ones."""
    v = np.array([1.0 if bin(i).count("1") == k else 0.0 for i in range(1 << n)], dtype=complex)
    return v / np.linalg.norm(v)


def validate_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Return ``rho`` as an array, or raise :class:`InvalidState`.

    Checks Hermiticity, unit trace and positivity, each to ``tol``.
    """
    try:
        m = as_square(rho)
    except ValueError as exc:
        raise InvalidState(str(exc)) from exc
    herm = hermiticity_error(m)
    if herm > tol:
        raise InvalidState(f"state is not Hermitian (max |rho - rho^H| = {herm:.3e})")
    tr = np.trace(m)
    if abs(tr - 1) > tol:
        raise InvalidState(f"state trace is {tr.real:.12g}, expected 1")
    low = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if low < -tol:
        raise InvalidState(f"state is not positive semidefinite (min eigenvalue {low:.3e})")
    return m


@dataclass(frozen=True)
class StateFamilySpec:
    """Named state with its parameters.

    ``p`` is a mixing weight in [0, 1]; ``phi`` an angle. Families that do
    not use a parameter ignore it.
    """

    name: str
    n_qubits: int = 3
    p: float | None = None
    phi: float | None = None


def _need(value, label, lo, hi, family):
    if value is None:
        raise ParamOutOfRange(f"state {family!r} needs parameter {label}")
    if not (lo - 1e-15 <= value <= hi + 1e-15):
        raise ParamOutOfRange(f"{label}={value} outside [{lo}, {hi}] for state {family!r}")
    return float(value)


def _need_n(n, family, exact=None, minimum=1):
    if exact is not None and n != exact:
        raise ParamOutOfRange(f"state {family!r} is defined for {exact} qubits only")
    if n < minimum:
        raise ParamOutOfRange(f"state {family!r} needs at least {minimum} qubits")
    return n


def _example1(spec):
    phi = _need(spec.phi, "phi", 0, math.pi, spec.name)
    _need_n(spec.n_qubits, spec.name, exact=3)
    return projector(math.cos(phi) * ket("001") + math.sin(phi) * ghz_ket(3))


def _example2(spec):
    phi = _need(spec.phi, "phi", 0, math.pi, spec.name)
    _need_n(spec.n_qubits, spec.name, exact=3)
    return projector(math.cos(phi) * ket("000") + math.sin(phi) * dicke_ket(3, 2))


def _ghz_family(spec):
    n = _need_n(spec.n_qubits, spec.name, minimum=2)
    p = _need(spec.p, "p", 0, 1, spec.name)
    phi = _need(spec.phi, "phi", 0, math.pi / 2, spec.name)
    psi = math.cos(phi) * ghz_ket(n) + math.sin(phi) * ket("0" * (n - 1) + "1")
    d = 1 << n
    return (1 - p) / d * np.eye(d, dtype=complex) + p * projector(psi)


def _example3(spec):
    _need_n(spec.n_qubits, spec.name, exact=3)
    return _ghz_family(spec)


def _mix_with_ghz(first):
    def build(spec):
        _need_n(spec.n_qubits, spec.name, exact=3)
        p = _need(spec.p, "p", 0, 1, spec.name)
        return (1 - p) * projector(first) + p * projector(ghz_ket(3))

    return build


def _two_qubit(psi):
    def build(spec):
        _need_n(spec.n_qubits, spec.name, exact=2)
        return projector(psi)

    return build


_FIXED = {
    "ghz": lambda s: projector(ghz_ket(_need_n(s.n_qubits, s.name, minimum=1))),
    "plus": lambda s: projector(plus_ket(_need_n(s.n_qubits, s.name))),
    "w": lambda s: projector(dicke_ket(_need_n(s.n_qubits, s.name), 1)),
    "w_bar": lambda s: projector(dicke_ket(_need_n(s.n_qubits, s.name, minimum=2), s.n_qubits - 1)),
    "zero": lambda s: projector(ket("0" * _need_n(s.n_qubits, s.name))),
    "mixed": lambda s: np.eye(1 << _need_n(s.n_qubits, s.name), dtype=complex) / (1 << s.n_qubits),
    "bell_phi_plus": _two_qubit(ket("00") + ket("11")),
    "bell_phi_minus": _two_qubit(ket("00") - ket("11")),
    "bell_psi_plus": _two_qubit(ket("01") + ket("10")),
    "bell_psi_minus": _two_qubit(ket("01") - ket("10")),
    "phi_entangled": _two_qubit(ket("00") + ket("01") + ket("10") - ket("11")),
}

_PARAMETRIC = {
    "example1": _example1,
    "example2": _example2,
    "example3": _example3,
    "example4": _mix_with_ghz((ket("000") + ket("100")) / math.sqrt(2)),
    "example5": _mix_with_ghz(plus_ket(3)),
    "ghz_family": _ghz_family,
}

_TWO_QUBIT = {name for name in _FIXED if name.startswith("bell_") or name == "phi_entangled"}

FAMILIES = tuple(sorted(_FIXED) + sorted(_PARAMETRIC))


def make_state(spec: StateFamilySpec | str, **kwargs) -> np.ndarray:
    """Build a density matrix from a family name and parameters.

    Families:
        ``ghz``, ``plus`` (|+>^N), ``w`` (one excitation), ``w_bar`` (N-1
        excitations), ``zero``, ``mixed``, the four Bell states
        ``bell_{phi,psi}_{plus,minus}``, ``phi_entangled``
        ((|00> + |01> + |10> - |11>)/2), ``example1``..``example5`` and
        ``ghz_family`` ((1-p)/2^N + p |Psi><Psi| with
        |Psi> = cos(phi)|GHZ_N> + sin(phi)|0...01>).

    ``make_state("ghz", n_qubits=3)`` is shorthand for passing a spec; with
    a name, the two-qubit families default to ``n_qubits=2``.
    """
    if isinstance(spec, str):
        if spec in _TWO_QUBIT and "n_qubits" not in kwargs:
            kwargs["n_qubits"] = 2
        spec = StateFamilySpec(spec, **kwargs)
    elif kwargs:
        raise TypeError("keyword parameters are only accepted with a family name")
    if spec.n_qubits < 1:
        raise ParamOutOfRange("n_qubits must be positive")
    if spec.name in _FIXED:
        return _FIXED[spec.name](spec)
    if spec.name in _PARAMETRIC:
        return _PARAMETRIC[spec.name](spec)
    raise ParamOutOfRange(f"unknown state family {spec.name!r}; choose from {', '.join(FAMILIES)}")
