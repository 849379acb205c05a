"""NMR product-operator basis {I_0, I_+, I_-, I_z}^(x)N.

Labels are plain strings over the alphabet ``"0+-z"``, qubit 1 leftmost,
e.g. ``"+0z"``. The single-qubit generators are::

    I_0 = 1/2        I_+ = |0><1|      I_- = |1><0|      I_z = diag(1/2, -1/2)

They are orthogonal but not normalised: Tr(I_0^2) = Tr(I_z^2) = 1/2 while
Tr(I_+^H I_+) = 1. Coefficients are therefore extracted against the dual
basis, ``a = Tr(B^H rho) / nu`` with ``nu`` the product of those norms, so
that ``rho == sum(a * B)`` holds exactly.

Full expansions hold 4**N coefficients; N is capped at 10 (about 1e6
coefficients, 16 MB as complex128).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import MAX_QUBITS
from .errors import DimensionNotPowerOfTwo, OrderOutOfRange, ShapeMismatch
from .linalg import as_square, kron_all

ALPHABET = "0+-z"

I_0 = np.eye(2, dtype=complex) / 2
I_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
I_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
I_Z = np.diag([0.5, -0.5]).astype(complex)

SINGLE_QUBIT_BASIS = {"0": I_0, "+": I_PLUS, "-": I_MINUS, "z": I_Z}
LETTER_NORM = {"0": 0.5, "+": 1.0, "-": 1.0, "z": 0.5}
LETTER_ORDER = {"0": 0, "+": 1, "-": -1, "z": 0}

# Rows: letters in ALPHABET order; columns: flattened (row, col) of a 2x2 block.
_BASIS_FLAT = np.array([SINGLE_QUBIT_BASIS[c].ravel() for c in ALPHABET])
_DUAL_FLAT = np.array([SINGLE_QUBIT_BASIS[c].conj().ravel() / LETTER_NORM[c] for c in ALPHABET])
_ORDER_VEC = np.array([LETTER_ORDER[c] for c in ALPHABET])
_ACTIVE_VEC = np.array([c in "+-" for c in ALPHABET], dtype=int)


def n_qubits_of(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise DimensionNotPowerOfTwo(f"dimension {dim} is not a power of two >= 2")
    return n


def validate_label(label: str, n_qubits: int | None = None) -> str:
    if not label or any(c not in ALPHABET for c in label):
        raise ValueError(f"invalid operator label {label!r}; letters must be in {ALPHABET!r}")
    if n_qubits is not None and len(label) != n_qubits:
        raise ShapeMismatch(f"label {label!r} does not have {n_qubits} letters")
    return label


def label_order(label: str) -> int:
    """Coherence order n_+ - n_- of a label."""
    return label.count("+") - label.count("-")


def letter_counts(label: str) -> dict[str, int]:
    return {c: label.count(c) for c in ALPHABET}


def swap_pm(label: str) -> str:
    """Letterwise exchange of + and - (the label of the adjoint operator)."""
    return label.translate(str.maketrans("+-", "-+"))


def label_norm(label: str) -> float:
    return math.prod(LETTER_NORM[c] for c in label)


def iter_labels(n_qubits: int):
    """All labels in lexicographic order over ``0 + - z``, qubit 1 most significant."""
    for letters in itertools.product(ALPHABET, repeat=n_qubits):
        yield "".join(letters)


def build_operator(label: str) -> np.ndarray:
    validate_label(label)
    return kron_all(SINGLE_QUBIT_BASIS[c] for c in label)


def _apply_per_axis(tensor: np.ndarray, mat: np.ndarray) -> np.ndarray:
    # Contract ``mat`` (out x in) into every axis of ``tensor``.
    for axis in range(tensor.ndim):
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [axis])), 0, axis)
    return tensor


def coefficient_tensor(rho) -> np.ndarray:
    """Expansion coefficients as a dense array of shape ``(4,) * N``.

    Axis ``l`` indexes the letter on qubit ``l + 1`` in ``ALPHABET`` order.
    """
    m = as_square(rho)
    n = n_qubits_of(m)
    if n > MAX_QUBITS:
        raise ValueError(f"expansion capped at {MAX_QUBITS} qubits")
    t = m.reshape((2,) * (2 * n))
    perm = [ax for pair in zip(range(n), range(n, 2 * n)) for ax in pair]
    t = t.transpose(perm).reshape((4,) * n)
    return _apply_per_axis(t, _DUAL_FLAT)


def tensor_to_matrix(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.ndim
    t = _apply_per_axis(np.asarray(coeffs, dtype=complex), _BASIS_FLAT.T)
    t = t.reshape((2,) * (2 * n))
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return t.transpose(perm).reshape(1 << n, 1 << n)


def _grid(n_qubits: int, vec: np.ndarray) -> np.ndarray:
    out = np.zeros((4,) * n_qubits, dtype=int)
    for axis in range(n_qubits):
        shape = [1] * n_qubits
        shape[axis] = 4
        out = out + vec.reshape(shape)
    return out


def label_order_grid(n_qubits: int) -> np.ndarray:
    """n_+ - n_- for every label, laid out like :func:`coefficient_tensor`."""
    return _grid(n_qubits, _ORDER_VEC)


def label_active_grid(n_qubits: int) -> np.ndarray:
    """n_+ + n_- for every label (zero for population-only labels)."""
    return _grid(n_qubits, _ACTIVE_VEC)


@dataclass
class ProductOperatorExpansion:
    n_qubits: int
    coefficients: dict[str, complex] = field(default_factory=dict)

    def to_tensor(self) -> np.ndarray:
        out = np.zeros((4,) * self.n_qubits, dtype=complex)
        for label, a in self.coefficients.items():
            validate_label(label, self.n_qubits)
            out[tuple(ALPHABET.index(c) for c in label)] = a
        return out

    @classmethod
    def from_tensor(cls, coeffs: np.ndarray) -> "ProductOperatorExpansion":
        n = coeffs.ndim
        nz = np.argwhere(coeffs != 0)
        coefficients = {
            "".join(ALPHABET[i] for i in idx): complex(coeffs[tuple(idx)]) for idx in nz
        }
        return cls(n, coefficients)

    def by_order(self) -> dict[int, dict[str, complex]]:
        out: dict[int, dict[str, complex]] = {}
        for label, a in self.coefficients.items():
            out.setdefault(label_order(label), {})[label] = a
        return out


def expand(rho) -> ProductOperatorExpansion:
    """Expand a 2^N x 2^N matrix in the product-operator basis.

    Only exactly-zero coefficients are dropped.
    """
    return ProductOperatorExpansion.from_tensor(coefficient_tensor(rho))


def reconstruct(exp: ProductOperatorExpansion) -> np.ndarray:
    return tensor_to_matrix(exp.to_tensor())


def element_order(row: int, col: int, n_qubits: int) -> int:
    """Coherence order of the matrix element |row><col|.

    This is the number of excitations gained going from ``row`` to ``col``,
    i.e. ``popcount(col) - popcount(row)``; entry (0, 1) of a single qubit is +1.
    """
    dim = 1 << n_qubits
    if not (0 <= row < dim and 0 <= col < dim):
        raise IndexError(f"indices ({row}, {col}) out of range for {n_qubits} qubits")
    return bin(col).count("1") - bin(row).count("1")


def order_grid(n_qubits: int) -> np.ndarray:
    """Matrix of :func:`element_order` values for all positions."""
    weights = np.array([bin(i).count("1") for i in range(1 << n_qubits)])
    return weights[None, :] - weights[:, None]


def count_order_elements(n_qubits: int, m: int) -> int:
    """Number of matrix positions carrying coherence order ``m``: C(2N, N+m)."""
    if m == 0 or abs(m) > n_qubits:
        raise OrderOutOfRange(f"order {m} outside 0 < |m| <= {n_qubits}")
    return math.factorial(2 * n_qubits) // (
        math.factorial(n_qubits - m) * math.factorial(n_qubits + m)
    )
