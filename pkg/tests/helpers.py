"""Random inputs and brute-force oracles shared by the test modules.

The oracles deliberately avoid the package's own routines so that they
can catch errors in them.
"""

import itertools
import math

import numpy as np
from scipy import linalg as sla

LETTERS = {
    "0": np.eye(2) / 2,
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "z": np.diag([0.5, -0.5]),
}


def random_density(n_qubits, rng, rank=None):
    d = 2**n_qubits
    k = rank or d
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(n_qubits, rng):
    d = 2**n_qubits
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


def random_hermitian(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_unitary(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def label_matrix(label):
    out = np.array([[1.0 + 0j]])
    for c in label:
        out = np.kron(out, LETTERS[c])
    return out


def brute_coefficients(rho):
    """Dual-basis coefficients by explicit traces over all 4^N labels."""
    n = int(round(math.log2(rho.shape[0])))
    out = {}
    for letters in itertools.product("0+-z", repeat=n):
        label = "".join(letters)
        b = label_matrix(label)
        nu = np.prod([1.0 if c in "+-" else 0.5 for c in label])
        out[label] = np.trace(b.conj().T @ rho) / nu
    return out


def brute_order_grid(n):
    d = 2**n
    return np.array([[bin(c).count("1") - bin(r).count("1") for c in range(d)] for r in range(d)])


def collective_z(n):
    return np.array([n / 2 - bin(k).count("1") for k in range(2**n)], dtype=float)


def qfi_eig(rho, h_diag, cutoff=1e-12):
    """QFI of rho for generator diag(h), by direct spectral sum."""
    q, v = np.linalg.eigh(rho)
    hm = v.conj().T @ np.diag(h_diag) @ v
    total = 0.0
    for i in range(q.size):
        for j in range(q.size):
            s = q[i] + q[j]
            if s > cutoff:
                total += (q[i] - q[j]) ** 2 * abs(hm[i, j]) ** 2 / s
    return 0.5 * total


def fidelity(rho, sigma):
    sr = sla.sqrtm(rho)
    return float(np.real(np.trace(sla.sqrtm(sr @ sigma @ sr))) ** 2)


def qfi_fidelity(rho, h_diag, delta=1e-4):
    """QFI from the Bures fidelity between rho and its phase-shifted copy.

    Normalised so that a pure state gives Var(H), matching the package.
    """
    u = np.exp(-1j * delta * np.asarray(h_diag))
    shifted = u[:, None] * rho * u.conj()[None, :]
    f = fidelity(rho, shifted)
    return 2 * (1 - math.sqrt(min(f, 1.0))) / delta**2


def overlap_decay(rho, h_diag, tau):
    """(Tr rho^2 - Tr(rho_tau rho)) / tau^2 summed element by element.

    Uses 1 - cos(x) = 2 sin^2(x / 2) per matrix element so the result keeps
    full relative precision even for small tau.
    """
    h = np.asarray(h_diag)
    gaps = h[:, None] - h[None, :]
    return float(np.sum(np.abs(rho) ** 2 * 2 * np.sin(gaps * tau / 2) ** 2)) / tau**2
