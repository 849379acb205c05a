"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; nothing here
holds state. The Hermitian eigensolver has two back ends: LAPACK (through
``numpy.linalg.eigh``) for speed, and a cyclic Jacobi sweep that serves as
an independent cross-check in the test-suite.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .constants import HERMITICITY_TOL, JACOBI_MAX_SWEEPS
from .errors import NoConvergence, NotHermitian, ShapeMismatch


class HermitianEigenResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product, left factor outermost."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T), initial=0.0))


def check_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    err = hermiticity_error(a)
    if err > tol * scale:
        raise NotHermitian(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")


def _jacobi(a: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    fro = np.linalg.norm(a)
    if n == 1 or fro == 0.0:
        return a.diagonal().real.copy(), v
    target = np.finfo(float).eps * fro
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= target:
            return a.diagonal().real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                zeta = (aqq - app) / (2.0 * mag)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


def _canonical_phase(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-10)
        if big.size:
            lead = col[big[0]]
            out[:, k] = col * (abs(lead) / lead)
    return out


def hermitian_eig(a, method: str = "lapack", max_sweeps: int = JACOBI_MAX_SWEEPS) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Each eigenvector is rescaled so that its
    first component of modulus above 1e-10 is real and positive, which makes
    the output deterministic for non-degenerate spectra.

    Args:
        a: square Hermitian matrix.
        method: ``"lapack"`` or ``"jacobi"``.
        max_sweeps: sweep budget for the Jacobi solver.

    Raises:
        NotHermitian: if ``a`` deviates from its adjoint beyond 1e-12.
        NoConvergence: if Jacobi exhausts ``max_sweeps``.
    """
    m = as_square(a)
    check_hermitian(m)
    m = 0.5 * (m + m.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(m)
    elif method == "jacobi":
        w, v = _jacobi(m, max_sweeps)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")
    return HermitianEigenResult(np.asarray(w)[order], _canonical_phase(v[:, order]))


def singular_values(a) -> np.ndarray:
    """Singular values as square roots of the eigenvalues of ``a^H a``.

    Eigenvalues below ``dim * eps * max_eig`` are rounding noise and are set
    to zero before the square root, otherwise a rank-deficient matrix would
    pick up spurious ~1e-8 contributions.
    """
    m = as_matrix(a)
    gram = m.conj().T @ m
    mu = hermitian_eig(0.5 * (gram + gram.conj().T)).eigenvalues
    top = float(np.max(mu, initial=0.0))
    floor = mu.size * np.finfo(float).eps * top
    mu = np.where(mu > floor, mu, 0.0)
    return np.sqrt(mu)[::-1]


def trace_norm(a) -> float:
    """Schatten-1 norm (sum of singular values)."""
    m = as_square(a)
    return float(np.sum(singular_values(m)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^H b)."""
    x, y = as_matrix(a), as_matrix(b)
    if x.shape != y.shape:
        raise ShapeMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def hs_norm(a) -> float:
    return float(np.sqrt(hs_inner(a, a).real))
