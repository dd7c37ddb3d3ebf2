"""Dense complex linear algebra for small Hilbert spaces (dimension <= 64)."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

DEFAULT_ATOL = 1e-10


class HermitianEigenSystem(NamedTuple):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a 2-D complex ndarray without copying when possible."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError("matrix must be nonempty")
    return a


def allclose(a, b, atol: float = DEFAULT_ATOL) -> bool:
    """Entrywise equality within an absolute tolerance (never exact float ==)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def is_hermitian(m, atol: float = DEFAULT_ATOL) -> bool:
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def tensor(a, b) -> np.ndarray:
    """Kronecker product with a-index major, b-index minor block ordering."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def hermitian_part(m) -> np.ndarray:
    """Return (m + m^dagger)/2."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"hermitian_part requires a square matrix, got {a.shape}")
    return (a + a.conj().T) / 2


def hermitian_eigensystem(m, atol: float = DEFAULT_ATOL) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix, rejecting non-Hermitian input."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"eigendecomposition requires a square matrix, got {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T), initial=0.0))
    if dev > atol:
        raise ValueError(
            f"matrix is not Hermitian: max |m - m^dagger| = {dev:.3e} exceeds {atol:.1e}"
        )
    w, v = np.linalg.eigh(a)
    return HermitianEigenSystem(eigenvalues=w, eigenvectors=v)


def matrix_exponential(h, scale: float) -> np.ndarray:
    """Unitary exp(-i * scale * h) for Hermitian h, via eigendecomposition.

    Kept as an independent reference path: deliberately does not use any
    closed-form shortcut, so it can cross-check faster constructions.
    """
    w, v = hermitian_eigensystem(h)
    phases = np.exp(-1j * scale * w)
    return (v * phases) @ v.conj().T


def trace_distance(r1, r2, atol: float = DEFAULT_ATOL) -> float:
    """Half the trace norm of (r1 - r2); in [0, 1] for positive unit-trace states."""
    a = as_complex_matrix(r1)
    b = as_complex_matrix(r2)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not is_hermitian(a, atol) or not is_hermitian(b, atol):
        raise ValueError("trace_distance requires Hermitian inputs")
    w = np.linalg.eigvalsh(hermitian_part(a - b))
    return float(0.5 * np.sum(np.abs(w)))
