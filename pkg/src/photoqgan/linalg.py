"""Small dense complex linear algebra helpers.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Matrices never exceed 16x16 in this package, so no attempt is made at
being clever about memory.
"""
from __future__ import annotations

import numpy as np

UNITARY_ATOL = 1e-10


class NotUnitaryError(ValueError):
    """Raised when a matrix expected to be unitary fails the check."""


def as_vector(amplitudes, dim: int | None = None) -> np.ndarray:
    vec = np.array(amplitudes, dtype=complex).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got {vec.shape[0]}")
    return vec


def as_matrix(entries, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``entries`` to a fresh 2-d complex array.

    Flat row-major input is reshaped when ``rows`` and ``cols`` are given.
    """
    mat = np.array(entries, dtype=complex)
    if mat.ndim == 1:
        if rows is None or cols is None:
            raise ValueError("flat entries need explicit rows and cols")
        if mat.size != rows * cols:
            raise ValueError(f"{mat.size} entries cannot fill a {rows}x{cols} matrix")
        mat = mat.reshape(rows, cols)
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {mat.shape}")
    if rows is not None and mat.shape[0] != rows or cols is not None and mat.shape[1] != cols:
        raise ValueError(f"expected shape ({rows}, {cols}), got {mat.shape}")
    return mat


def unitarity_error(u: np.ndarray) -> float:
    """Max-abs entry of ``U^dagger U - I``."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return unitarity_error(u) <= atol


def check_unitary(u, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Return ``u`` as a complex array, raising :class:`NotUnitaryError` otherwise."""
    mat = np.array(u, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NotUnitaryError(f"unitary must be square, got shape {mat.shape}")
    err = unitarity_error(mat)
    if not err <= atol:
        raise NotUnitaryError(f"max |U^dagger U - I| = {err:.3e} exceeds {atol:.1e}")
    return mat


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the outer (slow) index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def haar_random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample an ``n x n`` unitary from the Haar measure.

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` pushed
    back into ``Q`` so the distribution is exactly Haar (Mezzadri 2007).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def distance_up_to_global_phase(a, b) -> float:
    """``min_phi ||a - e^{i phi} b||_F``.

    The optimal phase aligns ``tr(b^dagger a)``; when that trace vanishes the
    distance does not depend on the phase at all, so a coarse grid is enough
    and only kept as a guard against round-off near zero.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(b, a)  # tr(b^dagger a)
    if abs(overlap) > 1e-300:
        phase = overlap / abs(overlap)
        return float(np.linalg.norm(a - phase * b))
    grid = np.exp(1j * np.linspace(0.0, 2 * np.pi, 3600, endpoint=False))
    return float(min(np.linalg.norm(a - p * b) for p in grid))
