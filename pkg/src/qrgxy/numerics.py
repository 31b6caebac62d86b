"""Dense real linear algebra: symmetric eigendecomposition, Kronecker
products, and PSD matrix square roots.

Everything is real double precision. Block Hamiltonians, parity projectors
and reduced density matrices are all real symmetric (see pauli / blocks), so
no complex code path exists anywhere in the package. Matrices here top out at
128x128, far below the enforced ceiling.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractError

SYMMETRY_RTOL = 1e-12
PSD_CLAMP = 1e-12
MAX_DIM = 1024


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # orthonormal columns, same order


def _require_symmetric(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIM:
        raise ContractError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if n == 0:
        raise ContractError("matrix is empty")
    scale = float(np.max(np.abs(a)))
    dev = np.abs(a - a.T)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[i, j] > SYMMETRY_RTOL * scale:
        raise ContractError(
            f"matrix not symmetric: |A[{i}][{j}] - A[{j}][{i}]| = {dev[i, j]:.3e} "
            f"exceeds {SYMMETRY_RTOL:g} * max|A| = {SYMMETRY_RTOL * scale:.3e}"
        )
    return a


def eigh_symmetric(a) -> EigenDecomposition:
    """Full spectrum of a real symmetric matrix, eigenvalues ascending.

    LAPACK's symmetric solver does the actual work; this wrapper enforces the
    symmetry contract up front and is the single eigensolver entry point for
    the whole package, so every caller gets the same ordering and the same
    orthonormality guarantees.
    """
    a = _require_symmetric(a)
    w, v = np.linalg.eigh(a)
    return EigenDecomposition(w, v)


def kron(a, b) -> np.ndarray:
    """Kronecker product; result[(i*p+k)][(j*q+l)] = a[i][j] * b[k][l]."""
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def sqrt_psd(a) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-1e-12, 0) are rounding debris from density-matrix
    assembly and get clamped to zero; anything more negative is a genuine
    contract violation and raises.
    """
    a = _require_symmetric(a)
    w, v = np.linalg.eigh(a)
    if w[0] < -PSD_CLAMP:
        raise ContractError(
            f"matrix not PSD: smallest eigenvalue {w[0]:.6e} is below -{PSD_CLAMP:g}"
        )
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T
