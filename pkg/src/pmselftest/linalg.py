"""Dense complex Hermitian matrix kernel.

All operators in this package are small (dimension <= 32) dense complex
matrices, so everything here is a thin, validated layer over numpy's LAPACK
bindings.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

HERMITICITY_TOL = 1e-12
MAX_DIM = 32


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a square complex ndarray of dimension <= MAX_DIM."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {m.shape[0]} outside supported range [1, {MAX_DIM}]")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def as_hermitian(a, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity up to ``tol`` and return the symmetrized matrix.

    Symmetrizing (H + H^dagger)/2 absorbs float round-off; anything beyond
    ``tol`` is treated as a logic bug and rejected.
    """
    m = as_complex_matrix(a)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max |H_ij - conj(H_ji)| = {defect:.3e}")
    return (m + m.conj().T) / 2


def eig_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues sorted descending, eigenvectors as matching columns).
    """
    h = as_hermitian(h)
    vals, vecs = np.linalg.eigh(h)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def eigenvalue_gap_2x2(t: np.ndarray) -> float:
    """Spectral gap lambda_0 - lambda_1 of a 2x2 Hermitian matrix.

    Uses the closed form sqrt(2 Tr(T^2) - (Tr T)^2), which avoids an
    eigendecomposition entirely.
    """
    t = as_hermitian(t)
    if t.shape[0] != 2:
        raise DimensionError(f"closed-form gap requires dimension 2, got {t.shape[0]}")
    chi = np.trace(t).real
    zeta = np.trace(t @ t).real
    return float(np.sqrt(max(2.0 * zeta - chi * chi, 0.0)))


def psd_check(h: np.ndarray, tol: float) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``h`` is >= -tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    h = as_hermitian(h)
    return bool(np.linalg.eigvalsh(h)[0] >= -tol)


def min_eigenvalue(h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(h))[0])


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T
