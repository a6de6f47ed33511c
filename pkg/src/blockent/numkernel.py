"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays.  Bipartite operators follow a
single basis convention: the QS (quantum system) index varies slowest, so the
composite index of ``|s> (x) |e>`` is ``s * dim_e + e``.
"""
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, ExpOverflow, NotHermitian

HERMITIAN_TOL = 1e-9
EXP_LIMIT = 700.0

SUBSYSTEM_S = "s"
SUBSYSTEM_E = "e"


class HermitianEigen(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex128 array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def symmetrize(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Check Hermiticity entrywise and return ``(m + m^dagger) / 2``."""
    a = as_matrix(m)
    dev = hermitian_deviation(a)
    if dev > tol:
        raise NotHermitian(dev, tol)
    return 0.5 * (a + a.conj().T)


def _subsystem(which: str) -> str:
    w = str(which).lower()
    if w not in (SUBSYSTEM_S, SUBSYSTEM_E):
        raise ValueError(f"subsystem tag must be 's' or 'e', got {which!r}")
    return w


def _check_bipartite(rho: np.ndarray, dim_s: int, dim_e: int) -> None:
    if dim_s < 1 or dim_e < 1 or rho.shape[0] != dim_s * dim_e:
        raise DimensionMismatch(
            f"matrix of dimension {rho.shape[0]} does not factor as {dim_s} x {dim_e}"
        )


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues."""
    values, vectors = np.linalg.eigh(symmetrize(m, tol))
    return HermitianEigen(values, vectors)


def expm_hermitian_scaled(m, c: float) -> np.ndarray:
    """``exp(c * m)`` for Hermitian ``m`` via its eigendecomposition."""
    values, vectors = eig_hermitian(m)
    exponents = c * values
    if np.any(exponents > EXP_LIMIT):
        raise ExpOverflow(
            f"exp argument {exponents.max():.1f} exceeds {EXP_LIMIT}; shift the spectrum first"
        )
    return (vectors * np.exp(exponents)) @ vectors.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(rho, dim_s: int, dim_e: int, keep: str = SUBSYSTEM_E) -> np.ndarray:
    """Trace out one factor of a ``dim_s x dim_e`` operator, keeping ``keep``."""
    r = as_matrix(rho)
    _check_bipartite(r, dim_s, dim_e)
    t = r.reshape(dim_s, dim_e, dim_s, dim_e)
    if _subsystem(keep) == SUBSYSTEM_S:
        return np.einsum("iaja->ij", t)
    return np.einsum("aiaj->ij", t)


def partial_transpose(rho, dim_s: int, dim_e: int, which: str = SUBSYSTEM_E) -> np.ndarray:
    r = as_matrix(rho)
    _check_bipartite(r, dim_s, dim_e)
    t = r.reshape(dim_s, dim_e, dim_s, dim_e)
    if _subsystem(which) == SUBSYSTEM_E:
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(dim_s * dim_e, dim_s * dim_e).copy()


def numeric_rank(m, tol: float = 1e-10) -> int:
    """Number of eigenvalues above ``tol`` times the largest eigenvalue."""
    values = eig_hermitian(m).values
    top = values[-1]
    if top <= 0:
        return 0
    return int(np.count_nonzero(values > tol * top))
