"""Bipartite QS-E states and pure-state entanglement measures."""
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .errors import DimensionMismatch, InvalidState

STATE_TOL = 1e-9
NORM_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix on a ``dim_s x dim_e`` space (QS index slowest)."""

    dim_s: int
    dim_e: int
    rho: np.ndarray

    def __post_init__(self):
        rho = nk.as_matrix(self.rho)
        if rho.shape[0] != self.dim_s * self.dim_e:
            raise DimensionMismatch(
                f"rho has dimension {rho.shape[0]}, expected {self.dim_s} * {self.dim_e}"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.dim_s * self.dim_e


@dataclass(frozen=True)
class PureBipartiteState:
    dim_s: int
    dim_e: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amp.size != self.dim_s * self.dim_e:
            raise DimensionMismatch(
                f"{amp.size} amplitudes do not fit a {self.dim_s} x {self.dim_e} space"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"pure state has norm {norm:.12g}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, dim_s, dim_e, amplitudes):
        amp = np.asarray(amplitudes, dtype=np.complex128).ravel()
        return cls(dim_s, dim_e, amp / np.linalg.norm(amp))

    def matrix(self) -> np.ndarray:
        """Amplitudes arranged as a ``dim_s x dim_e`` coefficient matrix."""
        return self.amplitudes.reshape(self.dim_s, self.dim_e)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class ValidationReport:
    hermitian_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    tol: float = STATE_TOL

    @property
    def hermitian_ok(self) -> bool:
        return self.hermitian_deviation <= self.tol

    @property
    def trace_ok(self) -> bool:
        return self.trace_deviation <= self.tol

    @property
    def positive_ok(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def valid(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.positive_ok

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "hermitian_deviation": self.hermitian_deviation,
            "trace_deviation": self.trace_deviation,
            "min_eigenvalue": self.min_eigenvalue,
        }


def validate(state: BipartiteState, tol: float = STATE_TOL) -> ValidationReport:
    rho = state.rho
    herm = nk.hermitian_deviation(rho)
    trace_dev = abs(np.trace(rho) - 1.0)
    # eigenvalues of the Hermitian part are meaningful even for slightly off inputs
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return ValidationReport(herm, float(trace_dev), min_eig, tol)


def require_valid(state: BipartiteState, tol: float = STATE_TOL) -> ValidationReport:
    report = validate(state, tol)
    if not report.valid:
        raise InvalidState(f"invalid density matrix: {report.to_dict()}", report)
    return report


def reduced_state(psi: PureBipartiteState, keep: str = nk.SUBSYSTEM_E) -> np.ndarray:
    c = psi.matrix()
    if nk._subsystem(keep) == nk.SUBSYSTEM_E:
        return c.T @ c.conj()
    return c @ c.conj().T


def linear_entropy_batch(states: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    """Normalized linear entropy ``2 (1 - Tr rho_E^2)`` for each row of ``states``.

    Rows must be normalized.  Works on any stack shape ``(..., dim_s * dim_e)``.
    """
    c = states.reshape(states.shape[:-1] + (dim_s, dim_e))
    rho_e = np.einsum("...si,...sj->...ij", c, c.conj())
    purity = np.sum(np.abs(rho_e) ** 2, axis=(-2, -1))
    return 2.0 * (1.0 - purity)


def _weighted_linear_entropy(psi: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    """``|psi|^2 * E(psi / |psi|)`` for unnormalized rows, without normalizing."""
    c = psi.reshape(psi.shape[:-1] + (dim_s, dim_e))
    if dim_s <= dim_e:
        g = c @ np.swapaxes(c.conj(), -1, -2)
    else:
        g = np.swapaxes(c, -1, -2) @ c.conj()
    w = np.trace(g, axis1=-2, axis2=-1).real
    purity = np.sum(g.real**2 + g.imag**2, axis=(-2, -1))
    safe = np.where(w > 0, w, 1.0)
    return np.where(w > 0, 2.0 * (w - purity / safe), 0.0)


linear_entropy_batch.weighted = _weighted_linear_entropy


def entropy_batch(states: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    """Entanglement entropy (bits) of the reduced state for each normalized row."""
    c = states.reshape(states.shape[:-1] + (dim_s, dim_e))
    sv = np.linalg.svd(c, compute_uv=False)
    p = sv**2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return np.sum(terms, axis=-1)


def linear_entropy_entanglement(psi: PureBipartiteState) -> float:
    """Normalized linear entropy of the reduced E state, ``2 (1 - Tr rho_E^2)``.

    Zero exactly for product states; one for a maximally entangled pair of
    qubits.  For a QS of dimension ``d`` the maximum is ``2 (1 - 1/d)``.
    """
    value = linear_entropy_batch(psi.amplitudes, psi.dim_s, psi.dim_e)
    return float(max(value, 0.0))


def von_neumann_entropy(rho) -> float:
    """``-sum lambda log2 lambda`` over the spectrum, with ``0 log 0 = 0``."""
    values = nk.eig_hermitian(rho).values
    p = values[values > 0]
    return float(max(-np.sum(p * np.log2(p)), 0.0))
