"""Mixed-state entanglement measures and the block-averaged convex roof.

For a state block diagonal in disjoint E subspaces any convex-roof measure is
the probability-weighted average of the measure inside each block, so the
expensive part only ever sees one block at a time.  Blocks that reduce to two
qubits are handled exactly with Wootters' concurrence; pure blocks need no
minimization at all; anything else falls back to the sampled roof of the
normalized linear entropy, which is an upper bound.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import numkernel as nk
from .bipartite import BipartiteState, entropy_batch, linear_entropy_batch, require_valid
from .blockfinder import DEFAULT_TOL, detect_blocks
from .convexroof import minimize_roof
from .errors import DimensionMismatch, DomainError
from .parallel import parallel_map

WOOTTERS_EOF = "wootters_eof"
WOOTTERS_TANGLE = "wootters_tangle"
PURE_STATE = "pure_state"
SAMPLED_ROOF = "sampled_linear_entropy_roof"
NEGATIVITY = "negativity"
BLOCK_AVERAGE = "block_average"

EOF = "eof"
LINEAR_ENTROPY = "linear_entropy"
AUTO = "auto"

EIGEN_FLOOR = 1e-14
CLAMP_TOL = 1e-9

# sigma_y (x) sigma_y
_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=np.complex128
)


@dataclass(frozen=True)
class RoofPolicy:
    """How block entanglement is evaluated.

    ``measure`` is ``"auto"`` (EoF when every block is exact, otherwise the
    linear-entropy roof everywhere), ``"eof"`` or ``"linear_entropy"``.  The
    remaining fields are the sampler budget.
    """

    measure: str = AUTO
    samples: int = 512
    refine_iters: int = 200
    k_max: Optional[int] = None
    seed: int = 0
    support_tol: float = 1e-10


@dataclass(frozen=True)
class BlockValue:
    index: int
    e_indices: tuple
    p: float
    value: float
    method: str

    @property
    def weighted(self) -> float:
        return self.p * self.value


@dataclass(frozen=True)
class MeasureResult:
    value: float
    method: str
    measure: str = EOF
    exact: bool = True
    per_block: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "measure": self.measure,
            "exact": self.exact,
            "per_block": [
                {
                    "block": b.index,
                    "e_indices": list(b.e_indices),
                    "p": b.p,
                    "entanglement": b.value,
                    "method": b.method,
                }
                for b in self.per_block
            ],
        }


def binary_entropy(x: float) -> float:
    if x < -1e-12 or x > 1 + 1e-12:
        raise DomainError(f"binary entropy needs 0 <= x <= 1, got {x}")
    x = min(max(float(x), 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def _binary_entropy_array(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.where((x > 0) & (x < 1), h, 0.0)


def concurrence(rho: np.ndarray) -> np.ndarray:
    """Wootters concurrence of a two-qubit state, or of a stack ``(..., 4, 4)``.

    Uses ``rho = X X^dagger`` and the singular values of ``X^T (Y (x) Y) X``,
    which equal the square roots of the eigenvalues of ``rho rho~``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape[-2:] != (4, 4):
        raise DimensionMismatch(f"concurrence needs 4 x 4 matrices, got {rho.shape}")
    h = 0.5 * (rho + np.swapaxes(rho.conj(), -1, -2))
    values, vectors = np.linalg.eigh(h)
    values = np.where(values > EIGEN_FLOOR, values, 0.0)
    x = vectors * np.sqrt(values)[..., None, :]
    tau = np.swapaxes(x, -1, -2) @ _YY @ x
    s = np.linalg.svd(tau, compute_uv=False)
    c = s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]
    return np.maximum(c, 0.0)


def eof_from_concurrence(c):
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    return _binary_entropy_array(0.5 * (1.0 + np.sqrt(1.0 - c**2)))


def wootters_eof(rho) -> float:
    """Entanglement of formation (bits) of a two-qubit density matrix."""
    rho = nk.as_matrix(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"Wootters formula needs a 2 x 2 state, got dimension {rho.shape[0]}")
    require_valid(BipartiteState(2, 2, rho))
    return float(eof_from_concurrence(concurrence(rho)))


def negativity(state: BipartiteState) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the E-partial transpose."""
    pt = nk.partial_transpose(state.rho, state.dim_s, state.dim_e, nk.SUBSYSTEM_E)
    values = nk.eig_hermitian(pt).values
    return float(-np.sum(values[values < 0]))


def _support_map(marginal: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """``2 x n`` map onto (at most) two dimensions carrying the marginal's support."""
    n = marginal.shape[0]
    if n == 1:
        return np.array([[1.0], [0.0]], dtype=np.complex128)
    if n == 2:
        return np.eye(2, dtype=np.complex128)
    values, vectors = nk.eig_hermitian(marginal)
    if np.count_nonzero(values > tol) > 2:
        return None
    return vectors[:, -2:].conj().T


def two_qubit_reduction(rho: np.ndarray, dim_s: int, dim_e: int, tol: float = 1e-10):
    """Map a block onto a 2 x 2 state by local isometries, if its supports allow.

    Each side is compressed onto the eigenvectors of its marginal with
    eigenvalue above ``tol``; returns ``None`` when either support exceeds two
    dimensions.
    """
    vs = _support_map(nk.partial_trace(rho, dim_s, dim_e, nk.SUBSYSTEM_S), tol)
    if vs is None:
        return None
    ve = _support_map(nk.partial_trace(rho, dim_s, dim_e, nk.SUBSYSTEM_E), tol)
    if ve is None:
        return None
    v = np.kron(vs, ve)
    out = v @ rho @ v.conj().T
    return 0.5 * (out + out.conj().T)


def _clamped(rho: np.ndarray) -> np.ndarray:
    values, vectors = nk.eig_hermitian(rho)
    if values[0] < 0 and values[0] >= -CLAMP_TOL:
        values = np.maximum(values, 0.0)
        rho = (vectors * values) @ vectors.conj().T
    return rho


def _is_pure(rho: np.ndarray, tol: float) -> Optional[np.ndarray]:
    values, vectors = nk.eig_hermitian(rho)
    if np.all(values[:-1] <= tol * values[-1]):
        return vectors[:, -1]
    return None


def exact_block_method(rho_block: np.ndarray, dim_s: int, dim_e: int, tol: float = 1e-10) -> Optional[str]:
    """Which exact route applies to a block, or ``None`` if only the sampler does."""
    if two_qubit_reduction(rho_block, dim_s, dim_e, tol) is not None:
        return WOOTTERS_EOF
    if _is_pure(rho_block, tol) is not None:
        return PURE_STATE
    return None


def block_entanglement(rho_block, dim_s: int, dim_e: int, policy: RoofPolicy = RoofPolicy()) -> tuple:
    """Entanglement of one block as ``(value, method)``.

    With ``policy.measure == "eof"`` the Wootters and pure-state routes give the
    entanglement of formation; blocks needing the sampler return the
    linear-entropy roof instead and say so in ``method``.  With
    ``"linear_entropy"`` two-qubit blocks give the tangle ``C**2``, which is
    the exact linear-entropy roof there.
    """
    rho = _clamped(nk.symmetrize(rho_block))
    if rho.shape[0] != dim_s * dim_e:
        raise DimensionMismatch(f"block of dimension {rho.shape[0]} is not {dim_s} x {dim_e}")
    require_valid(BipartiteState(dim_s, dim_e, rho))
    want_eof = policy.measure in (EOF, AUTO)

    reduced = two_qubit_reduction(rho, dim_s, dim_e, policy.support_tol)
    if reduced is not None:
        c = float(concurrence(reduced))
        if want_eof:
            return float(eof_from_concurrence(c)), WOOTTERS_EOF
        return c * c, WOOTTERS_TANGLE

    vec = _is_pure(rho, policy.support_tol)
    if vec is not None:
        measure = entropy_batch if want_eof else linear_entropy_batch
        return float(max(measure(vec, dim_s, dim_e), 0.0)), PURE_STATE

    res = minimize_roof(
        rho,
        dim_s,
        dim_e,
        LINEAR_ENTROPY,
        samples=policy.samples,
        k_max=policy.k_max,
        refine_iters=policy.refine_iters,
        seed=policy.seed,
    )
    return max(res.value, 0.0), SAMPLED_ROOF


def block_averaged_entanglement(
    state: BipartiteState, tol: float = DEFAULT_TOL, policy: RoofPolicy = RoofPolicy()
) -> MeasureResult:
    """Convex-roof entanglement as ``sum_n p_n E(rho_n)`` over detected blocks."""
    decomp = detect_blocks(state, tol)
    m = decomp.dim_s
    measure = policy.measure
    if measure == AUTO:
        exact = all(
            exact_block_method(b.rho, m, b.dim_e, policy.support_tol) is not None
            for b in decomp.blocks
        )
        measure = EOF if exact else LINEAR_ENTROPY
    resolved = RoofPolicy(
        measure, policy.samples, policy.refine_iters, policy.k_max, policy.seed, policy.support_tol
    )

    def evaluate(item):
        k, b = item
        value, method = block_entanglement(b.rho, m, b.dim_e, resolved)
        return BlockValue(k, b.e_indices, b.p, value, method)

    per_block = tuple(parallel_map(evaluate, enumerate(decomp.blocks)))
    total = float(sum(b.weighted for b in per_block))
    exact = all(b.method != SAMPLED_ROOF for b in per_block)
    # an explicit "eof" request can still hit sampled blocks; never report that as EoF
    label = measure if exact or measure == LINEAR_ENTROPY else "mixed"
    return MeasureResult(total, BLOCK_AVERAGE, label, exact, per_block)
