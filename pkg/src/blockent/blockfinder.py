"""Detection of block structure in disjoint E subspaces.

Two E basis states ``e`` and ``e'`` belong to the same block when some matrix
element ``<s e| X |s' e'>`` is non-negligible.  Blocks are the connected
components of that coupling graph.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import numkernel as nk
from .bipartite import BipartiteState, require_valid
from .errors import DimensionMismatch, PartitionInvalid

DEFAULT_TOL = 1e-10


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def components(self) -> list:
        """Components as sorted lists, ordered by their smallest member."""
        groups = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return sorted(groups.values(), key=lambda g: g[0])


@dataclass(frozen=True)
class Block:
    e_indices: tuple
    p: float
    rho: Optional[np.ndarray]

    @property
    def dim_e(self) -> int:
        return len(self.e_indices)


@dataclass(frozen=True)
class BlockDecomposition:
    dim_s: int
    dim_e: int
    blocks: tuple
    dropped: tuple = field(default=())

    @property
    def partition(self) -> list:
        """All E-index sets, including those of dropped zero-weight blocks."""
        sets = [b.e_indices for b in self.blocks] + [b.e_indices for b in self.dropped]
        return sorted(sets, key=lambda s: s[0])

    def reassemble(self) -> np.ndarray:
        d = self.dim_s * self.dim_e
        out = np.zeros((d, d), dtype=np.complex128)
        for b in self.blocks:
            idx = block_indices(self.dim_s, self.dim_e, b.e_indices)
            out[np.ix_(idx, idx)] += b.p * b.rho
        return out


@dataclass(frozen=True)
class BlockCheck:
    ok: bool
    max_violation: float
    location: Optional[tuple]


@dataclass(frozen=True)
class BlockRank:
    e_indices: tuple
    p: float
    dim_e: int
    rank: int
    bound_excluded: bool


@dataclass(frozen=True)
class RankReport:
    blocks: tuple
    rank: int
    max_dim: int
    bound_excluded: bool

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {
                    "e_indices": list(b.e_indices),
                    "p": b.p,
                    "rank": b.rank,
                    "bound_excluded": b.bound_excluded,
                }
                for b in self.blocks
            ],
            "global": {
                "rank": self.rank,
                "max_dim": self.max_dim,
                "bound_excluded": self.bound_excluded,
            },
        }


def block_indices(dim_s: int, dim_e: int, e_indices: Sequence[int]) -> np.ndarray:
    """Composite indices of ``{|s e>: e in e_indices}`` in block-local s-major order."""
    e = np.asarray(e_indices, dtype=int)
    return (np.arange(dim_s)[:, None] * dim_e + e[None, :]).ravel()


def coupling_strength(m: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    """``W[e, e'] = max_{s, s'} |m[(s, e), (s', e')]|``."""
    if m.shape[0] != dim_s * dim_e:
        raise DimensionMismatch(
            f"matrix of dimension {m.shape[0]} does not factor as {dim_s} x {dim_e}"
        )
    return np.abs(m.reshape(dim_s, dim_e, dim_s, dim_e)).max(axis=(0, 2))


def coupling_partition(m: np.ndarray, dim_s: int, dim_e: int, tol: float = DEFAULT_TOL) -> list:
    w = coupling_strength(m, dim_s, dim_e)
    uf = UnionFind(dim_e)
    rows, cols = np.nonzero(np.triu(w > tol, k=1))
    for a, b in zip(rows.tolist(), cols.tolist()):
        uf.union(a, b)
    return [tuple(c) for c in uf.components()]


def detect_blocks(state: BipartiteState, tol: float = DEFAULT_TOL) -> BlockDecomposition:
    """Split ``state`` into normalized blocks on disjoint E-index sets.

    Blocks whose weight ``p`` does not exceed ``tol`` are kept in ``dropped``.
    """
    require_valid(state)
    rho = state.rho
    m, n = state.dim_s, state.dim_e
    blocks, dropped = [], []
    for comp in coupling_partition(rho, m, n, tol):
        idx = block_indices(m, n, comp)
        sub = rho[np.ix_(idx, idx)]
        p = float(np.real(np.trace(sub)))
        if p <= tol:
            dropped.append(Block(comp, p, None))
        else:
            blocks.append(Block(comp, p, sub / p))
    return BlockDecomposition(m, n, tuple(blocks), tuple(dropped))


def _as_partition(claimed, dim_e: int) -> list:
    sets = claimed.partition if isinstance(claimed, BlockDecomposition) else claimed
    sets = [tuple(sorted(int(i) for i in s)) for s in sets]
    seen = set()
    for s in sets:
        if not s:
            raise PartitionInvalid("empty E-index set in partition")
        for i in s:
            if i < 0 or i >= dim_e:
                raise PartitionInvalid(f"E index {i} out of range 0..{dim_e - 1}")
            if i in seen:
                raise PartitionInvalid(f"E index {i} appears in more than one set")
            seen.add(i)
    missing = sorted(set(range(dim_e)) - seen)
    if missing:
        raise PartitionInvalid(f"E indices {missing} are not covered by the partition")
    return sets


def verify_block_structure(state: BipartiteState, claimed, tol: float = DEFAULT_TOL) -> BlockCheck:
    """Check that every entry coupling two different claimed E sets is below ``tol``.

    ``claimed`` is a :class:`BlockDecomposition` or a list of E-index sets.
    The reported location is ``(row, col)`` of the largest cross-block entry.
    """
    m, n = state.dim_s, state.dim_e
    sets = _as_partition(claimed, n)
    label = np.empty(n, dtype=int)
    for k, s in enumerate(sets):
        label[list(s)] = k
    e_of = np.tile(np.arange(n), m)
    cross = label[e_of][:, None] != label[e_of][None, :]
    mags = np.where(cross, np.abs(state.rho), 0.0)
    if not cross.any():
        return BlockCheck(True, 0.0, None)
    flat = int(np.argmax(mags))
    worst = float(mags.flat[flat])
    loc = tuple(int(i) for i in np.unravel_index(flat, mags.shape)) if worst > 0 else None
    return BlockCheck(worst <= tol, worst, loc)


def detect_hamiltonian_blocks(h, dim_s: int, dim_e: int, tol: float = DEFAULT_TOL) -> list:
    """E-index partition left invariant by the Hamiltonian ``h``.

    Any function of ``h``, in particular its Gibbs state, is block diagonal in
    (at least) this partition.
    """
    h = nk.symmetrize(h)
    return coupling_partition(h, dim_s, dim_e, tol)


def rank_report(state: BipartiteState, decomp: BlockDecomposition, tol: float = DEFAULT_TOL) -> RankReport:
    """Rank-based exclusion of bound entanglement, per block and globally.

    A block of E dimension ``N_i`` cannot hold bound entanglement when its rank
    is at most ``max(M, N_i)``; the whole state likewise with ``max(M, N)``.
    """
    m = decomp.dim_s
    rows = []
    for b in decomp.blocks:
        r = nk.numeric_rank(b.rho, tol)
        rows.append(BlockRank(b.e_indices, b.p, b.dim_e, r, r <= max(m, b.dim_e)))
    total = nk.numeric_rank(state.rho, tol)
    max_dim = max(m, decomp.dim_e)
    return RankReport(tuple(rows), total, max_dim, total <= max_dim)
