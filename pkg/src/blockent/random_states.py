"""Seeded random states used by the self-verification suites."""
import numpy as np


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank=None) -> np.ndarray:
    """Unit-trace ``G G^dagger`` with a complex Gaussian ``d x rank`` factor."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_block_diagonal(dim_s: int, sizes, rng: np.random.Generator, ranks=None) -> tuple:
    """State block diagonal in consecutive E-index sets of the given sizes.

    Returns ``(rho, partition, probs, blocks)`` where ``blocks`` are the
    normalized block states in block-local s-major order.
    """
    dim_e = int(sum(sizes))
    probs = rng.dirichlet(np.ones(len(sizes)))
    rho = np.zeros((dim_s * dim_e,) * 2, dtype=np.complex128)
    partition, blocks = [], []
    start = 0
    for k, n in enumerate(sizes):
        e = np.arange(start, start + n)
        idx = (np.arange(dim_s)[:, None] * dim_e + e[None, :]).ravel()
        block = random_density(dim_s * n, rng, None if ranks is None else ranks[k])
        rho[np.ix_(idx, idx)] = probs[k] * block
        partition.append(tuple(e.tolist()))
        blocks.append(block)
        start += n
    return rho, partition, probs, blocks
