import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockent import (
    BipartiteState,
    ModelSpec,
    assemble_full_hamiltonian,
    detect_blocks,
    detect_hamiltonian_blocks,
    rank_report,
    verify_block_structure,
)
from blockent.blockfinder import UnionFind, block_indices
from blockent.errors import InvalidState, PartitionInvalid
from blockent.random_states import random_block_diagonal


def test_union_find_components():
    uf = UnionFind(6)
    assert uf.union(4, 1)
    assert uf.union(1, 2)
    assert not uf.union(2, 4)
    uf.union(5, 3)
    assert uf.components() == [[0], [1, 2, 4], [3, 5]]


def test_bell_mixture_blocks(bell_mixture):
    decomp = detect_blocks(bell_mixture)
    assert decomp.partition == [(0, 1), (2, 3)]
    assert [b.p for b in decomp.blocks] == pytest.approx([0.5, 0.5])
    for b in decomp.blocks:
        assert np.trace(b.rho).real == pytest.approx(1.0)
    np.testing.assert_allclose(decomp.reassemble(), bell_mixture.rho, atol=1e-15)


def test_claimed_blocks_checked(bell_mixture):
    assert verify_block_structure(bell_mixture, [(0, 1), (2, 3)]).ok
    check = verify_block_structure(bell_mixture, [(0, 2), (1, 3)])
    assert not check.ok
    assert check.max_violation == pytest.approx(1 / 8)
    row, col = check.location
    # the reported entry couples E index 0 with E index 1
    assert {row % 4, col % 4} == {0, 1}
    assert verify_block_structure(bell_mixture, detect_blocks(bell_mixture)).ok


def test_diagonal_environment_gives_singletons():
    rho = np.kron(np.diag([0.5, 0.5]), np.diag([0.1, 0.2, 0.3, 0.4]))
    decomp = detect_blocks(BipartiteState(2, 4, rho))
    assert decomp.partition == [(0,), (1,), (2,), (3,)]


def test_zero_weight_block_is_dropped():
    rho = np.kron(np.eye(2) / 2, np.diag([0.5, 0.5, 0.0]))
    decomp = detect_blocks(BipartiteState(2, 3, rho))
    assert [b.e_indices for b in decomp.blocks] == [(0,), (1,)]
    assert [b.e_indices for b in decomp.dropped] == [(2,)]
    assert decomp.partition == [(0,), (1,), (2,)]


def test_invalid_state_rejected():
    with pytest.raises(InvalidState):
        detect_blocks(BipartiteState(2, 2, np.eye(4)))


@pytest.mark.parametrize(
    "claimed",
    [[(0, 1), (1, 2, 3)], [(0, 1), (2,)], [(0, 1), (2, 3, 4)], [(0, 1), (), (2, 3)]],
)
def test_malformed_partitions(bell_mixture, claimed):
    with pytest.raises(PartitionInvalid):
        verify_block_structure(bell_mixture, claimed)


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 3), sizes=st.lists(st.integers(1, 3), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_recovers_shuffled_blocks(seed, m, sizes):
    rng = np.random.default_rng(seed)
    rho, partition, probs, _ = random_block_diagonal(m, sizes, rng)
    n = sum(sizes)
    perm = rng.permutation(n)
    # relabel E index e -> perm[e]
    full = np.concatenate([perm + s * n for s in range(m)])
    shuffled = np.zeros_like(rho)
    shuffled[np.ix_(full, full)] = rho
    expected = sorted((tuple(sorted(perm[list(s)].tolist())) for s in partition), key=lambda s: s[0])
    decomp = detect_blocks(BipartiteState(m, n, shuffled))
    assert decomp.partition == expected
    p_by_set = {tuple(sorted(perm[list(s)].tolist())): p for s, p in zip(partition, probs)}
    for b in decomp.blocks:
        assert b.p == pytest.approx(p_by_set[b.e_indices], abs=1e-12)


def test_block_indices_are_s_major():
    assert block_indices(2, 4, (2, 3)).tolist() == [2, 3, 6, 7]


def test_rank_report(bell_mixture):
    report = rank_report(bell_mixture, detect_blocks(bell_mixture))
    assert [b.rank for b in report.blocks] == [2, 2]
    assert all(b.bound_excluded for b in report.blocks)
    assert report.rank == 4 and report.max_dim == 4 and report.bound_excluded
    full = BipartiteState(3, 3, np.eye(9) / 9)
    rep = rank_report(full, detect_blocks(full))
    assert rep.rank == 9 and not rep.bound_excluded
    assert all(b.rank == 3 and b.bound_excluded for b in rep.blocks)


def test_hamiltonian_blocks_refine_model_sectors():
    spec = ModelSpec(3, 1.0)
    h, m, n = assemble_full_hamiltonian(spec)
    parts = detect_hamiltonian_blocks(h, m, n)
    sectors = [{2 * j, 2 * j + 1} for j in range(len(spec.m_subset))]
    for p in parts:
        assert any(set(p) <= s for s in sectors)
    # every sector is connected except m = K, whose coupling vanishes
    assert sorted(parts) == [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12,), (13,)]
