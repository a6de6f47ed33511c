import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockent import (
    BipartiteState,
    PureBipartiteState,
    entropy_batch,
    linear_entropy_batch,
    linear_entropy_entanglement,
    reduced_state,
    require_valid,
    validate,
    von_neumann_entropy,
)
from blockent.errors import DimensionMismatch, InvalidState
from blockent.random_states import random_pure

from conftest import bell_mixture_rho


def haar_unitary(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_bell_mixture_matches_permuted_matrix_form():
    # matrix form in the order |00>,|11>,|01>,|10>,|02>,|13>,|03>,|12>
    pairs = np.kron(np.eye(4), np.ones((2, 2))) / 8
    order = [(0, 0), (1, 1), (0, 1), (1, 0), (0, 2), (1, 3), (0, 3), (1, 2)]
    perm = [4 * s + e for s, e in order]
    rho = np.zeros((8, 8))
    rho[np.ix_(perm, perm)] = pairs
    np.testing.assert_allclose(bell_mixture_rho(), rho, atol=1e-15)
    assert validate(BipartiteState(2, 4, rho)).valid


def test_state_is_read_only_and_checks_dimensions():
    state = BipartiteState(2, 2, np.eye(4) / 4)
    with pytest.raises(ValueError):
        state.rho[0, 0] = 1
    with pytest.raises(DimensionMismatch):
        BipartiteState(2, 3, np.eye(4) / 4)


def test_validation_flags_each_defect():
    bad_trace = validate(BipartiteState(2, 2, np.eye(4) / 2))
    assert not bad_trace.trace_ok and bad_trace.hermitian_ok and bad_trace.positive_ok
    neg = np.diag([1.5, -0.5, 0, 0])
    report = validate(BipartiteState(2, 2, neg))
    assert not report.positive_ok and report.min_eigenvalue == pytest.approx(-0.5)
    skew = np.eye(4) / 4 + 0j
    skew[0, 1] = 0.1
    assert not validate(BipartiteState(2, 2, skew)).hermitian_ok
    with pytest.raises(InvalidState) as err:
        require_valid(BipartiteState(2, 2, neg))
    assert err.value.report.min_eigenvalue < 0


def test_pure_state_norm_is_checked():
    with pytest.raises(InvalidState):
        PureBipartiteState(2, 2, [1, 1, 0, 0])
    psi = PureBipartiteState.normalized(2, 2, [1, 1, 0, 0])
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1)


def test_schmidt_values():
    bell = PureBipartiteState.normalized(2, 2, [1, 0, 0, 1])
    assert linear_entropy_entanglement(bell) == pytest.approx(1.0, abs=1e-14)
    assert float(entropy_batch(bell.amplitudes, 2, 2)) == pytest.approx(1.0, abs=1e-14)
    product = PureBipartiteState(2, 3, np.kron([0.6, 0.8], [0, 1, 0]))
    assert linear_entropy_entanglement(product) == pytest.approx(0.0, abs=1e-15)
    # cos/sin Schmidt coefficients: 2 (1 - c^4 - s^4) = sin^2(2 theta)
    th = 0.3
    psi = PureBipartiteState(2, 2, [np.cos(th), 0, 0, np.sin(th)])
    assert linear_entropy_entanglement(psi) == pytest.approx(np.sin(2 * th) ** 2, abs=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_maximal_linear_entropy_depends_on_dimension(d):
    psi = PureBipartiteState.normalized(d, d, np.eye(d).ravel())
    assert linear_entropy_entanglement(psi) == pytest.approx(2 * (1 - 1 / d), abs=1e-14)
    assert float(entropy_batch(psi.amplitudes, d, d)) == pytest.approx(np.log2(d), abs=1e-12)


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 4), n=st.integers(1, 4))
@settings(max_examples=50, deadline=None)
def test_local_unitary_invariance(seed, m, n):
    rng = np.random.default_rng(seed)
    psi = random_pure(m * n, rng)
    u = np.kron(haar_unitary(m, rng), haar_unitary(n, rng))
    for f in (linear_entropy_batch, entropy_batch):
        assert f(u @ psi, m, n) == pytest.approx(f(psi, m, n), abs=1e-12)


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 4), n=st.integers(1, 4))
@settings(max_examples=50, deadline=None)
def test_reduced_states_share_spectrum(seed, m, n):
    psi = PureBipartiteState(m, n, random_pure(m * n, np.random.default_rng(seed)))
    ev_s = np.linalg.eigvalsh(reduced_state(psi, "s"))
    ev_e = np.linalg.eigvalsh(reduced_state(psi, "e"))
    k = min(m, n)
    np.testing.assert_allclose(ev_s[-k:], ev_e[-k:], atol=1e-12)
    assert von_neumann_entropy(reduced_state(psi, "e")) == pytest.approx(
        float(entropy_batch(psi.amplitudes, m, n)), abs=1e-10
    )


def test_weighted_fast_path_matches_normalized(rng):
    for m, n in ((2, 4), (3, 2), (4, 4)):
        psi = rng.standard_normal((7, m * n)) + 1j * rng.standard_normal((7, m * n))
        w = np.sum(np.abs(psi) ** 2, axis=1)
        ref = w * linear_entropy_batch(psi / np.sqrt(w)[:, None], m, n)
        np.testing.assert_allclose(linear_entropy_batch.weighted(psi, m, n), ref, atol=1e-12)
    assert linear_entropy_batch.weighted(np.zeros((1, 4)), 2, 2)[0] == 0
