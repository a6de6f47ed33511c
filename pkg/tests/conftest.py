import numpy as np
import pytest

from blockent import BipartiteState

# (criterion, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_LOG = []


def bell_mixture_rho() -> np.ndarray:
    """Equal mixture of four Bell-like states on a qubit and a 4-level environment.

    ``Psi_ij = (|0 i> + |1 j>)/sqrt2`` and ``Phi_ij = (|1 i> + |0 j>)/sqrt2`` for
    the E pairs (0, 1) and (2, 3), in s-major order.
    """
    def ket(s, e):
        v = np.zeros(8)
        v[4 * s + e] = 1.0
        return v

    states = []
    for i, j in ((0, 1), (2, 3)):
        states.append((ket(0, i) + ket(1, j)) / np.sqrt(2))
        states.append((ket(1, i) + ket(0, j)) / np.sqrt(2))
    return sum(np.outer(v, v) for v in states) / 4


@pytest.fixture
def bell_mixture():
    return BipartiteState(2, 4, bell_mixture_rho())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LOG):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
