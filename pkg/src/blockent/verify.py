"""Self-verification suites behind ``blockent verify``.

Each suite draws seeded random instances, checks one property, and reports
how many instances passed together with the worst violation seen.
"""
from dataclasses import dataclass

import numpy as np

from .bipartite import BipartiteState, PureBipartiteState
from .convexroof import (
    Decomposition,
    average_entanglement,
    block_diagonal_gap,
    closed_form_gap,
    haar_isometry,
    minimize_roof,
    split_superposition,
    strip_cross_terms,
    weighted_eigenvectors,
)
from .measures import concurrence, eof_from_concurrence, negativity
from .random_states import random_block_diagonal, random_density, random_pure

FAULTS = ("closed-form-sign",)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int
    worst: float

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name:<22} {self.passed}/{self.total}  worst={self.worst:.3e}"


def _suite(name, checks):
    """``checks`` yields ``(ok, violation)`` pairs."""
    passed, total, worst = 0, 0, 0.0
    for ok, violation in checks:
        total += 1
        passed += bool(ok)
        worst = max(worst, float(violation))
    return SuiteResult(name, passed, total, worst)


def difference_identity(trials, rng, fault=None):
    """Qubit QS over two 2-dim E blocks: direct gap equals its closed form and is >= 0."""
    sign = -1.0 if fault == "closed-form-sign" else 1.0
    for _ in range(trials):
        split = split_superposition(PureBipartiteState(2, 4, random_pure(8, rng)), [(0, 1), (2, 3)])
        direct = block_diagonal_gap(split)
        closed = sign * closed_form_gap(split)
        err = abs(direct - closed)
        yield err < 1e-10 and direct >= -1e-12, max(err, -direct)


def qudit_inequality(trials, rng, fault=None):
    for k in range(trials):
        m = 2 + k % 3
        n1, n2 = rng.integers(1, 4, size=2)
        n = int(n1 + n2)
        psi = PureBipartiteState(m, n, random_pure(m * n, rng))
        split = split_superposition(psi, [range(n1), range(n1, n)])
        gap = block_diagonal_gap(split)
        yield gap >= -1e-12, max(-gap, 0.0)


def stripping(trials, rng, fault=None):
    for _ in range(trials):
        rho, partition, _, _ = random_block_diagonal(2, (2, 2), rng)
        x = weighted_eigenvectors(rho)
        r = x.shape[0]
        k = int(rng.integers(r, r + 5))
        dec = Decomposition.from_unnormalized(2, 4, haar_isometry(k, r, rng) @ x)
        before = average_entanglement(dec)
        after = average_entanglement(strip_cross_terms(dec, partition))
        yield before >= after - 1e-10, max(after - before, 0.0)


def negativity_additivity(trials, rng, fault=None):
    for k in range(trials):
        m = 2 + k % 2
        sizes = tuple(int(s) for s in rng.integers(1, 4, size=int(rng.integers(2, 4))))
        rho, _, probs, blocks = random_block_diagonal(m, sizes, rng)
        total = negativity(BipartiteState(m, sum(sizes), rho))
        parts = sum(p * negativity(BipartiteState(m, n, b)) for p, n, b in zip(probs, sizes, blocks))
        err = abs(total - parts)
        yield err < 1e-9, err


def block_roof(trials, rng, fault=None):
    """Full-space sampled roof against the per-block tangle average."""
    for _ in range(trials):
        rho, _, probs, blocks = random_block_diagonal(2, (2, 2), rng, ranks=(2, 2))
        full = minimize_roof(rho, 2, 4, "linear_entropy", samples=128, refine_iters=200, seed=int(rng.integers(2**31)))
        exact = float(sum(p * concurrence(b) ** 2 for p, b in zip(probs, blocks)))
        gap = full.value - exact
        yield -1e-9 <= gap <= 2e-3, max(gap, -gap - 1e-9, 0.0)


def wootters_oracle(trials, rng, fault=None):
    """Pure two-qubit states: ``C = 2 |a d - b c|`` and EoF equals the entanglement entropy."""
    for _ in range(trials):
        v = random_pure(4, rng)
        c_ref = 2 * abs(v[0] * v[3] - v[1] * v[2])
        c = float(concurrence(np.outer(v, v.conj())))
        lam = np.linalg.svd(v.reshape(2, 2), compute_uv=False) ** 2
        lam = lam[lam > 0]
        s = float(-np.sum(lam * np.log2(lam)))
        err = max(abs(c - c_ref), abs(float(eof_from_concurrence(c)) - s))
        yield err < 1e-9, err


SUITES = (
    ("difference_identity", difference_identity, 1.0),
    ("qudit_inequality", qudit_inequality, 1.0),
    ("stripping", stripping, 0.2),
    ("negativity_additivity", negativity_additivity, 1.0),
    ("block_roof", block_roof, 0.005),
    ("wootters_oracle", wootters_oracle, 1.0),
)


def run_suites(trials: int = 1000, seed: int = 0, fault=None) -> list:
    """Run every suite; ``trials`` is scaled down for the expensive ones."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    seeds = np.random.SeedSequence(seed).spawn(len(SUITES))
    results = []
    for (name, fn, scale), ss in zip(SUITES, seeds):
        n = max(1, int(round(trials * scale)))
        results.append(_suite(name, fn(n, np.random.default_rng(ss), fault)))
    return results
