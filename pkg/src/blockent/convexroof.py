"""Convex-roof estimation over pure-state decompositions.

Every decomposition of a rank-``r`` density matrix ``rho = sum_k lam_k |v_k><v_k|``
is generated by an isometry ``U`` (``K x r``, ``U^dagger U = 1``) through the
unnormalized members ``psi_n = sum_k U[n, k] sqrt(lam_k) v_k``.  The minimizer
samples Haar isometries and then lowers the average entanglement with
two-member unitary rotations, which keep ``sum_n |psi_n><psi_n|`` fixed.

The module also carries the superposition split used to compare a pure state
straddling two E subspaces with its block-diagonal counterpart.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import numkernel as nk
from .bipartite import PureBipartiteState, entropy_batch, linear_entropy_batch
from .errors import (
    BudgetZero,
    DimensionMismatch,
    EmptyBranch,
    NotBlockDiagonal,
    NotIsometry,
    RankMismatch,
)

PureMeasure = Callable[[np.ndarray, int, int], np.ndarray]

MEASURES = {
    "linear_entropy": linear_entropy_batch,
    "entropy": entropy_batch,
}

RANK_TOL = 1e-10
ISOMETRY_TOL = 1e-10
BRANCH_TOL = 1e-12

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
_TINY = 1e-300


@dataclass(frozen=True)
class Decomposition:
    """Pure-state decomposition ``rho = sum_n probs[n] |states[n]><states[n]|``."""

    dim_s: int
    dim_e: int
    states: np.ndarray
    probs: np.ndarray

    def __len__(self):
        return len(self.probs)

    def density_matrix(self) -> np.ndarray:
        s = self.states
        return (s.T * self.probs) @ s.conj()

    def members(self) -> list:
        return [PureBipartiteState(self.dim_s, self.dim_e, s) for s in self.states]

    @classmethod
    def from_unnormalized(cls, dim_s, dim_e, psi: np.ndarray, drop_tol: float = 0.0):
        weights = np.sum(np.abs(psi) ** 2, axis=1)
        keep = weights > drop_tol
        psi, weights = psi[keep], weights[keep]
        return cls(dim_s, dim_e, psi / np.sqrt(weights)[:, None], weights)


@dataclass(frozen=True)
class RoofResult:
    value: float
    decomposition: Decomposition
    raw_best: float
    samples_used: int


def _resolve(measure) -> PureMeasure:
    if isinstance(measure, str):
        return MEASURES[measure]
    return measure


def weighted_measure(psi: np.ndarray, dim_s: int, dim_e: int, measure: PureMeasure) -> np.ndarray:
    """``|psi|^2 * E(psi / |psi|)`` along the last axis; zero vectors give zero."""
    fast = getattr(measure, "weighted", None)
    if fast is not None:
        return fast(psi, dim_s, dim_e)
    w = np.sum(psi.real**2 + psi.imag**2, axis=-1)
    safe = np.where(w > 0, w, 1.0)
    values = measure(psi / np.sqrt(safe)[..., None], dim_s, dim_e)
    return np.where(w > 0, w * values, 0.0)


def weighted_eigenvectors(rho: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Rows ``sqrt(lam_k) v_k`` for the eigenvalues above ``rank_tol * lam_max``."""
    values, vectors = nk.eig_hermitian(rho)
    keep = values > rank_tol * values[-1]
    return (vectors[:, keep] * np.sqrt(values[keep])).T[::-1]


def decompose_from_isometry(
    rho, isometry, dim_s: int, dim_e: int, rank_tol: float = RANK_TOL
) -> Decomposition:
    rho = nk.as_matrix(rho)
    u = np.asarray(isometry, dtype=np.complex128)
    x = weighted_eigenvectors(rho, rank_tol)
    r = x.shape[0]
    if u.ndim != 2 or u.shape[1] != r:
        raise RankMismatch(f"isometry has {u.shape[-1]} columns but rho has rank {r}")
    if u.shape[0] < r:
        raise NotIsometry(f"isometry with {u.shape[0]} rows cannot have rank {r}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(r)))
    if dev > ISOMETRY_TOL:
        raise NotIsometry(f"U^dagger U deviates from identity by {dev:.3e}")
    return Decomposition.from_unnormalized(dim_s, dim_e, u @ x)


def average_entanglement(dec: Decomposition, measure="linear_entropy") -> float:
    values = _resolve(measure)(dec.states, dec.dim_s, dec.dim_e)
    return float(np.dot(dec.probs, values))


def haar_isometry(k: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``k x r`` isometry from the QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))) / np.sqrt(2.0)
    q, rr = np.linalg.qr(z)
    d = np.diagonal(rr)
    return q * (d / np.abs(d))


def _round_robin(k: int) -> list:
    """Rounds of disjoint pairs covering every pair of ``range(k)`` once."""
    players = list(range(k)) + ([None] if k % 2 else [])
    n = len(players)
    rounds = []
    for _ in range(n - 1):
        pairs = [
            (players[i], players[n - 1 - i])
            for i in range(n // 2)
            if players[i] is not None and players[n - 1 - i] is not None
        ]
        rounds.append([tuple(sorted(p)) for p in pairs])
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _golden_min(evaluate, lo, hi, iters: int) -> tuple:
    """Vectorized golden-section search; ``evaluate`` maps ``(P,)`` points to ``(P,)`` costs."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = evaluate(x1), evaluate(x2)
    for _ in range(iters):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        new_x = np.where(left, hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo))
        new_f = evaluate(new_x)
        x2, f2, x1, f1 = (
            np.where(left, x1, new_x),
            np.where(left, f1, new_f),
            np.where(left, new_x, x2),
            np.where(left, new_f, f2),
        )
    best_left = f1 < f2
    return np.where(best_left, x1, x2), np.where(best_left, f1, f2)


class _PairSearch:
    """Line search of the two-member rotation for several disjoint pairs at once.

    The rotation mixing rows ``a`` and ``b`` is
    ``a' = cos t a - e^{i f} sin t b``, ``b' = e^{-i f} sin t a + cos t b``.
    """

    def __init__(self, dim_s, dim_e, measure, golden_iters: int = 10):
        self.dim_s = dim_s
        self.dim_e = dim_e
        self.measure = measure
        self.golden_iters = golden_iters
        t = np.linspace(-np.pi / 2, np.pi / 2, 12, endpoint=False) + np.pi / 24
        f = np.linspace(0.0, 2 * np.pi, 4, endpoint=False)
        tt, ff = np.meshgrid(t, f, indexing="ij")
        self.grid_t = tt.ravel()
        self.grid_f = ff.ravel()

    def cost(self, a, b, t, f):
        """Pair cost for angle arrays ``t, f`` of shape ``(P, G)``; ``a, b`` are ``(P, d)``."""
        c = np.cos(t)[..., None]
        s = np.sin(t)[..., None]
        ph = np.exp(1j * f)[..., None]
        a_ = a[:, None, :]
        b_ = b[:, None, :]
        new_a = c * a_ - ph * s * b_
        new_b = s * a_ / ph + c * b_
        return weighted_measure(new_a, self.dim_s, self.dim_e, self.measure) + weighted_measure(
            new_b, self.dim_s, self.dim_e, self.measure
        )

    def _golden(self, a, b, lo, hi, fixed, vary_angle: bool):
        def evaluate(x):
            if vary_angle:
                return self.cost(a, b, x[:, None], fixed[:, None])[:, 0]
            return self.cost(a, b, fixed[:, None], x[:, None])[:, 0]

        return _golden_min(evaluate, lo, hi, self.golden_iters)

    def search(self, a, b, current):
        """Best rotation per pair; returns ``(t, f, cost)`` with cost <= current."""
        p = a.shape[0]
        gt = np.broadcast_to(self.grid_t, (p, self.grid_t.size))
        gf = np.broadcast_to(self.grid_f, (p, self.grid_f.size))
        grid = self.cost(a, b, gt, gf)
        k = np.argmin(grid, axis=1)
        t0 = self.grid_t[k]
        f0 = self.grid_f[k]
        step_t = np.pi / 12
        t1, _ = self._golden(a, b, t0 - step_t, t0 + step_t, f0, vary_angle=True)
        f1, cost = self._golden(a, b, f0 - np.pi / 4, f0 + np.pi / 4, t1, vary_angle=False)
        better = cost < current
        zero = np.zeros(p)
        return (
            np.where(better, t1, zero),
            np.where(better, f1, zero),
            np.where(better, cost, current),
        )


class _LinearEntropyPairSearch:
    """Pair search specialized to the linear entropy.

    After the rotation, the reduced Gram matrix of ``a'`` is
    ``c^2 A + s^2 B - c s cos(f) H1 - c s sin(f) H2`` with fixed Hermitian
    ``A, B, H1, H2``, and the partner's Gram matrix is ``A + B`` minus it.
    Weights and purities are then linear and quadratic forms in four
    coefficients, so whole grids of angles are evaluated in one call: a coarse
    ``(t, f)`` grid followed by alternating 1-d grids that shrink each pass.
    """

    def __init__(self, dim_s, dim_e, n_t: int = 16, n_f: int = 16, fine: int = 33, passes: int = 6):
        self.dim_s = dim_s
        self.dim_e = dim_e
        # (t, f) and (t + pi/2, f) give the same pair of members, so t spans pi/2
        t = np.linspace(-np.pi / 4, np.pi / 4, n_t, endpoint=False)
        f = np.linspace(0.0, 2 * np.pi, n_f, endpoint=False)
        tt, ff = np.meshgrid(t, f, indexing="ij")
        self.grid_t = tt.ravel()
        self.grid_f = ff.ravel()
        q = self._coefficients(self.grid_t, self.grid_f)
        self.grid_q = np.swapaxes(q, -1, -2).copy()
        self.grid_qq = np.swapaxes(self._outer(q), -1, -2).copy()
        # alternating t and f passes over a shrinking shared grid of offsets
        offsets = np.linspace(-1.0, 1.0, fine)
        widths = [np.pi / (2 * n_t), 2 * np.pi / n_f]
        self.schedule = []
        for i in range(passes):
            delta = widths[i % 2] * offsets
            widths[i % 2] *= 2.0 / (fine - 1)
            self.schedule.append((delta, self._basis(2 * delta if i % 2 == 0 else delta)))

    def _forms(self, a, b):
        m, n = self.dim_s, self.dim_e
        ca = a.reshape(-1, m, n)
        cb = b.reshape(-1, m, n)
        if m > n:
            # C^T conj(C) has the purity of C C^dagger and keeps the phase convention
            ca = np.swapaxes(ca, -1, -2)
            cb = np.swapaxes(cb, -1, -2)
        cbh = np.swapaxes(cb.conj(), -1, -2)
        x = cb @ np.swapaxes(ca.conj(), -1, -2)
        xh = np.swapaxes(x.conj(), -1, -2)
        mats = np.stack([ca @ np.swapaxes(ca.conj(), -1, -2), cb @ cbh, x + xh, 1j * (x - xh)], axis=1)
        vec = mats.reshape(mats.shape[0], 4, -1)
        # Re tr(M_k M_l) = Re <M_l, M_k> for Hermitian M
        quad = (vec @ np.swapaxes(vec.conj(), -1, -2)).real
        lin = np.trace(mats, axis1=-2, axis2=-1).real
        return quad, lin

    @staticmethod
    def _coefficients(t, f):
        """Coefficient vectors of both rotated members, shape ``(2, *t.shape, 4)``."""
        c, s = np.cos(t), np.sin(t)
        cs = c * s
        u, v = cs * np.cos(f), cs * np.sin(f)
        q = np.empty((2,) + np.shape(t) + (4,))
        q[0, ..., 0] = q[1, ..., 1] = c * c
        q[0, ..., 1] = q[1, ..., 0] = s * s
        q[0, ..., 2], q[1, ..., 2] = -u, u
        q[0, ..., 3], q[1, ..., 3] = -v, v
        return q

    @staticmethod
    def _outer(q):
        return (q[..., :, None] * q[..., None, :]).reshape(q.shape[:-1] + (16,))

    @staticmethod
    def _combine(w0, p0, w1, p1):
        # a member of zero weight has zero purity, so the floor only avoids 0/0
        return 2.0 * (w0 + w1 - p0 / np.maximum(w0, _TINY) - p1 / np.maximum(w1, _TINY))

    @staticmethod
    def _basis(delta):
        """``[1, cos, sin]`` of the offsets and its flattened outer product."""
        b = np.stack([np.ones_like(delta), np.cos(delta), np.sin(delta)])
        return b, (b[:, None, :] * b[None, :, :]).reshape(9, -1)

    def _t_frame(self, t, f):
        # q(t + d) = u0 + cos(2d) v1 + sin(2d) v2, negated v's for the partner
        c2, s2 = np.cos(2 * t), np.sin(2 * t)
        cf, sf = 0.5 * np.cos(f), 0.5 * np.sin(f)
        v = np.zeros((t.size, 2, 3, 4))
        v[:, :, 0, :2] = 0.5
        v0 = v[:, 0]
        v0[:, 1, 0], v0[:, 1, 1], v0[:, 1, 2], v0[:, 1, 3] = 0.5 * c2, -0.5 * c2, -s2 * cf, -s2 * sf
        v0[:, 2, 0], v0[:, 2, 1], v0[:, 2, 2], v0[:, 2, 3] = -0.5 * s2, 0.5 * s2, -c2 * cf, -c2 * sf
        v[:, 1, 1:] = -v0[:, 1:]
        return v

    def _f_frame(self, t, f):
        # q(f + d) = u0 + cos(d) v1 + sin(d) v2
        c, s = np.cos(t), np.sin(t)
        cs = c * s
        cf, sf = cs * np.cos(f), cs * np.sin(f)
        v = np.zeros((t.size, 2, 3, 4))
        v[:, 0, 0, 0] = v[:, 1, 0, 1] = c * c
        v[:, 0, 0, 1] = v[:, 1, 0, 0] = s * s
        v0 = v[:, 0]
        v0[:, 1, 2], v0[:, 1, 3], v0[:, 2, 2], v0[:, 2, 3] = -cf, -sf, sf, -cf
        v[:, 1, 1:] = -v0[:, 1:]
        return v

    def _scan(self, frame, quad, lin, basis):
        """Costs on the shared offset grid, shape ``(P, F)``."""
        b, bb = basis
        forms = (frame @ quad[:, None] @ np.swapaxes(frame, -1, -2)).reshape(frame.shape[:2] + (9,))
        w = (frame @ lin[:, None, :, None])[..., 0] @ b
        pur = forms @ bb
        return self._combine(w[:, 0], pur[:, 0], w[:, 1], pur[:, 1])

    def search(self, a, b, current):
        quad, lin = self._forms(a, b)
        p = a.shape[0]
        rows = np.arange(p)
        # coarse grid: the coefficient vectors are shared by all pairs
        w = lin @ self.grid_q
        pur = quad.reshape(-1, 16) @ self.grid_qq
        grid = self._combine(w[0], pur[0], w[1], pur[1])
        k = np.argmin(grid, axis=1)
        t, f = self.grid_t[k], self.grid_f[k]
        cost = grid[rows, k]
        for i, (delta, basis) in enumerate(self.schedule):
            if i % 2 == 0:
                j = np.argmin(vals := self._scan(self._t_frame(t, f), quad, lin, basis), axis=1)
                t = t + delta[j]
            else:
                j = np.argmin(vals := self._scan(self._f_frame(t, f), quad, lin, basis), axis=1)
                f = f + delta[j]
            cost = vals[rows, j]
        better = cost < current
        zero = np.zeros(p)
        return np.where(better, t, zero), np.where(better, f, zero), np.where(better, cost, current)


def refine(
    psi: np.ndarray,
    dim_s: int,
    dim_e: int,
    measure="linear_entropy",
    iters: int = 200,
    stop: float = 1e-9,
    target: float = -np.inf,
) -> tuple:
    """Lower the average entanglement of the unnormalized rows ``psi``.

    One iteration is a full round-robin sweep over all member pairs; sweeps
    stop once the total improvement falls below ``stop``.  With a ``target``
    the run is abandoned as soon as repeating the last sweep's improvement for
    every remaining sweep could not bring the value below it.
    """
    measure = _resolve(measure)
    psi = np.array(psi, dtype=np.complex128)
    k = psi.shape[0]
    per_row = weighted_measure(psi, dim_s, dim_e, measure)
    if k < 2:
        return psi, float(per_row.sum())
    if measure is linear_entropy_batch:
        search = _LinearEntropyPairSearch(dim_s, dim_e)
    else:
        search = _PairSearch(dim_s, dim_e, measure)
    rounds = [np.array(r) for r in _round_robin(k)]
    for sweep in range(iters):
        before = per_row.sum()
        for pairs in rounds:
            i, j = pairs[:, 0], pairs[:, 1]
            a, b = psi[i], psi[j]
            t, f, _ = search.search(a, b, per_row[i] + per_row[j])
            c = np.cos(t)[:, None]
            s = np.sin(t)[:, None]
            ph = np.exp(1j * f)[:, None]
            psi[i] = c * a - ph * s * b
            psi[j] = s * a / ph + c * b
            pair_vals = weighted_measure(np.stack([psi[i], psi[j]]), dim_s, dim_e, measure)
            per_row[i], per_row[j] = pair_vals[0], pair_vals[1]
        after = per_row.sum()
        gain = before - after
        if gain < stop or after - target > gain * (iters - sweep - 1):
            break
    return psi, float(per_row.sum())


def minimize_roof(
    rho,
    dim_s: int,
    dim_e: int,
    measure="linear_entropy",
    samples: int = 512,
    k_max: Optional[int] = None,
    refine_iters: int = 200,
    seed: int = 0,
    rank_tol: float = RANK_TOL,
) -> RoofResult:
    """Upper bound on the convex roof of ``measure`` for ``rho``.

    Candidate decompositions are the eigendecomposition followed by Haar
    isometries whose size ``K`` cycles through ``r..k_max`` (default ``r**2``).
    Each candidate whose raw value beats all earlier raw values is refined
    with pairwise rotations; a refinement that can no longer reach the best
    value found so far is cut short.  Everything a candidate sees depends only
    on the samples before it, so the result is nonincreasing in ``samples``
    for a fixed seed.
    """
    if samples < 1 or refine_iters < 0:
        raise BudgetZero(f"need samples >= 1 and refine_iters >= 0, got {samples}, {refine_iters}")
    measure = _resolve(measure)
    rho = nk.as_matrix(rho)
    if rho.shape[0] != dim_s * dim_e:
        raise DimensionMismatch(f"rho of dimension {rho.shape[0]} is not {dim_s} x {dim_e}")
    x = weighted_eigenvectors(rho, rank_tol)
    r = x.shape[0]
    if r == 1:
        dec = Decomposition.from_unnormalized(dim_s, dim_e, x)
        value = average_entanglement(dec, measure)
        return RoofResult(value, dec, value, 0)
    k_max = r * r if k_max is None else max(int(k_max), r)
    rng = np.random.default_rng(seed)

    best_value = np.inf
    best_psi = None
    raw_best = np.inf
    for n in range(samples):
        if n == 0:
            psi = x.copy()
        else:
            k = r + (n - 1) % (k_max - r + 1)
            psi = haar_isometry(k, r, rng) @ x
        raw = float(weighted_measure(psi, dim_s, dim_e, measure).sum())
        if raw < raw_best:
            raw_best = raw
            if refine_iters:
                psi, raw = refine(psi, dim_s, dim_e, measure, refine_iters, target=best_value)
            if raw < best_value:
                best_value, best_psi = raw, psi
    dec = Decomposition.from_unnormalized(dim_s, dim_e, best_psi)
    return RoofResult(float(best_value), dec, float(raw_best), samples)


# superposition splits across two disjoint E subspaces


@dataclass(frozen=True)
class SuperpositionSplit:
    """``psi = alpha psi1 + beta psi2`` with ``psi1, psi2`` on disjoint E sets.

    ``x[i, s]`` is the amplitude of ``|s>`` in branch ``i`` and ``phi[i, s]``
    the normalized E state attached to it, so that
    ``psi_i = sum_s x[i, s] |s> (x) |phi[i, s]>``.  ``alpha`` and ``beta`` are
    taken real and nonnegative; the phases live in ``psi1`` and ``psi2``.
    """

    dim_s: int
    dim_e: int
    alpha: float
    beta: float
    psi1: np.ndarray
    psi2: np.ndarray
    x: np.ndarray
    phi: np.ndarray
    e_sets: tuple

    @property
    def psi(self) -> np.ndarray:
        return self.alpha * self.psi1 + self.beta * self.psi2

    def overlaps(self, branch: int) -> np.ndarray:
        """Gram matrix ``<phi_i^s|phi_i^s'>`` of the E states in one branch."""
        ph = self.phi[branch]
        return ph.conj() @ ph.T


def _branch_parts(c: np.ndarray):
    norms = np.linalg.norm(c, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return norms, c / safe[:, None]


def split_superposition(psi, e_partition: Sequence, strict: bool = True) -> SuperpositionSplit:
    """Project a pure state onto two disjoint E-index sets.

    With ``strict`` (the default) a branch of weight below 1e-12 raises
    :class:`EmptyBranch`, carrying the split so the caller may proceed with a
    single-block state.
    """
    if not isinstance(psi, PureBipartiteState):
        raise TypeError("psi must be a PureBipartiteState")
    m, n = psi.dim_s, psi.dim_e
    set1, set2 = (tuple(sorted(int(i) for i in s)) for s in e_partition)
    if set(set1) & set(set2):
        raise ValueError("E-index sets must be disjoint")
    c = psi.matrix()
    outside = np.setdiff1d(np.arange(n), np.array(set1 + set2, dtype=int))
    if outside.size and np.linalg.norm(c[:, outside]) > BRANCH_TOL:
        raise ValueError("psi has weight outside the two E-index sets")

    branches, weights = [], []
    for s in (set1, set2):
        b = np.zeros_like(c)
        b[:, list(s)] = c[:, list(s)]
        weights.append(float(np.linalg.norm(b)))
        branches.append(b)
    alpha, beta = weights
    unit = [b / w if w > 0 else b for b, w in zip(branches, weights)]
    xs, phis = zip(*(_branch_parts(u) for u in unit))
    split = SuperpositionSplit(
        m, n, alpha, beta,
        unit[0].ravel(), unit[1].ravel(),
        np.array(xs), np.array(phis),
        (set1, set2),
    )
    if strict and min(alpha, beta) < BRANCH_TOL:
        raise EmptyBranch(f"branch weights ({alpha:.3e}, {beta:.3e}): state lies in one block", split)
    return split


def _linear_entropy(vec: np.ndarray, m: int, n: int) -> float:
    norm2 = float(np.vdot(vec, vec).real)
    if norm2 == 0:
        return 0.0
    return float(linear_entropy_batch(vec / np.sqrt(norm2), m, n))


def block_diagonal_gap(split: SuperpositionSplit) -> float:
    """``E(psi) - (alpha^2 E(psi1) + beta^2 E(psi2))`` with the linear-entropy measure."""
    m, n = split.dim_s, split.dim_e
    direct = _linear_entropy(split.psi, m, n)
    avg = split.alpha**2 * _linear_entropy(split.psi1, m, n) + split.beta**2 * _linear_entropy(
        split.psi2, m, n
    )
    return direct - avg


def closed_form_gap(split: SuperpositionSplit) -> float:
    """Qubit-QS closed form of :func:`block_diagonal_gap`."""
    a2, b2 = split.alpha**2, split.beta**2
    x, phi = split.x, split.phi
    z = [x[i, 0] * x[i, 1] * np.vdot(phi[i, 0], phi[i, 1]) for i in (0, 1)]
    return 4 * a2 * b2 * ((x[0, 0] ** 2 - x[1, 0] ** 2) ** 2 + abs(z[0] - z[1]) ** 2)


def difference_identity_check(split: SuperpositionSplit) -> tuple:
    """Return ``(direct, closed_form)`` for a qubit-QS superposition split."""
    if split.dim_s != 2:
        raise DimensionMismatch("the closed form needs a qubit QS; use qudit_difference_check")
    return block_diagonal_gap(split), float(closed_form_gap(split))


def qudit_difference_check(split: SuperpositionSplit) -> float:
    return block_diagonal_gap(split)


def _branch_split(states: np.ndarray, dim_s: int, dim_e: int, e_partition) -> list:
    c = states.reshape(len(states), dim_s, dim_e)
    parts = []
    for s in e_partition:
        b = np.zeros_like(c)
        idx = list(s)
        b[:, :, idx] = c[:, :, idx]
        parts.append(b.reshape(len(states), -1))
    return parts


def strip_cross_terms(dec: Decomposition, e_partition: Sequence, tol: float = 1e-8) -> Decomposition:
    """Replace every member by its projections onto the E-index sets.

    The result decomposes the same density matrix provided that matrix has no
    coherence between the sets; otherwise :class:`NotBlockDiagonal` is raised.
    """
    sets = [tuple(sorted(int(i) for i in s)) for s in e_partition]
    parts = _branch_split(dec.states, dec.dim_s, dec.dim_e, sets)
    cross = 0.0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            block = (parts[i].T * dec.probs) @ parts[j].conj()
            cross = max(cross, float(np.max(np.abs(block))))
    if cross > tol:
        raise NotBlockDiagonal(f"decomposed state has cross-block entries up to {cross:.3e}")
    psi = np.concatenate([p * np.sqrt(dec.probs)[:, None] for p in parts])
    return Decomposition.from_unnormalized(dec.dim_s, dec.dim_e, psi, drop_tol=1e-30)
