"""Qubit coupled to a spin-like environment: block Hamiltonian and Gibbs states.

Block ``m`` lives on ``{|up m1>, |up m2>, |down m1>, |down m2>}``.  Its coupled
pair ``|up m1>, |down m2>`` carries the entangled eigenstates; the other two
levels are separable with energy ``E_m``.  Energies are in eV with ``k_B = 1``,
so temperatures are in eV as well.
"""
import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import numkernel as nk
from .errors import InfiniteModeUnsupported, NonPositiveTemperature, OutOfRange
from .measures import concurrence, eof_from_concurrence

MIDPOINT = "midpoint"
INFINITE = "infinite"
EXPLICIT = "explicit"

COUPLED = (0, 3)
SEPARABLE = (1, 2)


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of the block Hamiltonian.

    ``alpha`` defaults to ``1/sqrt(K)``.  ``separable_mode`` fixes the energy
    ``E_m`` of the two separable levels: the mean of the coupled diagonal
    energies, infinity (levels dropped), or ``separable_energy`` verbatim.
    """

    K: int
    omega: float = 1.0
    alpha: Optional[float] = None
    separable_mode: str = MIDPOINT
    separable_energy: Optional[float] = None
    m_subset: Optional[tuple] = None

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise OutOfRange(f"K must be a positive integer, got {self.K}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 1.0 / math.sqrt(self.K))
        if not self.alpha > 0:
            raise OutOfRange(f"alpha must be positive, got {self.alpha}")
        if self.separable_mode not in (MIDPOINT, INFINITE, EXPLICIT):
            raise ValueError(f"unknown separable mode {self.separable_mode!r}")
        if self.separable_mode == EXPLICIT and self.separable_energy is None:
            raise ValueError("explicit separable mode needs separable_energy")
        ms = tuple(range(-self.K, self.K + 1)) if self.m_subset is None else tuple(sorted(set(self.m_subset)))
        if not ms:
            raise OutOfRange("m_subset is empty")
        if ms[0] < -self.K or ms[-1] > self.K:
            raise OutOfRange(f"m_subset must lie within -{self.K}..{self.K}")
        object.__setattr__(self, "m_subset", ms)

    @property
    def finite(self) -> bool:
        return self.separable_mode != INFINITE

    def coupled_energies(self, m: int) -> tuple:
        """``(E_m1, E_m2, M_m)``."""
        a, w, k = self.alpha, self.omega, self.K
        e1 = a * (m + w / 2)
        e2 = -a * (m + 1 + w / 2)
        coupling = a * math.sqrt(k * (k + 1) - m * (m + 1))
        return e1, e2, coupling

    def separable_level(self, m: int) -> float:
        if self.separable_mode == MIDPOINT:
            e1, e2, _ = self.coupled_energies(m)
            return 0.5 * (e1 + e2)
        if self.separable_mode == INFINITE:
            return math.inf
        return float(self.separable_energy)


def parse_mode(text: str) -> tuple:
    """``"midpoint"``, ``"infinite"`` or ``"explicit:<value>"`` -> ``(mode, value)``."""
    if text in (MIDPOINT, INFINITE):
        return text, None
    if text.startswith(EXPLICIT + ":"):
        return EXPLICIT, float(text.split(":", 1)[1])
    raise ValueError(f"mode must be midpoint, infinite or explicit:<value>, got {text!r}")


def build_block(spec: ModelSpec, m: int) -> np.ndarray:
    """4 x 4 block Hamiltonian; dropped separable levels carry ``inf`` on the diagonal."""
    if m not in spec.m_subset:
        raise OutOfRange(f"m = {m} is not among the model's blocks")
    e1, e2, coupling = spec.coupled_energies(m)
    em = spec.separable_level(m)
    h = np.diag(np.array([e1, em, em, e2], dtype=np.complex128))
    h[0, 3] = coupling
    h[3, 0] = np.conj(coupling)
    return h


def block_spectrum(spec: ModelSpec, m: int) -> tuple:
    """Eigenvalues (``inf`` for dropped levels) and eigenvectors of one block."""
    h = build_block(spec, m)
    values = np.full(4, np.inf)
    vectors = np.zeros((4, 4), dtype=np.complex128)
    idx = list(COUPLED)
    sub_vals, sub_vecs = nk.eig_hermitian(h[np.ix_(idx, idx)])
    values[:2] = sub_vals
    vectors[np.ix_(idx, [0, 1])] = sub_vecs
    for k, level in enumerate(SEPARABLE):
        values[2 + k] = h[level, level].real
        vectors[level, 2 + k] = 1.0
    return values, vectors


@dataclass(frozen=True)
class GibbsBlocks:
    ms: tuple
    p: np.ndarray
    rho: np.ndarray
    Z: float
    ground_energy: float


class ThermalModel:
    """Block spectra of a :class:`ModelSpec`, diagonalized once for many temperatures."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        self.ms = spec.m_subset
        spectra = [block_spectrum(spec, m) for m in self.ms]
        self.values = np.array([s[0] for s in spectra])
        self.vectors = np.array([s[1] for s in spectra])
        finite = self.values[np.isfinite(self.values)]
        self.ground_energy = float(finite.min())
        self.top_energy = float(finite.max())

    def excitation_gap(self) -> float:
        """Distance from the ground energy to the next distinct level."""
        finite = np.sort(self.values[np.isfinite(self.values)])
        scale = max(abs(self.ground_energy), abs(self.top_energy), 1.0)
        above = finite[finite > self.ground_energy + 1e-12 * scale]
        return float(above[0] - self.ground_energy) if above.size else scale

    def gibbs(self, T: float) -> GibbsBlocks:
        if not T > 0:
            raise NonPositiveTemperature(f"temperature must be positive, got {T}")
        # each block is normalized against its own lowest level, so far-away
        # blocks keep a well-defined state even when their weight underflows
        block_min = np.min(self.values, axis=1)
        local = self.values - block_min[:, None]
        with np.errstate(invalid="ignore"):
            x = np.where(np.isfinite(local), -local / T, -np.inf)
        weights = np.exp(x)
        local_sum = weights.sum(axis=1)
        rho = np.einsum("mik,mk,mjk->mij", self.vectors, weights, self.vectors.conj())
        rho /= local_sum[:, None, None]
        log_w = np.log(local_sum) - (block_min - self.ground_energy) / T
        w = np.exp(log_w)
        Z = float(w.sum())
        return GibbsBlocks(self.ms, w / Z, rho, Z, self.ground_energy)


def gibbs_blocks(spec: ModelSpec, T: float) -> GibbsBlocks:
    """Per-block probabilities ``p_m`` and normalized states of the Gibbs state.

    Energies are measured from the global ground level, so ``Z`` is the
    partition function of the shifted Hamiltonian.
    """
    return ThermalModel(spec).gibbs(T)


@dataclass(frozen=True)
class SweepRecord:
    T: float
    E_total: float
    Z: float
    ms: tuple
    p: tuple
    components: tuple

    def component(self, m: int) -> float:
        return self.components[self.ms.index(m)]


def sweep(spec: ModelSpec, temperatures: Sequence[float]) -> list:
    """Block-averaged entanglement of formation at each temperature."""
    temps = [float(t) for t in temperatures]
    if not temps:
        raise ValueError("temperature list is empty")
    model = ThermalModel(spec)
    records = []
    for T in temps:
        g = model.gibbs(T)
        eof = eof_from_concurrence(concurrence(g.rho))
        comps = g.p * eof
        records.append(
            SweepRecord(T, float(comps.sum()), g.Z, g.ms, tuple(g.p.tolist()), tuple(comps.tolist()))
        )
    return records


def default_temperatures(spec: ModelSpec, n: int = 400) -> np.ndarray:
    """Geometric grid resolving both the zero-temperature limit and full mixing.

    The grid starts at 1/50 of the excitation gap above the ground level and
    ends at the width of the (finite) spectrum.
    """
    model = ThermalModel(spec)
    t_min = model.excitation_gap() / 50.0
    t_max = model.top_energy - model.ground_energy
    return temperature_grid(t_min, t_max, n)


def temperature_grid(t_min: float, t_max: float, n: int) -> np.ndarray:
    if not (0 < t_min < t_max) or n < 2:
        raise ValueError(f"need 0 < t_min < t_max and n >= 2, got {t_min}, {t_max}, {n}")
    return np.geomspace(t_min, t_max, n)


def sudden_death_temperature(records: Sequence[SweepRecord], eps: float = 1e-9) -> Optional[float]:
    """Smallest grid temperature beyond which ``E_total`` stays below ``eps``."""
    return _death([r.E_total for r in records], [r.T for r in records], eps)


def component_death_temperatures(records: Sequence[SweepRecord], eps: float = 1e-9) -> dict:
    temps = [r.T for r in records]
    ms = records[0].ms
    return {m: _death([r.components[k] for r in records], temps, eps) for k, m in enumerate(ms)}


def _death(values, temps, eps) -> Optional[float]:
    death = None
    for T, v in zip(reversed(temps), reversed(values)):
        if v >= eps:
            break
        death = T
    return death


def assemble_full_hamiltonian(spec: ModelSpec) -> tuple:
    """Full ``2 x 2L`` Hamiltonian; E states ordered ``(m1, m2)`` per block, ascending ``m``."""
    if not spec.finite:
        raise InfiniteModeUnsupported("infinite separable energies have no finite matrix form")
    n_e = 2 * len(spec.m_subset)
    h = np.zeros((2 * n_e, 2 * n_e), dtype=np.complex128)
    for j, m in enumerate(spec.m_subset):
        hb = build_block(spec, m)
        for s in range(2):
            for a in range(2):
                for t in range(2):
                    for b in range(2):
                        h[s * n_e + 2 * j + a, t * n_e + 2 * j + b] = hb[2 * s + a, 2 * t + b]
    return h, 2, n_e


def gibbs_state(h, T: float) -> np.ndarray:
    """``exp(-H/T)/Z`` of an arbitrary Hamiltonian, shifted by its ground energy."""
    if not T > 0:
        raise NonPositiveTemperature(f"temperature must be positive, got {T}")
    h = nk.symmetrize(h)
    e0 = nk.eig_hermitian(h).values[0]
    rho = nk.expm_hermitian_scaled(h - e0 * np.eye(h.shape[0]), -1.0 / T)
    return rho / np.trace(rho).real


def write_sweep_csv(records: Sequence[SweepRecord], fh, footer: Optional[str] = None) -> None:
    """``T,E_total,Z,comp_m=<m>...`` with 12 significant digits."""
    ms = records[0].ms if records else ()
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["T", "E_total", "Z"] + [f"comp_m={m}" for m in ms])
    for r in records:
        writer.writerow([f"{v:.12g}" for v in (r.T, r.E_total, r.Z) + tuple(r.components)])
    if footer:
        fh.write(f"# {footer}\n")


def read_sweep_csv(fh) -> tuple:
    """Parse a sweep CSV back into ``(ms, rows, comments)``; rows are float lists."""
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    comments = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    data = [ln for ln in lines if not ln.startswith("#")]
    reader = csv.reader(data)
    header = next(reader)
    ms = tuple(int(h.split("=", 1)[1]) for h in header[3:])
    rows = [[float(v) for v in row] for row in reader]
    return ms, rows, comments
