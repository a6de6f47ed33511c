"""Convex-roof entanglement of states block diagonal in disjoint environment subspaces."""
from .bipartite import (
    BipartiteState,
    PureBipartiteState,
    ValidationReport,
    entropy_batch,
    linear_entropy_batch,
    linear_entropy_entanglement,
    reduced_state,
    require_valid,
    validate,
    von_neumann_entropy,
)
from .blockfinder import (
    BlockDecomposition,
    detect_blocks,
    detect_hamiltonian_blocks,
    rank_report,
    verify_block_structure,
)
from .convexroof import (
    Decomposition,
    average_entanglement,
    decompose_from_isometry,
    difference_identity_check,
    minimize_roof,
    qudit_difference_check,
    split_superposition,
    strip_cross_terms,
)
from .errors import *  # noqa: F401,F403
from .measures import (
    MeasureResult,
    RoofPolicy,
    binary_entropy,
    block_averaged_entanglement,
    block_entanglement,
    concurrence,
    eof_from_concurrence,
    negativity,
    wootters_eof,
)
from .thermal import (
    ModelSpec,
    ThermalModel,
    assemble_full_hamiltonian,
    build_block,
    default_temperatures,
    gibbs_blocks,
    gibbs_state,
    sudden_death_temperature,
    sweep,
)

__version__ = "0.1.0"
