"""Secrecy measures of tripartite distributions and advantage distillation.

Core objects: :class:`TripartiteDistribution` / :class:`BipartiteDistribution`
(dense, possibly unnormalized probability tensors), :class:`Filtration`
(local stochastic operations that may fail), the secret-bit fraction and
its extractable optima, a numerical lower-bound search for coupled
distributions, and the block-filtering distillation protocol.
"""

from .distributions import (
    BipartiteDistribution,
    CanonicalParams,
    TripartiteDistribution,
    bipartite_from_entries,
    canonical_distribution,
    from_entries,
    marginal_ab,
    point_mass_eve,
    product_with_eve,
    randomization_example,
    satellite_scenario,
    shared_bit,
    tensor_power,
)
from .distill import (
    ProtocolReport,
    SimulationReport,
    binary_entropy,
    block_error_rate,
    bob_uncertainty,
    eve_uncertainty,
    exact_block_statistics,
    minimal_block_length,
    protocol_report,
    simulate_advantage_distillation,
    string_filter,
)
from .errors import SecbitError
from .filtration import (
    DecompositionFactors,
    DecompositionStep,
    Filtration,
    apply,
    apply_bipartite,
    apply_eve,
    decompose,
    embed,
    embed_filtration,
    factor_mixing_step,
    is_reversible,
    lower_shear,
    mixing_matrix,
    recompose,
    reversible_inverse,
    row_gluing,
)
from .measures import (
    MeasureResult,
    mesbf_decoupled,
    mesbf_decoupled_power,
    mesbf_reversible,
    mesbf_reversible_decoupled,
    omega,
    secret_bit_fraction,
    secret_bit_fraction_oracle,
    vartheta,
)
from .optimizer import (
    RandomizationDemo,
    SearchConfig,
    brute_force_mesbf,
    estimate_mesbf,
    local_randomization_demo,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteDistribution",
    "CanonicalParams",
    "DecompositionFactors",
    "DecompositionStep",
    "Filtration",
    "MeasureResult",
    "ProtocolReport",
    "RandomizationDemo",
    "SearchConfig",
    "SecbitError",
    "SimulationReport",
    "TripartiteDistribution",
    "apply",
    "apply_bipartite",
    "apply_eve",
    "binary_entropy",
    "bipartite_from_entries",
    "block_error_rate",
    "bob_uncertainty",
    "brute_force_mesbf",
    "canonical_distribution",
    "decompose",
    "embed",
    "embed_filtration",
    "estimate_mesbf",
    "eve_uncertainty",
    "exact_block_statistics",
    "factor_mixing_step",
    "from_entries",
    "is_reversible",
    "local_randomization_demo",
    "lower_shear",
    "marginal_ab",
    "mesbf_decoupled",
    "mesbf_decoupled_power",
    "mesbf_reversible",
    "mesbf_reversible_decoupled",
    "minimal_block_length",
    "mixing_matrix",
    "omega",
    "point_mass_eve",
    "product_with_eve",
    "protocol_report",
    "randomization_example",
    "recompose",
    "reversible_inverse",
    "row_gluing",
    "satellite_scenario",
    "secret_bit_fraction",
    "secret_bit_fraction_oracle",
    "shared_bit",
    "simulate_advantage_distillation",
    "string_filter",
    "tensor_power",
    "vartheta",
]
