"""Data-parallel particle filter resampling.

Multinomial, stratified, systematic, Metropolis, and rejection resamplers
with reproducible counter-based randomness; conversions and permutations of
ancestry vectors for conflict-free in-place particle propagation; weight
diagnostics with closed-form validation targets; a benchmark harness; and a
bootstrap particle filter demo validated against an exact Gaussian filter.
"""

from .ancestry import (
    ancestors_to_offspring,
    cumulative_offspring_to_ancestors,
    cumulative_to_offspring,
    offspring_to_cumulative,
    permute_parallel,
    permute_serial,
    prepermute,
    satisfies_inplace_predicate,
)
from .diagnostics import (
    WeightSetSpec,
    ess,
    expected_weight,
    logweights_to_weights,
    max_normalised_weight,
    relative_weight_variance,
    resampling_mse,
    simulate_weight_set,
    sort_weights,
    sup_weight,
)
from .pf import (
    ExactFilterResult,
    FilterResult,
    LinearGaussianModel,
    exact_filter,
    pf_copy_step,
    pf_run,
    simulate_observations,
)
from .primitives import (
    adjacent_difference,
    exclusive_prefix_sum,
    inclusive_prefix_sum,
    lower_bound,
    stable_sum,
    vector_sum,
)
from .resamplers import (
    ALGORITHMS,
    ResamplerConfig,
    ResampleOutput,
    metropolis_ancestors,
    metropolis_num_steps,
    multinomial_ancestors,
    multinomial_ancestors_serial,
    rejection_ancestors,
    rejection_ancestors_capped,
    resample_ancestors,
    stratified_cumulative_offspring,
    stratum_offset_kernel,
    systematic_cumulative_offspring,
)
from .rng import RngStream, derive_seed

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ExactFilterResult",
    "FilterResult",
    "LinearGaussianModel",
    "ResampleOutput",
    "ResamplerConfig",
    "RngStream",
    "WeightSetSpec",
    "adjacent_difference",
    "ancestors_to_offspring",
    "cumulative_offspring_to_ancestors",
    "cumulative_to_offspring",
    "derive_seed",
    "ess",
    "exact_filter",
    "exclusive_prefix_sum",
    "expected_weight",
    "inclusive_prefix_sum",
    "logweights_to_weights",
    "lower_bound",
    "max_normalised_weight",
    "metropolis_ancestors",
    "metropolis_num_steps",
    "multinomial_ancestors",
    "multinomial_ancestors_serial",
    "offspring_to_cumulative",
    "permute_parallel",
    "permute_serial",
    "pf_copy_step",
    "pf_run",
    "prepermute",
    "rejection_ancestors",
    "rejection_ancestors_capped",
    "relative_weight_variance",
    "resample_ancestors",
    "resampling_mse",
    "satisfies_inplace_predicate",
    "simulate_observations",
    "simulate_weight_set",
    "sort_weights",
    "stable_sum",
    "stratified_cumulative_offspring",
    "stratum_offset_kernel",
    "sup_weight",
    "systematic_cumulative_offspring",
    "vector_sum",
]
