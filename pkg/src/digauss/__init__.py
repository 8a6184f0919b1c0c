"""Layered identification codebooks over the additive white Gaussian channel.

Build geometric codebooks (single layer, shrinking multi-layer, noise-blind
universal, exponent-tuned), decode by projecting onto per-layer directions,
estimate miss/false identification rates against exact analytic oracles, and
evaluate the closed-form rate curves the constructions achieve.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundCurve,
    capacity,
    evaluate_bound,
    rate_lower_finite,
    rate_lower_single,
    rate_lower_universal,
    rr_lower,
    rr_upper,
)
from .channel import (
    ChannelParams,
    RngSeed,
    TailBound,
    make_rng,
    phi,
    projection_tail,
    substream,
    transmit,
)
from .codebook import (
    Codebook,
    Codeword,
    LayerSpec,
    audit_codebook,
    build_multi_layer,
    build_rate_reliability,
    build_single_layer,
    build_universal,
    check_exponent_admissible,
    codeword_vector,
    dumps_17g,
    exponent_cutoff,
    first_differing_layer,
    from_json,
    minimal_power_feasible_n,
    multi_layer_radii,
    rr_radii_closed_form,
    rr_radii_recursion,
    sampled_layer_counts,
    to_json,
    universal_power_feasible_n,
    universal_radii,
)
from .decoder import DecoderSpec, identify, layer_test, spec_for_word
from .errors import (
    ConfigError,
    DegenerateGeometry,
    DegenerateSubspace,
    DigaussError,
    DimensionMismatch,
    DomainError,
    ExponentTooLarge,
    PowerViolation,
    SameWord,
    UnknownPath,
    WordNotFound,
    ZeroDirection,
)
from .geometry import (
    Arrangement,
    PackingConfig,
    audit_arrangement,
    chord_bound,
    equiangular_2d,
    greedy_angle_dense,
    min_angle_bound,
    packing_size_lower_bound,
    project,
    projected_distance,
    sample_on_subspace_sphere,
)
from .montecarlo import (
    AllPairsResult,
    PairEntry,
    PairKind,
    TrialReport,
    empirical_rate,
    estimate_all_pairs,
    estimate_false,
    estimate_miss,
    false_analytic,
    miss_analytic,
    wilson_interval,
)

__all__ = [
    "AllPairsResult",
    "Arrangement",
    "BoundCurve",
    "ChannelParams",
    "Codebook",
    "Codeword",
    "ConfigError",
    "DecoderSpec",
    "DegenerateGeometry",
    "DegenerateSubspace",
    "DigaussError",
    "DimensionMismatch",
    "DomainError",
    "ExponentTooLarge",
    "LayerSpec",
    "PackingConfig",
    "PairEntry",
    "PairKind",
    "PowerViolation",
    "RngSeed",
    "SameWord",
    "TailBound",
    "TrialReport",
    "UnknownPath",
    "WordNotFound",
    "ZeroDirection",
    "audit_arrangement",
    "audit_codebook",
    "build_multi_layer",
    "build_rate_reliability",
    "build_single_layer",
    "build_universal",
    "capacity",
    "check_exponent_admissible",
    "chord_bound",
    "codeword_vector",
    "dumps_17g",
    "empirical_rate",
    "equiangular_2d",
    "estimate_all_pairs",
    "estimate_false",
    "estimate_miss",
    "evaluate_bound",
    "exponent_cutoff",
    "false_analytic",
    "first_differing_layer",
    "from_json",
    "greedy_angle_dense",
    "identify",
    "layer_test",
    "make_rng",
    "min_angle_bound",
    "minimal_power_feasible_n",
    "miss_analytic",
    "multi_layer_radii",
    "packing_size_lower_bound",
    "phi",
    "project",
    "projected_distance",
    "projection_tail",
    "rate_lower_finite",
    "rate_lower_single",
    "rate_lower_universal",
    "rr_lower",
    "rr_radii_closed_form",
    "rr_radii_recursion",
    "rr_upper",
    "sample_on_subspace_sphere",
    "sampled_layer_counts",
    "spec_for_word",
    "substream",
    "to_json",
    "transmit",
    "universal_power_feasible_n",
    "universal_radii",
    "wilson_interval",
]
