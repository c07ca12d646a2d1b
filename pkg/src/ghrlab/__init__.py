"""Gap-Hamming relation toolkit: exact protocol law, checkers, couplings,
classical baselines, and tail-bound validation."""

from .bitkit import BitString, Rng, fourier_pattern, inner_mod2, random_bitstring
from .bounds import (
    anticorrelated_expectation_holds,
    binomial_window_lower,
    exact_binomial_deviation,
    exact_binomial_window,
    hoeffding_bound,
    markov_chebyshev_bound,
    relaxed_chernoff_bound,
    shift_xor_tail_check,
)
from .classical import (
    DisjointnessInstance,
    RectangleSpec,
    XiTranscript,
    all_instances,
    estimate_baseline_success,
    reduction_xi,
    relative_weight,
    tghr_baseline,
    xi_k_repetition,
)
from .coupling import (
    CouplingTranscript,
    exact_coupled_distribution,
    sample_a_tilde,
    tilde_weight_tail_bound,
    verify_independence,
)
from .protocol import (
    OutcomeDistribution,
    estimate_success,
    exact_success_probability,
    failure_probability_exact,
    outcome_distribution,
    phi_vector,
    run_protocol,
    run_protocol_trep,
    u_vector,
)
from .relation import (
    DeltaTable,
    McEstimate,
    TransformIndex,
    aleph,
    aleph_statistic,
    answer_length,
    delta,
    delta_table,
    estimate_aleph_probability,
    exact_aleph_probability,
    ghd_value,
    ghr_is_valid,
    tghr_is_valid,
)

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "Rng",
    "fourier_pattern",
    "inner_mod2",
    "random_bitstring",
    "TransformIndex",
    "DeltaTable",
    "McEstimate",
    "delta",
    "delta_table",
    "answer_length",
    "aleph",
    "aleph_statistic",
    "estimate_aleph_probability",
    "exact_aleph_probability",
    "ghr_is_valid",
    "tghr_is_valid",
    "ghd_value",
    "OutcomeDistribution",
    "outcome_distribution",
    "phi_vector",
    "u_vector",
    "run_protocol",
    "run_protocol_trep",
    "failure_probability_exact",
    "estimate_success",
    "exact_success_probability",
    "CouplingTranscript",
    "sample_a_tilde",
    "exact_coupled_distribution",
    "verify_independence",
    "tilde_weight_tail_bound",
    "RectangleSpec",
    "DisjointnessInstance",
    "XiTranscript",
    "tghr_baseline",
    "estimate_baseline_success",
    "relative_weight",
    "all_instances",
    "reduction_xi",
    "xi_k_repetition",
    "markov_chebyshev_bound",
    "hoeffding_bound",
    "relaxed_chernoff_bound",
    "exact_binomial_window",
    "exact_binomial_deviation",
    "binomial_window_lower",
    "shift_xor_tail_check",
    "anticorrelated_expectation_holds",
]
