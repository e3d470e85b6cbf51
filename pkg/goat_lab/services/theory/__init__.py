from .divergence import (
    CapFamily,
    DiscreteDist,
    brute_force_worst_case,
    closed_form_is_exact,
    sample_non_uniform,
    uniform_worst_case_closed_form,
    variation_divergence,
    variation_divergence_subsets,
    verify_uniform_minimax,
    worst_case_d1,
    worst_case_witness,
)

__all__ = [
    "CapFamily",
    "DiscreteDist",
    "brute_force_worst_case",
    "closed_form_is_exact",
    "sample_non_uniform",
    "uniform_worst_case_closed_form",
    "variation_divergence",
    "variation_divergence_subsets",
    "verify_uniform_minimax",
    "worst_case_d1",
    "worst_case_witness",
]
