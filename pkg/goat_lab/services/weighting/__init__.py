from .weights import (
    WeightBundle,
    WeightContext,
    alpha_schedule,
    batch_weights,
    chi2_weight,
    combine,
    combine_batch,
    drw,
    dsw,
    eaw,
    normalized_std,
    uw,
)

__all__ = [
    "WeightBundle",
    "WeightContext",
    "alpha_schedule",
    "batch_weights",
    "chi2_weight",
    "combine",
    "combine_batch",
    "drw",
    "dsw",
    "eaw",
    "normalized_std",
    "uw",
]
