from .algorithms import PROFILES, AlgorithmProfile, get_profile, resolve
from .artifacts import LoadedArtifacts, load_artifacts, save_artifacts, write_weight_diagnostics
from .policy import (
    Policy,
    empirical_imitation_loss,
    make_policy,
    optimal_policy,
    policy_gradient,
    policy_loss,
    random_policy,
    scripted_policy,
    zero_policy,
)
from .trainer import PolicyArtifacts, Trainer, WeightDiagnostics, train

__all__ = [
    "PROFILES",
    "AlgorithmProfile",
    "LoadedArtifacts",
    "Policy",
    "PolicyArtifacts",
    "Trainer",
    "WeightDiagnostics",
    "empirical_imitation_loss",
    "get_profile",
    "load_artifacts",
    "make_policy",
    "optimal_policy",
    "policy_gradient",
    "policy_loss",
    "random_policy",
    "resolve",
    "save_artifacts",
    "scripted_policy",
    "train",
    "write_weight_diagnostics",
    "zero_policy",
]
