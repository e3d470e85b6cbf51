from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ...core.exceptions import UsageError
from ...schemas.configs import AlgoConfig, Algorithm, WeightConfig


@dataclass(frozen=True)
class AlgorithmProfile:
    """Which components an algorithm tag switches on."""

    algorithm: Algorithm
    label: str
    uses_critic: bool = True
    actor_critic: bool = False
    conservative: bool = False
    use_eaw: bool = False
    use_dsw: bool = False
    use_uw: bool = False
    weight_kind: str = "exp"
    ensemble_size: Optional[int] = None
    p_relabel: Optional[float] = None
    default_tau: Optional[float] = None

    @property
    def weighted(self) -> bool:
        return self.uses_critic and not self.actor_critic


PROFILES: Dict[Algorithm, AlgorithmProfile] = {
    Algorithm.BC: AlgorithmProfile(Algorithm.BC, "BC", uses_critic=False, p_relabel=0.0),
    Algorithm.GCSL: AlgorithmProfile(Algorithm.GCSL, "GCSL", uses_critic=False),
    Algorithm.MARWIL_HER: AlgorithmProfile(Algorithm.MARWIL_HER, "MARWIL+HER", use_eaw=True, ensemble_size=1),
    Algorithm.WGCSL: AlgorithmProfile(Algorithm.WGCSL, "WGCSL", use_eaw=True, use_dsw=True, ensemble_size=1),
    Algorithm.GOAT: AlgorithmProfile(Algorithm.GOAT, "GOAT", use_eaw=True, use_dsw=True, use_uw=True),
    Algorithm.GOAT_TAU: AlgorithmProfile(
        Algorithm.GOAT_TAU, "GOAT(tau)", use_eaw=True, use_dsw=True, use_uw=True, default_tau=0.1
    ),
    Algorithm.GOAT_CHI2: AlgorithmProfile(
        Algorithm.GOAT_CHI2, "GOAT(chi2)", use_eaw=True, use_dsw=True, use_uw=True, weight_kind="chi2"
    ),
    Algorithm.DDPG_HER: AlgorithmProfile(Algorithm.DDPG_HER, "DDPG+HER", actor_critic=True, ensemble_size=1),
    Algorithm.CQL_HER: AlgorithmProfile(
        Algorithm.CQL_HER, "CQL+HER", actor_critic=True, conservative=True, ensemble_size=1
    ),
}


def get_profile(algorithm: Algorithm | str) -> AlgorithmProfile:
    try:
        return PROFILES[Algorithm(algorithm)]
    except ValueError as exc:
        raise UsageError(
            f"Unknown algorithm {algorithm!r}", payload={"known": [a.value for a in Algorithm]}
        ) from exc


def resolve(config: AlgoConfig, weighting: WeightConfig) -> Tuple[AlgorithmProfile, AlgoConfig, WeightConfig]:
    """
    Apply the profile to user configs.

    The profile fixes the component switches, forced ensemble size and relabel probability; an explicit
    tau in `config` is kept for every critic-based algorithm and goat_tau falls back to its default.
    """
    profile = get_profile(config.algorithm)
    algo_updates = {}
    if profile.ensemble_size is not None:
        algo_updates["ensemble_size"] = profile.ensemble_size
    if profile.p_relabel is not None:
        algo_updates["p_relabel"] = profile.p_relabel
    if config.tau is None and profile.default_tau is not None:
        algo_updates["tau"] = profile.default_tau
    if not profile.uses_critic:
        algo_updates["tau"] = None

    weight_updates = {
        "use_eaw": weighting.use_eaw and profile.use_eaw,
        "use_dsw": weighting.use_dsw and profile.use_dsw,
        "use_uw": weighting.use_uw and profile.use_uw,
        "kind": profile.weight_kind,
    }
    return profile, config.model_copy(update=algo_updates), weighting.model_copy(update=weight_updates)
