from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Config(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class Algorithm(str, Enum):
    BC = "bc"
    GCSL = "gcsl"
    MARWIL_HER = "marwil_her"
    WGCSL = "wgcsl"
    GOAT = "goat"
    GOAT_TAU = "goat_tau"
    GOAT_CHI2 = "goat_chi2"
    DDPG_HER = "ddpg_her"
    CQL_HER = "cql_her"


class EnvConfig(_Config):
    """Point-reach dynamics, success threshold and discount."""

    horizon: int = Field(default=50, ge=1)
    success_radius: float = Field(default=0.5, gt=0)
    action_bound: float = Field(default=1.0, gt=0)
    goal_radius_train: float = Field(default=10.0, gt=0)
    gamma: float = Field(default=0.98, gt=0, lt=1)


class DatasetKind(str, Enum):
    EXPERT = "expert"
    NONEXPERT = "nonexpert"


class DatasetSpec(_Config):
    """Which offline dataset to generate. Noise settings only apply to the non-expert kind."""

    kind: DatasetKind = DatasetKind.EXPERT
    n_traj: int = Field(default=10, ge=1)
    noise_std: float = Field(default=0.2, ge=0)
    p_random: float = Field(default=0.3, ge=0, le=1)
    lower_fraction: float = Field(default=0.0, ge=0, le=1)
    seed: int = Field(default=0, ge=0)

    @property
    def effective_noise_std(self) -> float:
        return self.noise_std if self.kind is DatasetKind.NONEXPERT else 0.0

    @property
    def effective_p_random(self) -> float:
        return self.p_random if self.kind is DatasetKind.NONEXPERT else 0.0

    @property
    def label(self) -> str:
        prefix = "Expert" if self.kind is DatasetKind.EXPERT else "Non-Expert"
        suffix = " (imbalanced)" if self.lower_fraction > 0 else ""
        return f"{prefix} {self.n_traj}{suffix}"


class NetworkConfig(_Config):
    hidden_sizes: Tuple[int, ...] = (64, 64)
    activation: Literal["relu", "tanh"] = "relu"

    @field_validator("hidden_sizes")
    @classmethod
    def _positive_sizes(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(size < 1 for size in value):
            raise ValueError("hidden layer sizes must be positive")
        return value


class WeightConfig(_Config):
    """Imitation weight factors: advantage (EAW), selection (DSW), uncertainty (UW), relabel discount (DRW)."""

    beta: float = Field(default=2.0, ge=0)
    eaw_clip: float = Field(default=10.0, gt=0)
    alpha_max: float = Field(default=80.0, ge=0, le=100)
    alpha_ramp_fraction: float = Field(default=0.2, gt=0, le=1)
    eps_low: float = Field(default=0.05, gt=0, le=1)
    uw_sharpness: float = Field(default=2.0, gt=0)
    w_min: float = Field(default=0.5, ge=0, le=1)
    drw_enabled: bool = False
    dsw_warmup: int = Field(default=1000, ge=0)
    adv_queue_capacity: int = Field(default=50_000, ge=1)
    std_queue_capacity: int = Field(default=50_000, ge=1)
    kind: Literal["exp", "chi2"] = "exp"
    chi2_offset: float = 0.0
    use_eaw: bool = True
    use_dsw: bool = True
    use_uw: bool = True


class AlgoConfig(_Config):
    algorithm: Algorithm = Algorithm.GOAT
    total_updates: int = Field(default=50_000, ge=1)
    batch_size: int = Field(default=512, ge=1)
    lr: float = Field(default=5e-4, gt=0)
    p_relabel: float = Field(default=1.0, ge=0, le=1)
    ensemble_size: int = Field(default=5, ge=1)
    tau: Optional[float] = Field(default=None, gt=0, lt=1)
    target_interval: int = Field(default=50, ge=1)
    cql_alpha: float = Field(default=1.0, ge=0)
    cql_samples: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0)
    policy_network: NetworkConfig = NetworkConfig()
    critic_network: NetworkConfig = NetworkConfig()
    log_interval: int = Field(default=1000, ge=1)
    eval_interval: int = Field(default=5000, ge=0)
    eval_goals: int = Field(default=50, ge=1)


class EvalConfig(_Config):
    radii: Tuple[float, ...] = (10.0, 20.0)
    n_goals: int = Field(default=200, ge=1)
    seeds: int = Field(default=5, ge=1)
    goal_seed: int = Field(default=0, ge=0)
    grid_low: float = -12.0
    grid_high: float = 12.0
    grid_resolution: int = Field(default=25, ge=2)

    @field_validator("radii")
    @classmethod
    def _positive_radii(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value or any(radius <= 0 for radius in value):
            raise ValueError("evaluation radii must be positive")
        return value

    @model_validator(mode="after")
    def _ordered_grid(self) -> "EvalConfig":
        if self.grid_high <= self.grid_low:
            raise ValueError("grid_high must exceed grid_low")
        return self


class RunConfig(_Config):
    """Fully resolved configuration of one training run; written verbatim into the run directory."""

    env: EnvConfig = EnvConfig()
    dataset: DatasetSpec = DatasetSpec()
    algorithm: AlgoConfig = AlgoConfig()
    weighting: WeightConfig = WeightConfig()
    eval: EvalConfig = EvalConfig()
    run_id: Optional[str] = None
    output_dir: Optional[Path] = None
