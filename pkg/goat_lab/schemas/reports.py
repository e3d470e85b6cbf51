from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class DatasetSummary(BaseModel):
    label: str
    n_traj: int
    horizon: int
    transitions: int
    achieved_min: Tuple[float, float]
    achieved_max: Tuple[float, float]
    frac_states_below: float = Field(description="Fraction of visited states with y < -success_radius")
    final_success_rate: float


class GoalOutcome(BaseModel):
    goal: Tuple[float, float]
    success: bool
    steps_to_success: int = Field(description="1-based step of first success, -1 on failure")
    stay_return: float
    stop_return: float
    discounted_return: float


class GoalSetReport(BaseModel):
    name: str
    radius: float
    success_rate: float
    mean_return: float
    mean_stop_return: float
    mean_discounted_return: float
    iid_success_rate: Optional[float] = None
    ood_success_rate: Optional[float] = None
    outcomes: List[GoalOutcome]


class EvalReport(BaseModel):
    horizon: int
    seeds_aggregated: int
    sets: Dict[str, GoalSetReport]
    per_seed_success: Dict[str, List[float]] = Field(default_factory=dict)
    per_seed_return: Dict[str, List[float]] = Field(default_factory=dict)


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    low: float = -12.0
    high: float = 12.0
    resolution: int = Field(default=25, ge=2)
    s0: Tuple[float, float] = (0.0, 0.0)


class CoverageGrid(BaseModel):
    """values[row][col]: row follows y ascending, col follows x ascending (cell centers on a linspace)."""

    spec: GridSpec
    kind: Literal["success", "uncertainty", "inverse_uncertainty"] = "success"
    seeds: int
    values: List[List[float]]


class TheoryReport(BaseModel):
    n: int
    C: float
    trials: int
    seed: int
    passes: int
    failures: List[Dict[str, object]]
    uniform_worst_case: float
    closed_form: Optional[float]
    min_margin: float
    mean_margin: float
    max_margin: float


class TrainLogRecord(BaseModel):
    step: int
    policy_loss: float
    critic_loss: Optional[float] = None
    mean_A: Optional[float] = None
    frac_selected: Optional[float] = None
    mean_uw: Optional[float] = None
    eval_R10: Optional[float] = None
    eval_R20: Optional[float] = None
    imitation_loss: Optional[float] = None
