from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np

from .rollout import PolicyFn, rollout_batch
from ..critic.ensemble import EnsembleCritic, uncertainty_batch
from ..env.pointreach import DEFAULT_ENV
from ...core.exceptions import ConfigurationError
from ...schemas.configs import EnvConfig
from ...schemas.reports import CoverageGrid, GridSpec

UNCERTAINTY_GRID = GridSpec(low=-10.0, high=10.0, resolution=21)


def grid_centers(spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Cell-center goals, row-major with rows following y ascending; returns (goals (R*R, 2), axis)."""
    axis = np.linspace(spec.low, spec.high, spec.resolution)
    xs, ys = np.meshgrid(axis, axis)
    return np.stack([xs.ravel(), ys.ravel()], axis=1), axis


def coverage_grid(
    policies: Sequence[PolicyFn] | PolicyFn, spec: GridSpec = GridSpec(), env: EnvConfig = DEFAULT_ENV
) -> CoverageGrid:
    """Per-cell success rate averaged over the given policies (one per training seed)."""
    group = [policies] if callable(policies) else list(policies)
    if not group:
        raise ConfigurationError("At least one policy is required for a coverage grid")
    goals, _ = grid_centers(spec)
    s0 = np.asarray(spec.s0, dtype=float)
    hits = np.mean([rollout_batch(p, s0, goals, env.horizon, env).success for p in group], axis=0)
    values = hits.reshape(spec.resolution, spec.resolution)
    return CoverageGrid(spec=spec, kind="success", seeds=len(group), values=values.tolist())


def uncertainty_grid(
    critic: EnsembleCritic, policy: PolicyFn, spec: GridSpec = UNCERTAINTY_GRID, *, floor: float = 1e-8
) -> Tuple[CoverageGrid, CoverageGrid]:
    """Ensemble Std(s0, g) over a goal grid and its reciprocal (a density proxy)."""
    goals, _ = grid_centers(spec)
    states = np.broadcast_to(np.asarray(spec.s0, dtype=float), goals.shape)
    std = uncertainty_batch(critic, states, goals, policy).reshape(spec.resolution, spec.resolution)
    inverse = 1.0 / np.maximum(std, floor)
    return (
        CoverageGrid(spec=spec, kind="uncertainty", seeds=1, values=std.tolist()),
        CoverageGrid(spec=spec, kind="inverse_uncertainty", seeds=1, values=inverse.tolist()),
    )
