from __future__ import annotations

from ..env.pointreach import OfflineDataset
from ...schemas.reports import DatasetSummary


def summarize_dataset(dataset: OfflineDataset) -> DatasetSummary:
    achieved = dataset.states.reshape(-1, 2)
    label = dataset.spec.label if dataset.spec else f"{dataset.n_traj} trajectories"
    return DatasetSummary(
        label=label,
        n_traj=dataset.n_traj,
        horizon=dataset.horizon,
        transitions=dataset.n_traj * dataset.horizon,
        achieved_min=tuple(achieved.min(axis=0).tolist()),
        achieved_max=tuple(achieved.max(axis=0).tolist()),
        frac_states_below=float((achieved[:, 1] < -dataset.env.success_radius).mean()),
        final_success_rate=float(dataset.rewards[:, -1].mean()),
    )
