from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from ...core.exceptions import LabIOError
from ...schemas.reports import CoverageGrid, EvalReport
from ...utils.serialization import write_json


def outcome_frame(report: EvalReport) -> pd.DataFrame:
    rows = [
        {
            "set": name,
            "goal_x": outcome.goal[0],
            "goal_y": outcome.goal[1],
            "success": int(outcome.success),
            "steps_to_success": outcome.steps_to_success,
            "stay_return": outcome.stay_return,
            "stop_return": outcome.stop_return,
            "discounted_return": outcome.discounted_return,
        }
        for name, goal_set in report.sets.items()
        for outcome in goal_set.outcomes
    ]
    return pd.DataFrame(rows)


def summary_frame(report: EvalReport) -> pd.DataFrame:
    rows = []
    for name, goal_set in report.sets.items():
        per_seed = np.asarray(report.per_seed_success.get(name, [goal_set.success_rate]))
        rows.append(
            {
                "set": name,
                "radius": goal_set.radius,
                "success_rate": goal_set.success_rate,
                "success_std": float(per_seed.std()),
                "mean_return": goal_set.mean_return,
                "mean_stop_return": goal_set.mean_stop_return,
                "mean_discounted_return": goal_set.mean_discounted_return,
                "iid_success_rate": goal_set.iid_success_rate,
                "ood_success_rate": goal_set.ood_success_rate,
            }
        )
    return pd.DataFrame(rows)


def write_eval_report(report: EvalReport, directory: Path, stem: str = "eval") -> dict[str, Path]:
    """<stem>.json (full report), <stem>_outcomes.csv (one row per goal), <stem>_summary.csv."""
    paths = {
        "json": directory / f"{stem}.json",
        "outcomes": directory / f"{stem}_outcomes.csv",
        "summary": directory / f"{stem}_summary.csv",
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        write_json(paths["json"], report.model_dump())
        outcome_frame(report).to_csv(paths["outcomes"], index=False)
        summary_frame(report).to_csv(paths["summary"], index=False)
    except OSError as exc:
        raise LabIOError(f"Cannot write evaluation report to {directory}", payload={"error": str(exc)}) from exc
    return paths


def write_grid(grid: CoverageGrid, directory: Path, stem: str = "coverage") -> dict[str, Path]:
    """CSV matrix (rows y ascending, columns x ascending) plus a JSON sidecar holding the grid spec."""
    axis = np.linspace(grid.spec.low, grid.spec.high, grid.spec.resolution)
    paths = {"csv": directory / f"{stem}.csv", "json": directory / f"{stem}.json"}
    frame = pd.DataFrame(grid.values, index=pd.Index(axis, name="y"), columns=[f"{x:g}" for x in axis])
    try:
        directory.mkdir(parents=True, exist_ok=True)
        frame.to_csv(paths["csv"])
        write_json(paths["json"], grid.model_dump(exclude={"values"}))
    except OSError as exc:
        raise LabIOError(f"Cannot write grid to {directory}", payload={"error": str(exc)}) from exc
    return paths
