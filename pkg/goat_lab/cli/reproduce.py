"""Table sweeps: every (row, dataset, seed) cell trains and evaluates independently in its own process."""

from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.config import get_settings
from ..core.exceptions import LabIOError, ReproductionIncomplete, UsageError
from ..core.logging_config import get_logger
from ..core.run_context import get_run_id
from ..schemas.configs import AlgoConfig, Algorithm, DatasetKind, DatasetSpec
from ..services.agents import get_profile, train
from ..services.env import generate_dataset
from ..services.evaluation import evaluate, goal_sets_for
from ..utils.serialization import dumps_line, write_json

logger = get_logger(__name__)

NAME = "reproduce"

TABLES = ("point-success", "point-return", "ensemble-size", "imbalanced")
TABLE_ALGORITHMS = (
    Algorithm.BC,
    Algorithm.GCSL,
    Algorithm.MARWIL_HER,
    Algorithm.WGCSL,
    Algorithm.GOAT,
    Algorithm.GOAT_TAU,
    Algorithm.DDPG_HER,
    Algorithm.CQL_HER,
)
ENSEMBLE_SIZES = (2, 3, 5, 7)
IMBALANCED_LOWER_FRACTION = 0.1
RADII = (10.0, 20.0)


def didactic_datasets(lower_fraction: float = 0.0) -> List[DatasetSpec]:
    return [
        DatasetSpec(kind=DatasetKind.EXPERT, n_traj=10, lower_fraction=lower_fraction),
        DatasetSpec(kind=DatasetKind.NONEXPERT, n_traj=10, lower_fraction=lower_fraction),
        DatasetSpec(kind=DatasetKind.NONEXPERT, n_traj=50, lower_fraction=lower_fraction),
    ]


@dataclass(frozen=True)
class Job:
    row: str
    algorithm: str
    dataset: Dict[str, Any]
    seed: int
    updates: int
    batch_size: int
    n_goals: int
    goal_seed: int
    ensemble_size: Optional[int] = None

    @property
    def key(self) -> Tuple[str, str, int]:
        return self.row, DatasetSpec.model_validate(self.dataset).label, self.seed


def build_jobs(
    table: str,
    seeds: int,
    updates: int,
    batch_size: int,
    n_goals: int,
    goal_seed: int,
    algorithms: Sequence[Algorithm] = TABLE_ALGORITHMS,
) -> List[Job]:
    if table not in TABLES:
        raise UsageError(f"Unknown table {table!r}", payload={"known": list(TABLES)})
    datasets = didactic_datasets(IMBALANCED_LOWER_FRACTION if table == "imbalanced" else 0.0)
    rows: List[Tuple[str, Algorithm, Optional[int]]]
    if table == "ensemble-size":
        rows = [(f"GOAT N={n}", Algorithm.GOAT, n) for n in ENSEMBLE_SIZES]
    else:
        rows = [(get_profile(algo).label, algo, None) for algo in algorithms]
    return [
        Job(
            row=row,
            algorithm=algo.value,
            dataset=spec.model_copy(update={"seed": spec.seed + seed}).model_dump(mode="json"),
            seed=seed,
            updates=updates,
            batch_size=batch_size,
            n_goals=n_goals,
            goal_seed=goal_seed,
            ensemble_size=n,
        )
        for row, algo, n in rows
        for spec in datasets
        for seed in range(seeds)
    ]


def run_job(job: Job) -> Dict[str, Any]:
    spec = DatasetSpec.model_validate(job.dataset)
    dataset = generate_dataset(spec)
    config: Dict[str, Any] = {
        "algorithm": job.algorithm,
        "seed": job.seed,
        "total_updates": job.updates,
        "batch_size": job.batch_size,
        "eval_interval": 0,
        "log_interval": job.updates,
    }
    if job.ensemble_size is not None:
        config["ensemble_size"] = job.ensemble_size
    artifacts = train(AlgoConfig.model_validate(config), dataset)
    report = evaluate(artifacts.policy, goal_sets_for(RADII, job.n_goals, job.goal_seed), dataset.env)
    result: Dict[str, Any] = {"row": job.row, "dataset": spec.label, "seed": job.seed}
    for name, goal_set in report.sets.items():
        result[f"{name}_success"] = goal_set.success_rate
        result[f"{name}_return"] = goal_set.mean_return
    return result


def run_jobs(jobs: Sequence[Job], n_jobs: int) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    results: List[Dict[str, Any]] = []
    failures: List[Dict[str, Any]] = []

    def record_failure(job: Job, exc: BaseException) -> None:
        logger.error("Sweep cell failed", extra={"job": asdict(job), "error": str(exc)})
        failures.append({"row": job.row, "dataset": job.key[1], "seed": job.seed, "error": str(exc)})

    if n_jobs <= 1:
        for job in jobs:
            try:
                results.append(run_job(job))
            except Exception as exc:
                record_failure(job, exc)
        return results, failures

    with ProcessPoolExecutor(max_workers=n_jobs) as executor:
        futures = {executor.submit(run_job, job): job for job in jobs}
        for done, future in enumerate(as_completed(futures), start=1):
            job = futures[future]
            try:
                results.append(future.result())
            except Exception as exc:
                record_failure(job, exc)
            if done % 10 == 0 or done == len(jobs):
                logger.info("Sweep progress", extra={"done": done, "total": len(jobs)})
    return results, failures


def aggregate(results: Sequence[Dict[str, Any]], metric: str, rows: Sequence[str], datasets: Sequence[str]) -> pd.DataFrame:
    """mean ± std over seeds, one row per table row and one column per (dataset, goal set)."""
    frame = pd.DataFrame(results)
    columns = [f"{dataset} {name}" for dataset in datasets for name in ("R10", "R20")]
    table = pd.DataFrame(index=pd.Index(list(rows), name="agent"), columns=columns, dtype=object)
    for row in rows:
        for dataset in datasets:
            cell = frame[(frame["row"] == row) & (frame["dataset"] == dataset)] if not frame.empty else frame
            for name in ("R10", "R20"):
                column = f"{name}_{metric}"
                if cell.empty or column not in cell:
                    table.loc[row, f"{dataset} {name}"] = "missing"
                    continue
                values = cell[column].to_numpy(dtype=float)
                table.loc[row, f"{dataset} {name}"] = f"{np.mean(values):.2f} ± {np.std(values):.2f}"
    return table


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Reproduce a point-reach results table")
    parser.add_argument("--table", choices=TABLES, required=True)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--updates", type=int, default=AlgoConfig().total_updates, help="policy updates per run")
    parser.add_argument("--batch-size", type=int, default=AlgoConfig().batch_size)
    parser.add_argument("--n", dest="n_goals", type=int, default=200, help="evaluation goals per set")
    parser.add_argument("--goal-seed", type=int, default=0)
    parser.add_argument("--algos", default=None, help="comma-separated subset of algorithm tags")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default GOAT_LAB_JOBS)")
    parser.add_argument("--out", type=Path, default=None)
    parser.set_defaults(handler=handle)


def _algorithms(text: Optional[str]) -> Sequence[Algorithm]:
    if not text:
        return TABLE_ALGORITHMS
    try:
        return tuple(Algorithm(tag.strip()) for tag in text.split(",") if tag.strip())
    except ValueError as exc:
        raise UsageError(f"Unknown algorithm in {text!r}", payload={"known": [a.value for a in Algorithm]}) from exc


def handle(args: argparse.Namespace) -> None:
    settings = get_settings()
    if args.seeds < 1 or args.updates < 1:
        raise UsageError("--seeds and --updates must be positive")
    n_jobs = args.jobs or settings.jobs
    jobs = build_jobs(
        args.table, args.seeds, args.updates, args.batch_size, args.n_goals, args.goal_seed, _algorithms(args.algos)
    )
    logger.info("Sweep scheduled", extra={"table": args.table, "cells": len(jobs), "jobs": n_jobs})

    results, failures = run_jobs(jobs, n_jobs)
    results.sort(key=lambda r: (r["row"], r["dataset"], r["seed"]))

    rows = list(dict.fromkeys(job.row for job in jobs))
    datasets = list(dict.fromkeys(job.key[1] for job in jobs))
    metric = "return" if args.table == "point-return" else "success"
    table = aggregate(results, metric, rows, datasets)

    out = args.out or settings.output_root / "reproduce" / (get_run_id() or args.table)
    try:
        out.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(results).to_csv(out / "cells.csv", index=False)
        table.to_csv(out / f"{args.table}.csv")
        write_json(out / "failures.json", failures)
    except OSError as exc:
        raise LabIOError(f"Cannot write sweep output to {out}", payload={"error": str(exc)}) from exc

    print(table.to_string())
    print(dumps_line({"table": out / f"{args.table}.csv", "cells": len(results), "failures": len(failures)}))

    missing = int((table == "missing").to_numpy().sum())
    if failures or missing:
        raise ReproductionIncomplete(
            "Sweep finished with missing cells",
            payload={"failures": len(failures), "missing_cells": missing, "out": str(out)},
        )
