from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from .rundir import RunDirectory
from ..core.config import build_run_config, get_settings
from ..core.logging_config import get_logger
from ..core.run_context import get_run_id
from ..schemas.configs import Algorithm, RunConfig
from ..services.agents import PolicyArtifacts, save_artifacts, train, write_weight_diagnostics
from ..services.env import OfflineDataset, generate_dataset, load_dataset, save_dataset
from ..utils.serialization import dumps_line

logger = get_logger(__name__)

NAME = "train"

# flag dest -> (config section, field)
OVERRIDES = {
    "algo": ("algorithm", "algorithm"),
    "seed": ("algorithm", "seed"),
    "tau": ("algorithm", "tau"),
    "updates": ("algorithm", "total_updates"),
    "batch_size": ("algorithm", "batch_size"),
    "lr": ("algorithm", "lr"),
    "ensemble_size": ("algorithm", "ensemble_size"),
    "p_relabel": ("algorithm", "p_relabel"),
    "cql_alpha": ("algorithm", "cql_alpha"),
    "log_interval": ("algorithm", "log_interval"),
    "eval_interval": ("algorithm", "eval_interval"),
    "beta": ("weighting", "beta"),
    "uw_sharpness": ("weighting", "uw_sharpness"),
    "alpha_max": ("weighting", "alpha_max"),
    "drw": ("weighting", "drw_enabled"),
    "run_id": (None, "run_id"),
    "out": (None, "output_dir"),
}


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Train one (algorithm, dataset, seed) run")
    parser.add_argument("--config", type=Path, default=None, help="TOML or JSON run configuration")
    parser.add_argument("--algo", choices=[a.value for a in Algorithm], default=None)
    parser.add_argument("--data", type=Path, default=None, help="dataset file; generated from [dataset] when omitted")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tau", type=float, default=None, help="expectile for the critic TD loss")
    parser.add_argument("--updates", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--ensemble-size", type=int, default=None)
    parser.add_argument("--p-relabel", type=float, default=None)
    parser.add_argument("--cql-alpha", type=float, default=None)
    parser.add_argument("--log-interval", type=int, default=None)
    parser.add_argument("--eval-interval", type=int, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--uw-sharpness", type=float, default=None)
    parser.add_argument("--alpha-max", type=float, default=None)
    parser.add_argument("--drw", action="store_true", default=None, help="enable the discounted relabeling weight")
    parser.add_argument("--run-id", default=None)
    parser.add_argument("--out", type=Path, default=None, help="run directory")
    parser.set_defaults(handler=handle)


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for dest, (section, field) in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if section is None:
            overrides[field] = value
        else:
            overrides.setdefault(section, {})[field] = value
    return overrides


def prepare_dataset(config: RunConfig, data: Optional[Path]) -> tuple[RunConfig, OfflineDataset]:
    if data is None:
        return config, generate_dataset(config.dataset, config.env)
    dataset = load_dataset(data)
    update: Dict[str, Any] = {"env": dataset.env}
    if dataset.spec is not None:
        update["dataset"] = dataset.spec
    return config.model_copy(update=update), dataset


def train_run(config: RunConfig, dataset: OfflineDataset, run: RunDirectory) -> PolicyArtifacts:
    artifacts = train(config.algorithm, dataset, config.weighting, on_record=run.append_record)
    save_artifacts(run.checkpoints, artifacts)
    write_weight_diagnostics(run.logs / "weights.csv", artifacts.diagnostics)
    return artifacts


def handle(args: argparse.Namespace) -> None:
    config = build_run_config(args.config, overrides_from_args(args))
    config, dataset = prepare_dataset(config, args.data)

    run_id = config.run_id or get_run_id() or "run"
    root = config.output_dir or get_settings().output_root / run_id
    config = config.model_copy(update={"run_id": run_id, "output_dir": root})

    dataset_path = args.data
    if dataset_path is None:
        dataset_path = root / "dataset.ndjson"
        save_dataset(dataset_path, dataset)
    run = RunDirectory.create(root, config, dataset, dataset_path)

    artifacts = train_run(config, dataset, run)
    final = artifacts.log[-1] if artifacts.log else None
    logger.info("Run stored", extra={"run_dir": str(root), "algorithm": config.algorithm.algorithm.value})
    print(
        dumps_line(
            {
                "run_dir": root,
                "checkpoint": run.checkpoints,
                "algorithm": config.algorithm.algorithm.value,
                "seed": config.algorithm.seed,
                "final": final.model_dump() if final is not None else None,
            }
        )
    )
