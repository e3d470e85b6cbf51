from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Dict

from ..core.config import get_settings, validate_section
from ..schemas.configs import DatasetKind, DatasetSpec, EnvConfig
from ..services.env import generate_dataset, save_dataset
from ..services.env.datasets import dataset_digest
from ..services.replay import summarize_dataset
from ..utils.serialization import dumps_line

NAME = "generate"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Generate an offline point-reach dataset (NDJSON)")
    parser.add_argument("--kind", choices=[kind.value for kind in DatasetKind], required=True)
    parser.add_argument("--n", dest="n_traj", type=int, default=10, help="number of trajectories")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise-std", type=float, default=None)
    parser.add_argument("--p-random", type=float, default=None)
    parser.add_argument("--lower-fraction", type=float, default=None, help="share of goals on the lower semicircle")
    parser.add_argument("--horizon", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None)
    parser.set_defaults(handler=handle)


def dataset_spec_from_args(args: argparse.Namespace) -> DatasetSpec:
    fields: Dict[str, Any] = {"kind": args.kind, "n_traj": args.n_traj, "seed": args.seed}
    for name in ("noise_std", "p_random", "lower_fraction"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    return validate_section(DatasetSpec, fields)


def default_dataset_path(spec: DatasetSpec, root: Path) -> Path:
    suffix = f"_lower{spec.lower_fraction:g}" if spec.lower_fraction > 0 else ""
    return root / "datasets" / f"{spec.kind.value}{spec.n_traj}_seed{spec.seed}{suffix}.ndjson"


def handle(args: argparse.Namespace) -> None:
    spec = dataset_spec_from_args(args)
    env = validate_section(EnvConfig, {"horizon": args.horizon} if args.horizon is not None else {})
    dataset = generate_dataset(spec, env)
    out = args.out or default_dataset_path(spec, get_settings().output_root)
    save_dataset(out, dataset)
    summary = summarize_dataset(dataset)
    print(dumps_line({"path": out, "sha256": dataset_digest(dataset), **summary.model_dump()}))
