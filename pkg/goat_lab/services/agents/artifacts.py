"""Checkpoint bundle.

    <dir>/manifest.json
    <dir>/policy.bin
    <dir>/normalizer.json
    <dir>/critic/member_<i>.bin, <dir>/critic/target_<i>.bin   (critic-based algorithms only)

Optimizer moments are not stored; a loaded critic gets fresh Adam state.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .policy import Policy
from .trainer import PolicyArtifacts, WeightDiagnostics
from ..critic.ensemble import EnsembleCritic
from ..nn import adam_init, load_network, save_network
from ..replay.normalizer import Normalizer
from ... import __version__
from ...core.exceptions import DataError, LabIOError
from ...schemas.configs import EnvConfig
from ...utils.serialization import write_json

MANIFEST_FORMAT = "goat-lab/checkpoint"
MANIFEST_VERSION = 1


@dataclass
class LoadedArtifacts:
    policy: Policy
    normalizer: Normalizer
    critic: Optional[EnsembleCritic]
    env: EnvConfig
    manifest: Dict[str, Any]


def save_artifacts(directory: Path, artifacts: PolicyArtifacts) -> Path:
    critic = artifacts.critic
    manifest: Dict[str, Any] = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "tool_version": __version__,
        "algorithm": artifacts.config.algorithm.value,
        "seed": artifacts.config.seed,
        "action_bound": artifacts.policy.action_bound,
        "env": artifacts.env.model_dump(),
        "policy": "policy.bin",
        "normalizer": "normalizer.json",
        "critic": None,
    }
    save_network(directory / "policy.bin", artifacts.policy.net)
    write_json(directory / "normalizer.json", artifacts.normalizer.to_dict())
    if critic is not None:
        for i, (member, target) in enumerate(zip(critic.members, critic.targets)):
            save_network(directory / "critic" / f"member_{i}.bin", member)
            save_network(directory / "critic" / f"target_{i}.bin", target)
        manifest["critic"] = {
            "ensemble_size": critic.size,
            "gamma": critic.gamma,
            "tau": critic.tau,
            "target_interval": critic.target_interval,
            "updates": critic.updates,
        }
    write_json(directory / "manifest.json", manifest)
    return directory


def _read_json(path: Path) -> Dict[str, Any]:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise LabIOError(f"Missing checkpoint file {path}") from exc
    except OSError as exc:
        raise LabIOError(f"Cannot read {path}", payload={"error": str(exc)}) from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"Malformed JSON in {path}", payload={"error": str(exc)}) from exc


def load_artifacts(directory: Path) -> LoadedArtifacts:
    if not directory.is_dir():
        raise LabIOError(f"Checkpoint directory {directory} does not exist")
    manifest = _read_json(directory / "manifest.json")
    if manifest.get("format") != MANIFEST_FORMAT:
        raise DataError("Not a goat-lab checkpoint bundle", payload={"format": manifest.get("format")})

    normalizer = Normalizer.from_dict(_read_json(directory / manifest["normalizer"]))
    policy = Policy(
        net=load_network(directory / manifest["policy"]),
        normalizer=normalizer,
        action_bound=float(manifest["action_bound"]),
    )

    critic = None
    spec = manifest.get("critic")
    if spec:
        members = [load_network(directory / "critic" / f"member_{i}.bin") for i in range(spec["ensemble_size"])]
        targets = [load_network(directory / "critic" / f"target_{i}.bin") for i in range(spec["ensemble_size"])]
        critic = EnsembleCritic(
            members=members,
            targets=targets,
            optimizers=[adam_init(m) for m in members],
            normalizer=normalizer,
            gamma=float(spec["gamma"]),
            tau=spec["tau"],
            target_interval=int(spec["target_interval"]),
            action_bound=policy.action_bound,
            updates=int(spec["updates"]),
        )
    env = EnvConfig.model_validate(manifest["env"]) if "env" in manifest else EnvConfig()
    return LoadedArtifacts(policy=policy, normalizer=normalizer, critic=critic, env=env, manifest=manifest)


def write_weight_diagnostics(path: Path, diagnostics: Sequence[WeightDiagnostics]) -> None:
    """Columns: step, alpha, threshold, mean_eaw, frac_selected, mean_uw, mean_drw, mean_weight."""
    rows: List[Dict[str, Any]] = [asdict(row) for row in diagnostics]
    columns = list(WeightDiagnostics.__dataclass_fields__)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows, columns=columns).to_csv(path, index=False)
    except OSError as exc:
        raise LabIOError(f"Cannot write {path}", payload={"error": str(exc)}) from exc
