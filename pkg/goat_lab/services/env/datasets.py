from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .pointreach import DEFAULT_ENV, OfflineDataset, clip_action, optimal_action, reward
from ...core.exceptions import ConfigurationError, DataError, LabIOError
from ...core.logging_config import get_logger
from ...schemas.configs import DatasetKind, DatasetSpec, EnvConfig

logger = get_logger(__name__)

DATASET_FORMAT = "goat-lab/pointreach-dataset"
DATASET_VERSION = 1


def _behavior_goal(rng: np.random.Generator, spec: DatasetSpec, env: EnvConfig) -> np.ndarray:
    lower = spec.lower_fraction > 0 and rng.random() < spec.lower_fraction
    theta = rng.uniform(np.pi, 2 * np.pi) if lower else rng.uniform(0.0, np.pi)
    return env.goal_radius_train * np.array([np.cos(theta), np.sin(theta)])


def _roll_behavior(rng: np.random.Generator, goal: np.ndarray, spec: DatasetSpec, env: EnvConfig):
    horizon = env.horizon
    states = np.zeros((horizon + 1, 2))
    actions = np.zeros((horizon, 2))
    noisy = spec.kind is DatasetKind.NONEXPERT
    for t in range(horizon):
        a = optimal_action(states[t], goal, env)
        if noisy:
            noise = rng.normal(0.0, spec.noise_std, size=2)
            coin = rng.random()
            random_action = rng.uniform(-env.action_bound, env.action_bound, size=2)
            a = random_action if coin < spec.p_random else a + noise
        actions[t] = clip_action(a, env.action_bound)
        states[t + 1] = states[t] + actions[t]
    rewards = reward(states[1:], goal, env)
    return states, actions, rewards


def generate_dataset(spec: DatasetSpec, env: EnvConfig = DEFAULT_ENV, seed: Optional[int] = None) -> OfflineDataset:
    """
    Roll the scripted behavior policy from the origin toward semicircle goals.

    Each trajectory draws from its own generator spawned from the dataset seed, so the result only
    depends on (spec, env, seed).
    """
    base_seed = spec.seed if seed is None else seed
    streams = np.random.SeedSequence(base_seed).spawn(spec.n_traj)

    goals = np.zeros((spec.n_traj, 2))
    states = np.zeros((spec.n_traj, env.horizon + 1, 2))
    actions = np.zeros((spec.n_traj, env.horizon, 2))
    rewards = np.zeros((spec.n_traj, env.horizon), dtype=np.int8)
    for i, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        goals[i] = _behavior_goal(rng, spec, env)
        states[i], actions[i], rewards[i] = _roll_behavior(rng, goals[i], spec, env)

    resolved = spec.model_copy(update={"seed": base_seed})
    dataset = OfflineDataset(goals, states, actions, rewards, env=env, spec=resolved)
    logger.info(
        "Generated offline dataset",
        extra={
            "label": resolved.label,
            "n_traj": spec.n_traj,
            "seed": base_seed,
            "final_success_rate": float(rewards[:, -1].mean()),
        },
    )
    return dataset


def sample_eval_goals(radius: float, n: int, seed: int) -> np.ndarray:
    """n goals with uniform angle on the full circle of the given radius, shape (n, 2)."""
    if not radius > 0:
        raise ConfigurationError("Evaluation radius must be positive", payload={"radius": radius})
    if n < 1:
        raise ConfigurationError("At least one evaluation goal is required", payload={"n": n})
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=n)
    return radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)


def _header(dataset: OfflineDataset) -> Dict[str, Any]:
    spec = dataset.spec or DatasetSpec()
    return {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "kind": spec.kind.value,
        "n_traj": dataset.n_traj,
        "horizon": dataset.horizon,
        "seed": spec.seed,
        "noise_std": spec.effective_noise_std,
        "p_random": spec.effective_p_random,
        "lower_fraction": spec.lower_fraction,
        "env": dataset.env.model_dump(),
    }


def dataset_lines(dataset: OfflineDataset) -> List[str]:
    lines = [json.dumps(_header(dataset))]
    for i in range(dataset.n_traj):
        record = {
            "goal": dataset.goals[i].tolist(),
            "states": dataset.states[i].tolist(),
            "actions": dataset.actions[i].tolist(),
            "rewards": dataset.rewards[i].astype(int).tolist(),
        }
        lines.append(json.dumps(record))
    return lines


def dataset_bytes(dataset: OfflineDataset) -> bytes:
    return ("\n".join(dataset_lines(dataset)) + "\n").encode("utf-8")


def dataset_digest(dataset: OfflineDataset) -> str:
    return hashlib.sha256(dataset_bytes(dataset)).hexdigest()


def save_dataset(path: Path, dataset: OfflineDataset) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(dataset_bytes(dataset))
    except OSError as exc:
        raise LabIOError(f"Cannot write dataset {path}", payload={"error": str(exc)}) from exc
    logger.info("Wrote dataset", extra={"path": str(path), "n_traj": dataset.n_traj})


def load_dataset(path: Path) -> OfflineDataset:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise LabIOError(f"Cannot read dataset {path}", payload={"error": str(exc)}) from exc
    if not lines:
        raise DataError(f"Dataset {path} is empty")

    try:
        header = json.loads(lines[0])
        records = [json.loads(line) for line in lines[1:] if line.strip()]
    except json.JSONDecodeError as exc:
        raise DataError(f"Dataset {path} is not valid NDJSON", payload={"error": str(exc)}) from exc

    if header.get("format") != DATASET_FORMAT or header.get("version") != DATASET_VERSION:
        raise DataError(
            "Unrecognised dataset header",
            payload={"format": header.get("format"), "version": header.get("version")},
        )
    if not records:
        raise DataError(f"Dataset {path} holds no trajectories")

    env = EnvConfig.model_validate(header["env"])
    spec = DatasetSpec(
        kind=DatasetKind(header["kind"]),
        n_traj=len(records),
        noise_std=header["noise_std"],
        p_random=header["p_random"],
        lower_fraction=header["lower_fraction"],
        seed=header["seed"],
    )
    try:
        dataset = OfflineDataset(
            goals=np.array([r["goal"] for r in records], dtype=float),
            states=np.array([r["states"] for r in records], dtype=float),
            actions=np.array([r["actions"] for r in records], dtype=float),
            rewards=np.array([r["rewards"] for r in records], dtype=np.int8),
            env=env,
            spec=spec,
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"Malformed trajectory record in {path}", payload={"error": str(exc)}) from exc
    dataset.validate()
    return dataset
