from __future__ import annotations

import argparse
from pathlib import Path
from typing import List, Tuple

from .rundir import RunDirectory
from ..core.config import get_settings
from ..core.exceptions import UsageError
from ..core.run_context import get_run_id
from ..schemas.configs import EnvConfig
from ..schemas.reports import GridSpec
from ..services.agents import LoadedArtifacts, load_artifacts, scripted_policy
from ..services.evaluation import coverage_grid, evaluate_seeds, goal_sets_for, write_eval_report, write_grid
from ..services.evaluation.grids import UNCERTAINTY_GRID, uncertainty_grid
from ..utils.serialization import dumps_line

NAME = "eval"


def parse_radii(text: str) -> Tuple[float, ...]:
    try:
        radii = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid radii {text!r}") from exc
    if not radii or any(r <= 0 for r in radii):
        raise argparse.ArgumentTypeError("radii must be positive numbers, e.g. 10,20")
    return radii


def parse_grid(text: str) -> GridSpec:
    """low:high:resolution, e.g. -12:12:25 (write --grid=-12:12:25 so the leading minus is not a flag)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be low:high:resolution")
    try:
        low, high, resolution = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}") from exc
    if high <= low or resolution < 2:
        raise argparse.ArgumentTypeError("grid needs high > low and resolution >= 2")
    return GridSpec(low=low, high=high, resolution=resolution)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Evaluate checkpoints on circular goal sets")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--ckpt", type=Path, action="append", help="checkpoint bundle or run directory; repeat per seed")
    source.add_argument("--scripted", choices=["optimal", "zero", "random"], help="evaluate a scripted policy")
    parser.add_argument("--radii", type=parse_radii, default=(10.0, 20.0))
    parser.add_argument("--n", dest="n_goals", type=int, default=200, help="goals per set")
    parser.add_argument("--seeds", type=int, default=5, help="goal seeds when a single policy is evaluated")
    parser.add_argument("--goal-seed", type=int, default=0)
    parser.add_argument("--coverage", action="store_true", help="also emit the success coverage grid")
    parser.add_argument("--uncertainty", action="store_true", help="also emit the ensemble Std grid")
    parser.add_argument("--grid", type=parse_grid, default=None, help="low:high:resolution")
    parser.add_argument("--out", type=Path, default=None, help="report directory")
    parser.set_defaults(handler=handle)


def _load(paths: List[Path]) -> List[LoadedArtifacts]:
    return [load_artifacts(RunDirectory.locate_checkpoint(path)) for path in paths]


def _report_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return args.out
    if args.ckpt:
        first = args.ckpt[0]
        if (RunDirectory(first).checkpoints / "manifest.json").exists():
            return RunDirectory(first).reports
    return get_settings().output_root / "eval" / (get_run_id() or "eval")


def handle(args: argparse.Namespace) -> None:
    if args.n_goals < 1 or args.seeds < 1:
        raise UsageError("--n and --seeds must be positive", payload={"n": args.n_goals, "seeds": args.seeds})

    loaded = _load(args.ckpt) if args.ckpt else []
    env = loaded[0].env if loaded else EnvConfig()
    policies = [item.policy for item in loaded] or [scripted_policy(args.scripted, env=env, seed=args.goal_seed)]

    if len(policies) == 1:
        group = policies * args.seeds
        goal_sets = [goal_sets_for(args.radii, args.n_goals, args.goal_seed + k) for k in range(args.seeds)]
    else:
        group = policies
        goal_sets = goal_sets_for(args.radii, args.n_goals, args.goal_seed)
    report = evaluate_seeds(group, goal_sets, env)

    out = _report_dir(args)
    written = {f"report_{key}": path for key, path in write_eval_report(report, out).items()}

    if args.coverage:
        grid = coverage_grid(policies, args.grid or GridSpec(), env)
        written.update({f"coverage_{key}": path for key, path in write_grid(grid, out, "coverage").items()})

    if args.uncertainty:
        with_critic = next((item for item in loaded if item.critic is not None), None)
        if with_critic is None:
            raise UsageError("--uncertainty needs a checkpoint trained with a critic")
        std_grid, inverse_grid = uncertainty_grid(with_critic.critic, with_critic.policy, args.grid or UNCERTAINTY_GRID)
        written.update({f"uncertainty_{key}": path for key, path in write_grid(std_grid, out, "uncertainty").items()})
        written.update(
            {f"inverse_uncertainty_{key}": path for key, path in write_grid(inverse_grid, out, "inverse_uncertainty").items()}
        )

    print(
        dumps_line(
            {
                "success": {name: s.success_rate for name, s in report.sets.items()},
                "return": {name: s.mean_return for name, s in report.sets.items()},
                "seeds": report.seeds_aggregated,
                "files": written,
            }
        )
    )
