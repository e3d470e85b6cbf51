"""Run directory layout.

    <root>/config.json    resolved RunConfig (loadable again with --config)
    <root>/VERSION        tool version that produced the run
    <root>/dataset.ref    {"path", "sha256", "label"} of the training data
    <root>/checkpoints/   artifact bundle
    <root>/logs/          train.ndjson, weights.csv
    <root>/reports/       evaluation output
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .. import __version__
from ..core.exceptions import LabIOError
from ..schemas.configs import RunConfig
from ..schemas.reports import TrainLogRecord
from ..services.env import OfflineDataset
from ..services.env.datasets import dataset_digest
from ..utils.serialization import append_ndjson, write_json


@dataclass(frozen=True)
class RunDirectory:
    root: Path

    @property
    def config_path(self) -> Path:
        return self.root / "config.json"

    @property
    def dataset_ref(self) -> Path:
        return self.root / "dataset.ref"

    @property
    def checkpoints(self) -> Path:
        return self.root / "checkpoints"

    @property
    def logs(self) -> Path:
        return self.root / "logs"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    @property
    def train_log(self) -> Path:
        return self.logs / "train.ndjson"

    @classmethod
    def create(cls, root: Path, config: RunConfig, dataset: OfflineDataset, dataset_path: Optional[Path]) -> "RunDirectory":
        run = cls(root)
        try:
            for directory in (run.checkpoints, run.logs, run.reports):
                directory.mkdir(parents=True, exist_ok=True)
            write_json(run.config_path, config.model_dump(mode="json"))
            (root / "VERSION").write_text(__version__ + "\n", encoding="utf-8")
            write_json(
                run.dataset_ref,
                {
                    "path": str(dataset_path) if dataset_path is not None else None,
                    "sha256": dataset_digest(dataset),
                    "label": dataset.spec.label if dataset.spec else None,
                },
            )
            run.train_log.write_text("", encoding="utf-8")
        except OSError as exc:
            raise LabIOError(f"Cannot prepare run directory {root}", payload={"error": str(exc)}) from exc
        return run

    def append_record(self, record: TrainLogRecord) -> None:
        append_ndjson(self.train_log, record.model_dump())

    @classmethod
    def locate_checkpoint(cls, path: Path) -> Path:
        """Accept either a checkpoint bundle or a run directory that contains one."""
        nested = cls(path).checkpoints
        if (nested / "manifest.json").exists():
            return nested
        return path
