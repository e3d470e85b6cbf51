import json
import logging
import math
from pathlib import Path

import numpy as np
import pytest

from goat_lab.cli.rundir import RunDirectory
from goat_lab.core.config import build_run_config, deep_merge, get_settings, validate_section
from goat_lab.core.exceptions import ConfigurationError, LabIOError
from goat_lab.core.logging_config import LabJSONFormatter, RunIdFilter
from goat_lab.core.run_context import get_run_id, get_run_tags, new_run_id, reset_run_id, set_run_id, training_scope
from goat_lab.schemas.configs import Algorithm, WeightConfig
from goat_lab.schemas.reports import TrainLogRecord
from goat_lab.utils.serialization import append_ndjson, to_jsonable, write_json, write_ndjson


class TestSettings:
    def test_environment_overrides_defaults(self, monkeypatch, tmp_path):
        monkeypatch.setenv("GOAT_LAB_JOBS", "3")
        get_settings.cache_clear()
        settings = get_settings()
        assert settings.jobs == 3
        assert settings.output_root == tmp_path / "runs"

    def test_settings_are_cached(self):
        assert get_settings() is get_settings()


class TestRunConfig:
    def test_defaults(self):
        config = build_run_config()
        assert config.algorithm.algorithm is Algorithm.GOAT
        assert config.env.horizon == 50
        assert config.weighting.alpha_max == 80.0

    def test_precedence_file_then_overrides(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[algorithm]\nseed = 4\nbatch_size = 64\n[weighting]\nbeta = 1.5\n', encoding="utf-8")
        config = build_run_config(path, {"algorithm": {"seed": 9}})
        assert config.algorithm.seed == 9
        assert config.algorithm.batch_size == 64
        assert config.weighting.beta == 1.5

    def test_json_config_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"algorithm": {"algorithm": "wgcsl"}}), encoding="utf-8")
        assert build_run_config(path).algorithm.algorithm is Algorithm.WGCSL

    def test_invalid_values_raise_configuration_error(self, tmp_path):
        with pytest.raises(ConfigurationError) as excinfo:
            build_run_config(overrides={"algorithm": {"batch_size": 0}})
        assert excinfo.value.payload["errors"]
        with pytest.raises(ConfigurationError):
            build_run_config(overrides={"weighting": {"unknown_knob": 1}})

        broken = tmp_path / "broken.toml"
        broken.write_text("[algorithm\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            build_run_config(broken)
        with pytest.raises(LabIOError):
            build_run_config(tmp_path / "absent.toml")

    def test_deep_merge_keeps_sibling_keys(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
        assert merged == {"a": {"x": 1, "y": 3}, "b": 1}

    def test_validate_section(self):
        assert validate_section(WeightConfig, {"beta": 0.5}).beta == 0.5
        with pytest.raises(ConfigurationError):
            validate_section(WeightConfig, {"alpha_max": 150})


class TestLogging:
    def _record(self, **extra):
        record = logging.LogRecord("goat_lab.test", logging.INFO, __file__, 10, "Training progress", None, None)
        for key, value in extra.items():
            setattr(record, key, value)
        return record

    def test_json_formatter_includes_run_id_and_extras(self):
        token = set_run_id("train-abc")
        try:
            payload = json.loads(LabJSONFormatter().format(self._record(step=5, loss=float("nan"))))
        finally:
            reset_run_id(token)
        assert payload["run_id"] == "train-abc"
        assert payload["message"] == "Training progress"
        assert payload["extra"] == {"step": 5, "loss": "non-finite"}

    def test_run_id_filter(self):
        reset_run_id()
        record = self._record()
        assert RunIdFilter().filter(record)
        assert record.run_id == "-"

    def test_run_ids(self):
        rid = new_run_id("eval")
        assert rid.startswith("eval-") and len(rid) == len("eval-") + 12
        token = set_run_id(rid)
        assert get_run_id() == rid
        reset_run_id(token)

    def test_training_scope_tags_records(self):
        record = self._record()
        with training_scope("goat", 3, "Non-Expert 50") as tags:
            RunIdFilter().filter(record)
            payload = json.loads(LabJSONFormatter().format(record))
            with training_scope("bc", 0, "Expert 10"):
                assert str(get_run_tags()) == "bc/seed=0/Expert 10"
            assert get_run_tags() == tags
        assert payload["run"] == {"algorithm": "goat", "seed": 3, "dataset": "Non-Expert 50"}
        assert "run_tags" not in payload.get("extra", {})
        assert record.run_tags == "goat/seed=3/Non-Expert 50"
        assert get_run_tags() is None

    def test_records_outside_a_training_scope_carry_no_tags(self):
        record = self._record()
        assert "run" not in json.loads(LabJSONFormatter().format(record))
        RunIdFilter().filter(record)
        assert record.run_tags == "-"


def test_to_jsonable_handles_numpy_and_non_finite():
    converted = to_jsonable({"a": np.arange(2), "b": np.float64(math.inf), "c": (1, Path("x"))})
    assert converted == {"a": [0, 1], "b": "non-finite", "c": [1, "x"]}


class TestWriters:
    @pytest.fixture
    def blocked(self, tmp_path):
        """A path whose parent directory is a regular file."""
        parent = tmp_path / "not-a-dir"
        parent.write_text("", encoding="utf-8")
        return parent / "out.json"

    def test_writers_raise_lab_io_error(self, blocked):
        with pytest.raises(LabIOError):
            write_json(blocked, {"a": 1})
        with pytest.raises(LabIOError):
            write_ndjson(blocked, [{"a": 1}])
        with pytest.raises(LabIOError):
            append_ndjson(blocked, {"a": 1})

    def test_run_directory_append_needs_logs(self, tmp_path):
        run = RunDirectory(tmp_path / "never-created")
        with pytest.raises(LabIOError) as excinfo:
            run.append_record(TrainLogRecord(step=1, policy_loss=0.5))
        assert excinfo.value.exit_code == 4

    def test_append_writes_one_line_per_record(self, tmp_path):
        path = tmp_path / "log.ndjson"
        append_ndjson(path, {"step": 1, "loss": math.nan})
        append_ndjson(path, {"step": 2})
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert lines == [{"step": 1, "loss": "non-finite"}, {"step": 2}]
