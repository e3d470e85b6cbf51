import json
import logging

import pandas as pd
import pytest

from goat_lab import __version__
from goat_lab.cli.main import main
from goat_lab.cli.reproduce import build_jobs
from goat_lab.core.config import build_run_config
from goat_lab.schemas.configs import Algorithm
from goat_lab.services.agents import load_artifacts
from goat_lab.services.env import load_dataset


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """Handlers installed by main() hold the captured stderr of the test that created them."""
    yield
    logging.getLogger().handlers.clear()


def last_json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


@pytest.fixture
def gcsl_run(tmp_path, capsys):
    run = tmp_path / "gcsl-run"
    argv = ["train", "--algo", "gcsl", "--updates", "3", "--batch-size", "16", "--log-interval", "1"]
    assert main([*argv, "--eval-interval", "0", "--out", str(run)]) == 0
    return run


class TestGenerate:
    def test_writes_a_loadable_dataset(self, tmp_path, capsys):
        out = tmp_path / "ne5.ndjson"
        assert main(["generate", "--kind", "nonexpert", "--n", "5", "--seed", "2", "--out", str(out)]) == 0
        summary = last_json(capsys)
        assert summary["n_traj"] == 5
        assert len(summary["sha256"]) == 64
        assert load_dataset(out).n_traj == 5

    def test_default_location_under_output_root(self, tmp_path):
        assert main(["generate", "--kind", "expert", "--n", "3"]) == 0
        assert (tmp_path / "runs" / "datasets" / "expert3_seed0.ndjson").exists()

    def test_invalid_kind_is_a_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["generate", "--kind", "perfect"])
        assert excinfo.value.code == 2

    def test_invalid_value_exits_with_usage_code(self, tmp_path):
        assert main(["generate", "--kind", "nonexpert", "--p-random", "1.5", "--out", str(tmp_path / "x")]) == 2


class TestTrain:
    def test_run_directory_layout(self, gcsl_run, capsys):
        summary = last_json(capsys)
        assert summary["algorithm"] == "gcsl"
        assert summary["final"]["step"] == 3
        assert (gcsl_run / "VERSION").read_text(encoding="utf-8").strip() == __version__
        assert (gcsl_run / "dataset.ndjson").exists()
        reference = json.loads((gcsl_run / "dataset.ref").read_text(encoding="utf-8"))
        assert len(reference["sha256"]) == 64
        lines = (gcsl_run / "logs" / "train.ndjson").read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["step"] for line in lines] == [1, 2, 3]
        assert load_artifacts(gcsl_run / "checkpoints").critic is None

    def test_stored_config_reloads(self, gcsl_run):
        config = build_run_config(gcsl_run / "config.json")
        assert config.algorithm.algorithm is Algorithm.GCSL
        assert config.algorithm.total_updates == 3

    def test_training_from_a_dataset_file(self, tmp_path):
        data = tmp_path / "ne.ndjson"
        assert main(["generate", "--kind", "nonexpert", "--n", "4", "--out", str(data)]) == 0
        run = tmp_path / "goat-run"
        argv = ["train", "--algo", "goat", "--data", str(data), "--updates", "3", "--batch-size", "16"]
        assert main([*argv, "--ensemble-size", "2", "--eval-interval", "0", "--out", str(run)]) == 0
        assert load_artifacts(run / "checkpoints").critic.size == 2
        weights = pd.read_csv(run / "logs" / "weights.csv")
        assert weights["step"].tolist() == [3]
        assert not (run / "dataset.ndjson").exists()

    def test_config_file_and_run_id(self, tmp_path, capsys):
        config = tmp_path / "bc.toml"
        config.write_text('run_id = "bc-demo"\n[algorithm]\nalgorithm = "bc"\ntotal_updates = 2\nbatch_size = 8\n')
        assert main(["train", "--config", str(config), "--eval-interval", "0"]) == 0
        assert (tmp_path / "runs" / "bc-demo" / "checkpoints" / "manifest.json").exists()
        assert last_json(capsys)["final"]["step"] == 2

    def test_unknown_algorithm(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["train", "--algo", "sac"])
        assert excinfo.value.code == 2

    def test_invalid_configuration(self, tmp_path):
        assert main(["train", "--batch-size", "0", "--out", str(tmp_path / "bad")]) == 2

    def test_missing_dataset_file(self, tmp_path):
        assert main(["train", "--data", str(tmp_path / "absent.ndjson"), "--out", str(tmp_path / "r")]) == 4


class TestEval:
    def test_checkpoint_report_lands_in_the_run(self, gcsl_run, capsys):
        capsys.readouterr()
        assert main(["eval", "--ckpt", str(gcsl_run), "--n", "5", "--seeds", "2", "--coverage", "--grid=-12:12:5"]) == 0
        summary = last_json(capsys)
        assert summary["seeds"] == 2
        assert set(summary["success"]) == {"R10", "R20"}
        reports = gcsl_run / "reports"
        assert len(pd.read_csv(reports / "eval_outcomes.csv")) == 20
        assert pd.read_csv(reports / "coverage.csv", index_col="y").shape == (5, 5)

    def test_scripted_policy(self, tmp_path, capsys):
        out = tmp_path / "scripted"
        assert main(["eval", "--scripted", "optimal", "--radii", "10", "--n", "10", "--seeds", "2", "--out", str(out)]) == 0
        assert last_json(capsys)["success"] == {"R10": 1.0}
        assert (out / "eval_summary.csv").exists()

    def test_uncertainty_grid_needs_a_critic(self, gcsl_run):
        assert main(["eval", "--ckpt", str(gcsl_run), "--n", "2", "--seeds", "1", "--uncertainty"]) == 2

    def test_uncertainty_grid(self, tmp_path):
        run = tmp_path / "goat"
        argv = ["train", "--algo", "goat", "--updates", "2", "--batch-size", "8", "--ensemble-size", "2"]
        assert main([*argv, "--eval-interval", "0", "--out", str(run)]) == 0
        assert main(["eval", "--ckpt", str(run), "--n", "2", "--seeds", "1", "--uncertainty", "--grid=-2:2:3"]) == 0
        std = pd.read_csv(run / "reports" / "uncertainty.csv", index_col="y")
        assert std.shape == (3, 3)
        assert (std.to_numpy() >= 0).all()
        assert (run / "reports" / "inverse_uncertainty.csv").exists()

    def test_missing_checkpoint_is_an_io_error(self, tmp_path):
        assert main(["eval", "--ckpt", str(tmp_path / "nothing")]) == 4

    def test_malformed_grid(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["eval", "--scripted", "zero", "--grid", "1:1:5"])
        assert excinfo.value.code == 2


class TestVerifyTheory:
    def test_passes_and_writes_report(self, tmp_path, capsys):
        out = tmp_path / "theory.json"
        assert main(["verify-theory", "--n", "4", "--C", "0.5", "--trials", "100", "--out", str(out)]) == 0
        summary = last_json(capsys)
        assert summary["passes"] == 100
        assert summary["closed_form_exact"] is True
        assert json.loads(out.read_text(encoding="utf-8"))["failures"] == []

    @pytest.mark.parametrize("argv", [["--n", "4", "--C", "0.25"], ["--n", "1"], ["--trials", "0"]])
    def test_invalid_arguments(self, argv):
        assert main(["verify-theory", *argv]) == 2


class TestReproduce:
    def test_tiny_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        argv = ["reproduce", "--table", "point-success", "--algos", "bc", "--seeds", "1", "--updates", "2"]
        assert main([*argv, "--batch-size", "8", "--n", "4", "--jobs", "1", "--out", str(out)]) == 0
        summary = last_json(capsys)
        assert summary["cells"] == 3 and summary["failures"] == 0
        table = pd.read_csv(out / "point-success.csv", index_col="agent")
        assert list(table.index) == ["BC"]
        assert table.shape[1] == 6
        assert "missing" not in table.to_numpy()

    def test_each_seed_draws_its_own_dataset(self):
        jobs = build_jobs(
            "point-success", seeds=3, updates=1, batch_size=8, n_goals=4, goal_seed=0, algorithms=[Algorithm.BC]
        )
        for label in {job.key[1] for job in jobs}:
            cells = [job for job in jobs if job.key[1] == label]
            assert sorted(job.dataset["seed"] for job in cells) == [0, 1, 2]
            assert all(job.dataset["seed"] == job.seed for job in cells)

    def test_unknown_algorithm_subset(self, tmp_path):
        assert main(["reproduce", "--table", "point-success", "--algos", "sac", "--out", str(tmp_path)]) == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out
