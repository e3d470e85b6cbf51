import numpy as np
import pandas as pd
import pytest

from goat_lab.core.exceptions import ConfigurationError, ShapeError
from goat_lab.schemas.configs import EnvConfig, NetworkConfig
from goat_lab.schemas.reports import GridSpec
from goat_lab.services.agents import optimal_policy, random_policy, zero_policy
from goat_lab.services.critic import make_critic
from goat_lab.services.evaluation import (
    coverage_grid,
    evaluate,
    evaluate_seeds,
    goal_sets_for,
    grid_centers,
    rollout,
    rollout_batch,
    success_rate,
    uncertainty_grid,
    write_eval_report,
    write_grid,
)
from goat_lab.services.replay import Normalizer

ENV = EnvConfig()
ORIGIN = np.zeros(2)


def upper_only(s, g):
    """Reaches goals in the upper half plane and stays put otherwise."""
    act = optimal_policy(ENV)(s, g)
    return np.where(np.asarray(g)[..., 1:] >= 0.0, act, 0.0)


class TestRollout:
    def test_optimal_policy_reaches_a_distant_goal(self):
        traj, success = rollout(optimal_policy(), ORIGIN, np.array([10.0, 0.0]), 50)
        assert success
        assert traj.horizon <= 11
        assert traj.rewards[-1] == 1

    def test_zero_policy_fails(self):
        traj, success = rollout(zero_policy, ORIGIN, np.array([10.0, 0.0]), 50)
        assert not success
        assert traj.horizon == 50

    def test_goal_at_start_succeeds_at_step_one(self):
        result = rollout_batch(optimal_policy(), ORIGIN, np.zeros((1, 2)), 50)
        assert result.steps_to_success.tolist() == [1]
        assert result.stay_return[0] == 50.0
        assert result.discounted_return[0] == pytest.approx((1 - 0.98**50) / (1 - 0.98))

    def test_full_horizon_rollout(self):
        traj, success = rollout(optimal_policy(), ORIGIN, np.array([3.0, 0.0]), 10, early_stop=False)
        assert success and traj.horizon == 10
        assert traj.rewards.tolist() == [0, 0] + [1] * 8

    @pytest.mark.parametrize("policy", [optimal_policy(), upper_only], ids=["optimal", "upper_only"])
    def test_returns_equal_traced_reward_sums(self, policy):
        goals = goal_sets_for([10.0], 20, goal_seed=4)["R10"][1]
        batch = rollout_batch(policy, ORIGIN, goals, 50)
        discounts = 0.98 ** np.arange(50)
        for k, goal in enumerate(goals):
            traj, _ = rollout(policy, ORIGIN, goal, 50, early_stop=False)
            assert batch.stay_return[k] == traj.rewards.sum()
            assert batch.discounted_return[k] == pytest.approx(float(discounts @ traj.rewards))

    def test_batch_matches_single_rollouts(self):
        goals = goal_sets_for([10.0], 20, goal_seed=1)["R10"][1]
        batch = rollout_batch(optimal_policy(), ORIGIN, goals, 50)
        for k, goal in enumerate(goals):
            traj, success = rollout(optimal_policy(), ORIGIN, goal, 50)
            assert success == bool(batch.success[k])
            assert traj.horizon == batch.steps_to_success[k]

    def test_invalid_arguments(self):
        with pytest.raises(ConfigurationError):
            rollout(zero_policy, ORIGIN, ORIGIN, 0)
        with pytest.raises(ShapeError):
            rollout_batch(zero_policy, ORIGIN, np.zeros(2), 5)


class TestEvaluate:
    def test_optimal_policy_on_both_circles(self):
        report = evaluate(optimal_policy(), goal_sets_for([10.0, 20.0], 200, goal_seed=0), ENV)
        assert report.sets["R10"].success_rate == 1.0
        assert report.sets["R20"].success_rate == 1.0
        assert report.sets["R10"].mean_return == pytest.approx(42.0, abs=1.0)
        assert report.sets["R10"].mean_stop_return == 1.0

    def test_random_policy_rarely_reaches_the_outer_circle(self):
        goals = goal_sets_for([20.0], 200, goal_seed=0)
        rates = [success_rate(random_policy(seed), goals["R20"][1], ENV) for seed in range(5)]
        assert max(rates) <= 0.05

    def test_report_is_self_consistent(self):
        report = evaluate(upper_only, goal_sets_for([10.0, 20.0], 100, goal_seed=2), ENV)
        for goal_set in report.sets.values():
            assert goal_set.success_rate == np.mean([o.success for o in goal_set.outcomes])
            assert goal_set.mean_return == np.mean([o.stay_return for o in goal_set.outcomes])
            for outcome in goal_set.outcomes:
                assert outcome.success == (outcome.steps_to_success > 0)
                expected = 50 - outcome.steps_to_success + 1 if outcome.success else 0.0
                assert outcome.stay_return == expected

    def test_iid_and_ood_slices(self):
        report = evaluate(upper_only, goal_sets_for([10.0, 20.0], 100, goal_seed=2), ENV)
        r10, r20 = report.sets["R10"], report.sets["R20"]
        assert r10.iid_success_rate == 1.0
        assert r10.ood_success_rate == 0.0
        assert r20.iid_success_rate is None
        assert r20.ood_success_rate == r20.success_rate

    def test_evaluation_is_deterministic(self):
        sets = goal_sets_for([10.0], 50, goal_seed=7)
        assert evaluate(upper_only, sets, ENV) == evaluate(upper_only, sets, ENV)

    def test_seeds_are_pooled(self):
        per_seed = [goal_sets_for([10.0], 40, goal_seed=k) for k in range(3)]
        report = evaluate_seeds([optimal_policy(), zero_policy, upper_only], per_seed, ENV)
        assert report.seeds_aggregated == 3
        assert len(report.sets["R10"].outcomes) == 120
        assert report.per_seed_success["R10"][:2] == [1.0, 0.0]
        assert report.sets["R10"].success_rate == pytest.approx(np.mean(report.per_seed_success["R10"]))

    def test_goal_set_validation(self):
        with pytest.raises(ConfigurationError):
            evaluate_seeds([], goal_sets_for([10.0], 5, 0), ENV)
        with pytest.raises(ConfigurationError):
            evaluate_seeds([zero_policy, zero_policy], [goal_sets_for([10.0], 5, 0)], ENV)
        with pytest.raises(ConfigurationError):
            evaluate_seeds(
                [zero_policy, zero_policy], [goal_sets_for([10.0], 5, 0), goal_sets_for([20.0], 5, 0)], ENV
            )


class TestGrids:
    def test_grid_centers(self):
        goals, axis = grid_centers(GridSpec(low=-1.0, high=1.0, resolution=3))
        assert axis.tolist() == [-1.0, 0.0, 1.0]
        assert goals[:3].tolist() == [[-1.0, -1.0], [0.0, -1.0], [1.0, -1.0]]

    def test_optimal_policy_covers_everything(self):
        grid = coverage_grid(optimal_policy(), GridSpec(), ENV)
        values = np.asarray(grid.values)
        assert values.shape == (25, 25)
        assert np.all(values == 1.0)

    def test_zero_policy_covers_only_the_start(self):
        values = np.asarray(coverage_grid(zero_policy, GridSpec(), ENV).values)
        assert values.sum() == 1.0
        assert values[12, 12] == 1.0

    def test_seed_average(self):
        grid = coverage_grid([optimal_policy(), zero_policy], GridSpec(resolution=5), ENV)
        values = np.asarray(grid.values)
        assert grid.seeds == 2
        assert values.shape == (5, 5)
        assert np.all((values >= 0.0) & (values <= 1.0))
        assert values[2, 2] == 1.0 and values[0, 0] == 0.5

    def test_uncertainty_grid(self):
        critic = make_critic(2, Normalizer.identity(), gamma=0.98, seed=0, network=NetworkConfig(hidden_sizes=(8,)))
        for member, value in zip(critic.members, (1.0, 3.0)):
            member.weights[-1][:] = 0.0
            member.biases[-1][:] = value
        std, inverse = uncertainty_grid(critic, zero_policy)
        assert np.asarray(std.values).shape == (21, 21)
        assert np.allclose(std.values, 1.0)
        assert np.allclose(inverse.values, 1.0)
        assert inverse.kind == "inverse_uncertainty"


class TestWriters:
    def test_eval_report_files(self, tmp_path):
        report = evaluate(upper_only, goal_sets_for([10.0, 20.0], 30, goal_seed=0), ENV)
        paths = write_eval_report(report, tmp_path / "reports")
        outcomes = pd.read_csv(paths["outcomes"])
        summary = pd.read_csv(paths["summary"])
        assert len(outcomes) == 60
        assert summary["set"].tolist() == ["R10", "R20"]
        assert summary.loc[0, "success_rate"] == pytest.approx(report.sets["R10"].success_rate)
        assert paths["json"].exists()

    def test_grid_files(self, tmp_path):
        grid = coverage_grid(zero_policy, GridSpec(resolution=5), ENV)
        paths = write_grid(grid, tmp_path, stem="zero")
        frame = pd.read_csv(paths["csv"], index_col="y")
        assert frame.shape == (5, 5)
        assert frame.to_numpy().sum() == 1.0
        assert "values" not in paths["json"].read_text(encoding="utf-8")
