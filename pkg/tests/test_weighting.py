import numpy as np
import pytest

from goat_lab.core.exceptions import NumericError, RelabelIndexError
from goat_lab.schemas.configs import WeightConfig
from goat_lab.services.replay import FifoQueue, RelabeledSample, fifo_push_many, quantile
from goat_lab.services.weighting import (
    WeightContext,
    alpha_schedule,
    chi2_weight,
    combine,
    combine_batch,
    drw,
    dsw,
    eaw,
    normalized_std,
    uw,
)

CFG = WeightConfig()


def sample(relabel_index=None, t=0):
    return RelabeledSample(
        s=np.zeros(2), a=np.zeros(2), g=np.ones(2), r=0, s_next=np.zeros(2), relabel_index=relabel_index, t=t
    )


class TestFactors:
    def test_eaw_known_values(self):
        assert eaw(0.0, CFG) == pytest.approx(1.0)
        assert eaw(0.5, CFG) == pytest.approx(np.e)
        assert eaw(3.0, CFG) == pytest.approx(10.0)
        assert eaw(1e6, CFG) == pytest.approx(10.0)

    def test_eaw_is_monotone_and_positive(self):
        a = np.sort(np.random.default_rng(0).normal(scale=3.0, size=10_000))
        weights = eaw(a, CFG)
        assert np.all(weights > 0) and np.all(weights <= CFG.eaw_clip)
        assert np.all(np.diff(weights) >= 0)

    def test_eaw_rejects_non_finite_advantage(self):
        with pytest.raises(NumericError):
            eaw(np.array([0.0, np.inf]), CFG)

    def test_chi2_weight(self):
        cfg = WeightConfig(kind="chi2", chi2_offset=0.5)
        assert chi2_weight(np.array([-1.0, 0.0, 20.0]), cfg).tolist() == [0.0, 0.5, 10.0]

    def test_dsw_known_values(self):
        assert dsw(0.2, 0.1, CFG) == 1.0
        assert dsw(0.05, 0.1, CFG) == pytest.approx(0.05)
        assert dsw(0.1, 0.1, CFG) == 1.0

    def test_dsw_keeps_the_top_twenty_percent(self):
        advantages = np.random.default_rng(1).permutation(np.arange(1000.0))
        queue = fifo_push_many(FifoQueue(5000), advantages)
        threshold = quantile(queue, 80)
        selected = np.asarray(dsw(advantages, threshold, CFG)) == 1.0
        assert selected.mean() == pytest.approx(0.2, abs=2e-3)

    def test_uw_known_values(self):
        assert uw(0.0, 0.0, 1.0, WeightConfig(uw_sharpness=3.0)) == pytest.approx(0.5)
        assert uw(1.0, 0.0, 1.0, WeightConfig(uw_sharpness=2.5)) == pytest.approx(1.0)
        assert uw(0.5, 0.0, 1.0, WeightConfig(uw_sharpness=1.0)) == pytest.approx(np.tanh(0.5) + 0.5)
        assert uw(0.7, 0.7, 0.7, CFG) == pytest.approx(0.5)

    def test_uw_monotone_and_bounded(self):
        raw = np.sort(np.random.default_rng(2).uniform(-1.0, 3.0, size=10_000))
        weights = uw(raw, 0.0, 2.0, CFG)
        assert np.all(np.diff(weights) >= 0)
        assert np.all((weights >= 0.5) & (weights <= 1.0))

    def test_normalized_std_is_clamped(self):
        assert normalized_std(np.array([-1.0, 0.5, 4.0]), 0.0, 1.0).tolist() == [0.0, 0.5, 1.0]

    def test_drw(self):
        assert drw(5, 5, 0.98) == pytest.approx(1.0)
        assert drw(15, 5, 0.98) == pytest.approx(0.98**10)
        assert drw(-1, 7, 0.98) == pytest.approx(1.0)
        assert drw(15, 5, 0.98, WeightConfig(drw_enabled=False)) == 1.0
        assert drw(np.array([3, -1]), np.array([1, 4]), 0.5).tolist() == [0.25, 1.0]
        with pytest.raises(RelabelIndexError):
            drw(2, 5, 0.98)


class TestSchedule:
    def test_linear_ramp_then_flat(self):
        assert alpha_schedule(0, 1000, CFG) == 0.0
        assert alpha_schedule(100, 1000, CFG) == pytest.approx(40.0)
        assert alpha_schedule(200, 1000, CFG) == pytest.approx(80.0)
        assert alpha_schedule(900, 1000, CFG) == pytest.approx(80.0)

    def test_short_runs(self):
        assert alpha_schedule(1, 2, CFG) == pytest.approx(80.0)


class TestCombine:
    def test_product_of_factors(self):
        ctx = WeightContext(threshold=0.0, std_min=0.0, std_max=1.0)
        bundle = combine(sample(), np.log(2.0) / 2.0, 0.0, ctx, CFG)
        assert bundle.eaw == pytest.approx(2.0)
        assert bundle.dsw == 1.0
        assert bundle.uw == pytest.approx(0.5)
        assert bundle.drw == 1.0
        assert bundle.product == pytest.approx(1.0)

    def test_warmup_disables_selection(self):
        bundle = combine(sample(), -5.0, 0.0, WeightContext(threshold=None), CFG)
        assert bundle.dsw == 1.0

    def test_relabel_discount_applies_when_enabled(self):
        cfg = WeightConfig(drw_enabled=True)
        ctx = WeightContext(threshold=None, gamma=0.9)
        assert combine(sample(relabel_index=4, t=2), 0.0, 0.0, ctx, cfg).drw == pytest.approx(0.81)
        assert combine(sample(relabel_index=None, t=2), 0.0, 0.0, ctx, cfg).drw == 1.0

    def test_product_is_always_positive(self):
        rng = np.random.default_rng(3)
        size = 10_000
        t = rng.integers(0, 50, size=size)
        index = np.where(rng.random(size) < 0.5, rng.integers(t, 50), -1)
        ctx = WeightContext(threshold=0.1, std_min=0.2, std_max=1.5)
        bundle = combine_batch(
            rng.normal(scale=2.0, size=size), rng.uniform(0, 2, size=size), index, t, ctx, WeightConfig(drw_enabled=True)
        )
        assert np.all(bundle.product > 0)
        assert np.allclose(bundle.product, bundle.eaw * bundle.dsw * bundle.uw * bundle.drw)
        assert set(np.unique(bundle.dsw)) <= {CFG.eps_low, 1.0}

    def test_ablation_flags(self):
        a = np.array([-1.0, 0.0, 1.0])
        std = np.array([0.0, 0.5, 1.0])
        idx, t = np.full(3, -1), np.zeros(3, dtype=int)
        ctx = WeightContext(threshold=0.0, std_min=0.0, std_max=1.0)

        plain = combine_batch(a, std, idx, t, ctx, WeightConfig(use_eaw=False, use_dsw=False, use_uw=False))
        assert np.array_equal(plain.product, np.ones(3))

        advantage_only = combine_batch(a, std, idx, t, ctx, WeightConfig(use_dsw=False, use_uw=False))
        assert np.allclose(advantage_only.product, eaw(a, CFG))

        selected = combine_batch(a, std, idx, t, ctx, WeightConfig(use_uw=False))
        assert np.allclose(selected.product, eaw(a, CFG) * np.array([0.05, 1.0, 1.0]))

        chi2 = combine_batch(a, std, idx, t, ctx, WeightConfig(kind="chi2", use_dsw=False, use_uw=False))
        assert np.allclose(chi2.product, [0.0, 0.0, 1.0])
