import numpy as np
import pytest

from goat_lab.core.exceptions import ConfigurationError, ShapeError
from goat_lab.services.theory import (
    CapFamily,
    DiscreteDist,
    brute_force_worst_case,
    closed_form_is_exact,
    sample_non_uniform,
    uniform_worst_case_closed_form,
    variation_divergence,
    variation_divergence_subsets,
    verify_uniform_minimax,
    worst_case_d1,
    worst_case_witness,
)


class TestVariationDivergence:
    def test_known_values(self):
        p = DiscreteDist(np.array([0.7, 0.3]))
        assert variation_divergence(p, p) == 0.0
        assert variation_divergence(p, DiscreteDist(np.array([0.5, 0.5]))) == pytest.approx(0.4)
        assert variation_divergence_subsets(p, DiscreteDist(np.array([0.5, 0.5]))) == pytest.approx(0.4)
        disjoint = variation_divergence(DiscreteDist(np.array([1.0, 0.0])), DiscreteDist(np.array([0.0, 1.0])))
        assert disjoint == pytest.approx(2.0)

    def test_l1_form_equals_subset_form(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            p, q = DiscreteDist(rng.dirichlet(np.ones(n))), DiscreteDist(rng.dirichlet(np.ones(n)))
            assert variation_divergence(p, q) == pytest.approx(variation_divergence_subsets(p, q), abs=1e-12)

    def test_mismatched_ground_sets(self):
        with pytest.raises(ShapeError):
            variation_divergence(DiscreteDist.uniform(2), DiscreteDist.uniform(3))

    @pytest.mark.parametrize("p", [[0.5, 0.4], [1.2, -0.2], [np.nan, 1.0]])
    def test_invalid_distributions(self, p):
        with pytest.raises(ConfigurationError):
            DiscreteDist(np.array(p))


class TestWorstCase:
    def test_uniform_known_values(self):
        assert worst_case_d1(DiscreteDist.uniform(4), CapFamily(4, 0.5)) == pytest.approx(1.0)
        assert uniform_worst_case_closed_form(4, 0.5) == pytest.approx(1.0)
        assert worst_case_d1(DiscreteDist.uniform(4), CapFamily(4, 0.25)) == pytest.approx(0.0)

    def test_skewed_example(self):
        s = DiscreteDist(np.array([0.7, 0.1, 0.1, 0.1]))
        fam = CapFamily(4, 0.5)
        assert worst_case_d1(s, fam) == pytest.approx(1.6)
        assert worst_case_witness(s, fam).tolist() == [0.0, 0.5, 0.5, 0.0]
        assert brute_force_worst_case(s, fam) == pytest.approx(1.6)

    def test_two_point_example(self):
        fam = CapFamily(2, 0.6)
        skewed = worst_case_d1(DiscreteDist(np.array([0.9, 0.1])), fam)
        assert skewed == pytest.approx(1.0)
        assert skewed == pytest.approx(brute_force_worst_case(DiscreteDist(np.array([0.9, 0.1])), fam))
        assert skewed > uniform_worst_case_closed_form(2, 0.6)
        assert skewed > worst_case_d1(DiscreteDist.uniform(2), fam)

    def test_closed_form_only_exact_for_integer_inverse_caps(self):
        assert closed_form_is_exact(0.5) and not closed_form_is_exact(0.4)
        assert worst_case_d1(DiscreteDist.uniform(4), CapFamily(4, 0.4)) == pytest.approx(0.6)
        assert uniform_worst_case_closed_form(4, 0.4) == pytest.approx(0.75)

    def test_agrees_with_exhaustive_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(2, 7))
            fam = CapFamily(n, float(rng.uniform(1.0 / n, 1.0)))
            s = DiscreteDist(rng.dirichlet(np.ones(n)))
            assert worst_case_d1(s, fam) == pytest.approx(brute_force_worst_case(s, fam), abs=1e-12)

    def test_random_oracle_is_a_lower_bound(self):
        s = DiscreteDist(np.array([0.4, 0.3, 0.2, 0.1]))
        fam = CapFamily(4, 0.3)
        sampled = brute_force_worst_case(s, fam, mode="random", samples=2000, seed=3)
        assert sampled <= worst_case_d1(s, fam) + 1e-12
        assert sampled == pytest.approx(worst_case_d1(s, fam))

    def test_non_decreasing_in_the_cap(self):
        s = DiscreteDist(np.random.default_rng(2).dirichlet(np.ones(5)))
        values = [worst_case_d1(s, CapFamily(5, c)) for c in np.linspace(0.2, 1.0, 17)]
        assert np.all(np.diff(values) >= -1e-12)

    def test_single_point(self):
        assert worst_case_d1(DiscreteDist(np.array([1.0])), CapFamily(1, 1.0)) == 0.0

    def test_configuration_errors(self):
        with pytest.raises(ConfigurationError):
            CapFamily(4, 0.2)
        with pytest.raises(ConfigurationError):
            brute_force_worst_case(DiscreteDist.uniform(13), CapFamily(13, 0.5))
        with pytest.raises(ConfigurationError):
            sample_non_uniform(1, np.random.default_rng(0))
        with pytest.raises(ShapeError):
            worst_case_d1(DiscreteDist.uniform(3), CapFamily(4, 0.5))


class TestUniformMinimax:
    def test_every_trial_passes(self):
        report = verify_uniform_minimax(4, 0.5, trials=1000, seed=0)
        assert report.passes == 1000
        assert report.failures == []
        assert report.min_margin > 0.0
        assert report.uniform_worst_case == pytest.approx(1.0)
        assert report.closed_form == pytest.approx(1.0)

    def test_non_integer_inverse_cap(self):
        report = verify_uniform_minimax(5, 0.3, trials=200, seed=4, strict=False)
        assert report.passes == 200
        assert report.uniform_worst_case == pytest.approx(worst_case_d1(DiscreteDist.uniform(5), CapFamily(5, 0.3)))

    def test_sampled_distributions_are_non_uniform_with_full_support(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            s = sample_non_uniform(6, rng)
            assert np.all(s.p > 0)
            assert np.max(np.abs(s.p - 1 / 6)) > 1e-6

    def test_invalid_trials(self):
        with pytest.raises(ConfigurationError):
            verify_uniform_minimax(4, 0.5, trials=0, seed=0)
