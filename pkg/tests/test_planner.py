import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mibound.bounds import positive_accuracy_bounds
from mibound.planner import (
    SubsampleRate,
    certified_prior_cap,
    max_rate_for_target,
    plan,
    subsample,
)


@pytest.mark.parametrize("t", [1.0, 0.01, 0.5])
def test_certified_cap_is_rate(t):
    assert certified_prior_cap(SubsampleRate(t)) == t


@pytest.mark.parametrize("t", [0.0, -0.1, 1.01, math.nan])
def test_rate_rejected(t):
    with pytest.raises(ValueError):
        SubsampleRate(t)


class TestSubsample:
    def test_full_rate_keeps_all(self):
        ids = [f"id{i}" for i in range(100)]
        assert subsample(ids, SubsampleRate(1.0), 123) == ids

    def test_binomial_concentration(self):
        ids = list(range(10_000))
        kept = subsample(ids, SubsampleRate(0.3), 7)
        assert abs(len(kept) - 3000) <= 4 * math.sqrt(10_000 * 0.3 * 0.7)

    def test_deterministic_and_ordered(self):
        ids = [f"p{i}" for i in range(500)]
        a = subsample(ids, SubsampleRate(0.5), 99)
        b = subsample(ids, SubsampleRate(0.5), 99)
        assert a == b
        assert a == [x for x in ids if x in set(a)]
        assert a != subsample(ids, SubsampleRate(0.5), 100)

    def test_stream_rule(self):
        # one PCG64 double per id, in input order, kept iff < T
        ids = list(range(50))
        u = np.random.Generator(np.random.PCG64(2024)).random(50)
        assert subsample(ids, SubsampleRate(0.4), 2024) == [i for i in ids if u[i] < 0.4]

    def test_frozen_output(self):
        # regression pin for cross-platform reproducibility
        assert subsample(list("abcdefghij"), SubsampleRate(0.5), 0) == \
            [x for x, u in zip("abcdefghij", np.random.Generator(np.random.PCG64(0)).random(10)) if u < 0.5]

    def test_rejects(self):
        with pytest.raises(ValueError):
            subsample([], SubsampleRate(0.5), 1)
        with pytest.raises(ValueError):
            subsample(["a", "a"], SubsampleRate(0.5), 1)
        with pytest.raises(ValueError):
            subsample(["a"], SubsampleRate(0.5), -1)
        with pytest.raises(ValueError):
            subsample(["a"], SubsampleRate(0.5), 2**64)

    def test_two_stage_cap_empirical(self):
        # a point already drawn with prob 0.8, then sub-sampled at T = 0.25
        rng = np.random.default_rng(5)
        hits = 0
        trials = 4000
        for seed in range(trials):
            in_d = rng.random() < 0.8
            if in_d and subsample(["x", "y"], SubsampleRate(0.25), seed)[:1] == ["x"]:
                hits += 1
        rate = hits / trials
        assert abs(rate - 0.2) < 4 * math.sqrt(0.2 * 0.8 / trials)
        assert rate <= 0.25


class TestInversion:
    def test_six_point_nine_percent(self):
        target = positive_accuracy_bounds(2, 0.01).upper
        assert max_rate_for_target(2, target).t == pytest.approx(0.01, rel=1e-12)
        assert max_rate_for_target(2, 0.069).t == pytest.approx(0.01, abs=1e-4)

    def test_eps_zero(self):
        assert max_rate_for_target(0, 0.25).t == pytest.approx(0.25, abs=1e-15)

    def test_seventy_three(self):
        assert max_rate_for_target(1, 0.7311).t == pytest.approx(0.5, abs=1e-4)
        assert max_rate_for_target(1, 0.7310585786300049).t == pytest.approx(0.5, abs=1e-6)

    @pytest.mark.parametrize("target", [0.0, 1.0, -0.5, 1.5])
    def test_rejects(self, target):
        with pytest.raises(ValueError):
            max_rate_for_target(1, target)

    @given(st.floats(min_value=0, max_value=10), st.floats(min_value=0.01, max_value=0.99))
    def test_round_trip_tight(self, eps, target):
        t = max_rate_for_target(eps, target).t
        assert positive_accuracy_bounds(eps, t).upper <= target
        assert abs(positive_accuracy_bounds(eps, t).upper - target) <= 1e-12
        if t + 1e-6 <= 1:
            assert positive_accuracy_bounds(eps, t + 1e-6).upper > target


class TestPlan:
    def test_reported_case(self):
        p = plan(2, SubsampleRate(0.01), 10**6)
        assert p.certified_upper == pytest.approx(0.0695, abs=1e-4)
        assert p.expected_size == pytest.approx(10**4, rel=1e-15)

    def test_no_subsampling(self):
        # without sub-sampling the prior cap is 1, so nothing is certified
        p = plan(1, SubsampleRate(1.0), 100)
        assert p.certified_upper == 1.0
        assert p.expected_size == 100

    def test_half_rate(self):
        p = plan(1, SubsampleRate(0.5), 100)
        assert p.certified_upper == pytest.approx(0.7311, abs=1e-4)
        assert p.expected_size == 50

    def test_eps_zero(self):
        p = plan(0, SubsampleRate(0.2), 50)
        assert p.certified_upper == 0.2
        assert p.expected_size == 10

    @given(st.integers(min_value=0, max_value=10**9), st.floats(min_value=1e-6, max_value=1.0))
    def test_expected_size_linear(self, n, t):
        assert plan(1, SubsampleRate(t), n).expected_size == n * t

    def test_record(self):
        rec = plan(2, SubsampleRate(0.01), 1000).to_record()
        assert rec == {"rate": 0.01, "eps": 2.0, "certified_upper": rec["certified_upper"],
                       "expected_size": 10.0, "original_size": 1000}

    def test_rejects_size(self):
        with pytest.raises(ValueError):
            plan(1, SubsampleRate(0.5), -3)
