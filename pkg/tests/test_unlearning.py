import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from mibound.bounds import negative_accuracy_bounds
from mibound.unlearning import (
    CapacityResult,
    UnlearningPolicy,
    capacity_curve,
    deletion_capacity,
    group_request_check,
    l_of_c,
)


def mp_capacity(b, eps, n, c):
    with mp.workdps(50):
        r = mp.mpf(c) / n
        L = 1 / (1 + mp.e ** (-mp.mpf(eps)) * r / (1 - r))
        return float(L), float(mp.log(mp.mpf(b)) / mp.log(L))


class TestLOfC:
    def test_reference_point(self):
        L, _ = mp_capacity(0.8, 1, 10_000, 100)
        assert l_of_c(1, 100, 10_000) == pytest.approx(L, rel=1e-14)
        assert l_of_c(1, 100, 10_000) == pytest.approx(0.99630, abs=1e-5)

    def test_limits(self):
        assert l_of_c(50, 5000, 10_000) == pytest.approx(1.0, abs=1e-20)
        assert l_of_c(0, 5000, 10_000) == pytest.approx(0.5, abs=1e-15)

    @given(st.floats(min_value=0, max_value=20), st.floats(min_value=1e-3, max_value=1 - 1e-3))
    def test_equals_negative_interval_upper(self, eps, r):
        n = 10**6
        c = r * n
        assert abs(l_of_c(eps, c, n) - negative_accuracy_bounds(eps, c / n).upper) <= 1e-12

    def test_decreasing_in_c(self):
        cs = np.linspace(1, 9999, 500)
        assert np.all(np.diff([l_of_c(1, c, 10_000) for c in cs]) < 0)

    @pytest.mark.parametrize("c", [0, -1, 10_000, 20_000])
    def test_rejects(self, c):
        with pytest.raises(ValueError):
            l_of_c(1, c, 10_000)


class TestCapacity:
    def test_reference_capacity(self):
        res = deletion_capacity(UnlearningPolicy(0.8, 1, 10_000, 100))
        _, m = mp_capacity(0.8, 1, 10_000, 100)
        assert res.capacity == pytest.approx(60.16, abs=0.05)
        assert res.capacity == pytest.approx(m, rel=1e-12)
        assert res.whole_requests == 60

    def test_eps_zero(self):
        res = deletion_capacity(UnlearningPolicy(0.8, 0, 10_000, 5000))
        assert res.capacity == pytest.approx(math.log(0.8) / math.log(0.5), rel=1e-14)
        assert res.capacity == pytest.approx(0.3219, abs=1e-4)

    def test_b_near_one(self):
        res = deletion_capacity(UnlearningPolicy(1 - 1e-12, 1, 10_000, 100))
        assert res.capacity == pytest.approx(0.0, abs=1e-9)

    def test_unbounded_flag(self):
        assert CapacityResult(1.0, math.inf).whole_requests == math.inf

    def test_huge_eps_stays_finite(self):
        res = deletion_capacity(UnlearningPolicy(0.8, 50, 10_000, 5000))
        assert res.capacity > 1e20

    def test_monotone_in_eps(self):
        caps = [deletion_capacity(UnlearningPolicy(0.8, e, 10_000, 100)).capacity
                for e in np.linspace(0, 10, 101)]
        assert np.all(np.diff(caps) > 0)

    def test_divergence_small_c(self):
        small = deletion_capacity(UnlearningPolicy(0.8, 1, 10_000, 1)).capacity
        half = deletion_capacity(UnlearningPolicy(0.8, 1, 10_000, 5000)).capacity
        assert small > 1e3 * half

    @given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=0, max_value=5),
           st.floats(min_value=1, max_value=9999))
    def test_boundary_exactness(self, b, eps, c):
        res = deletion_capacity(UnlearningPolicy(b, eps, 10_000, c))
        m = math.floor(res.capacity)
        log_l = math.log(res.per_request_lower)
        assert m * log_l >= math.log(b) - 1e-12
        assert (m + 1) * log_l < math.log(b)

    @pytest.mark.parametrize("b", [0.0, 1.0, 1.2])
    def test_policy_rejects(self, b):
        with pytest.raises(ValueError):
            UnlearningPolicy(b, 1, 100, 10)


class TestGroupRequests:
    def test_capacity_boundary(self):
        # ln 0.8 / ln 0.996 = 55.67
        assert group_request_check([0.996] * 55, 0.8)
        assert not group_request_check([0.996] * 56, 0.8)
        assert not group_request_check([0.996] * 60, 0.8)
        assert not group_request_check([0.996] * 95, 0.8)

    def test_reference_L(self):
        L = l_of_c(1, 100, 10_000)
        assert group_request_check([L] * 60, 0.8)
        assert not group_request_check([L] * 61, 0.8)

    def test_trivial(self):
        assert group_request_check([], 0.99)
        assert group_request_check([1.0, 1.0], 0.999)

    def test_heterogeneous(self):
        lowers = [0.9, 0.95, 0.99]
        assert group_request_check(lowers, 0.9 * 0.95 * 0.99 - 1e-12)
        assert not group_request_check(lowers, 0.9 * 0.95 * 0.99 + 1e-9)

    @pytest.mark.parametrize("bad", [[0.0], [1.1], [-0.5]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            group_request_check(bad, 0.5)


class TestCurve:
    def test_default_setting(self):
        grid = np.linspace(1, 9999, 500)
        cap, lin = capacity_curve(1, 10_000, 0.8, grid)
        assert np.all(np.diff(cap.ys) < 0)
        assert cap.ys[0] > 1000 * cap.ys[-1]
        assert lin.ys == pytest.approx(list(grid))

    def test_slope(self):
        _, lin = capacity_curve(1, 10_000, 0.8, [1, 2, 3], linear_slope=0.5)
        assert lin.ys == [0.5, 1.0, 1.5]

    def test_rejects_grid(self):
        with pytest.raises(ValueError):
            capacity_curve(1, 100, 0.8, [0, 50])
