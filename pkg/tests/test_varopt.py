import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublehill.varopt import (
    argmax_tau,
    cauchy_schwarz_ratio,
    region_ii_variance,
    v_n,
    v_n_closed_boundary,
    v_n_closed_optimal,
)
from doublehill.weights import UnsupportedRegimeError


class TestVn:
    def test_hill(self):
        assert v_n(1, 1, 100, 1.0) == pytest.approx(10, rel=1e-10)

    def test_tau_s_two(self):
        assert v_n(2, 2, 100, 1.0) == pytest.approx(40 / math.sqrt(20), rel=1e-12)
        assert 40 / math.sqrt(20) == pytest.approx(8.9443, abs=1e-4)

    @given(st.floats(1, 4), st.floats(0, 3), st.integers(2, 500), st.floats(0.1, 5))
    @settings(max_examples=40, deadline=None)
    def test_gamma_scaling(self, s, dt, k, g):
        tau = s - 0.5 + dt
        assert v_n(tau, s, k, 2 * g) == pytest.approx(v_n(tau, s, k, g) / 2, rel=1e-14)

    def test_below_zone(self):
        with pytest.raises(UnsupportedRegimeError):
            v_n(1.4, 2, 100, 1.0)
        with pytest.raises(ValueError):
            v_n(2, 2, 100, 0.0)


class TestClosedForms:
    def test_optimal_hill(self):
        assert v_n_closed_optimal(1, 100, 1.0) == pytest.approx(10, rel=1e-14)

    @pytest.mark.parametrize("tau", [1, 2, 3, 4.5])
    def test_optimal_exact(self, tau):
        # a_n = Gamma(tau+1) k and sigma_n = sqrt(k) exactly at s = tau
        ratio = v_n(tau, tau, 10**4, 1.0) / v_n_closed_optimal(tau, 10**4, 1.0)
        assert 0.999 <= ratio <= 1.001
        assert ratio == pytest.approx(1, rel=1e-10)

    def test_boundary(self):
        ratio = v_n(0.5, 1, 10**4, 1.0) / v_n_closed_boundary(1, 10**4, 1.0)
        assert 0.9 <= ratio <= 1.1

    def test_boundary_ratio_improves(self):
        gaps = [abs(v_n(1.5, 2, k, 1.0) / v_n_closed_boundary(2, k, 1.0) - 1) for k in (10**2, 10**4, 10**6)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_hill_best_coefficient(self):
        taus = np.arange(1, 5.0001, 0.05)
        coef = [v_n_closed_optimal(t, 1, 1.0) for t in taus]
        assert int(np.argmax(coef)) == 0

    def test_region_ii_printed(self):
        # Gamma(5) - Gamma(3)^2 = 20
        assert region_ii_variance(1.5, 2, 1.0) == pytest.approx(20 / (2 * 0.5))


class TestArgmax:
    def test_s1(self):
        prof = argmax_tau(1, 1000, 1.0, grid=(0.5, 3, 0.01))
        assert prof.argmax_tau == pytest.approx(1, abs=1e-4)
        assert prof.v_max == pytest.approx(v_n(1, 1, 1000, 1.0), rel=1e-12)

    @pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
    def test_argmax_is_s(self, s):
        prof = argmax_tau(s, 1000, 1.0)
        assert prof.argmax_tau == pytest.approx(s, abs=1e-3)

    def test_profile_consistent(self):
        prof = argmax_tau(2, 500, 1.3, grid=(1.5, 4, 0.05))
        assert prof.tau_grid[0] > 1.5 and prof.tau_grid[-1] <= 4
        for t, v in zip(prof.tau_grid[::7], prof.v_values[::7]):
            assert v == v_n(t, 2, 500, 1.3)
        assert prof.v_max >= prof.v_values.max()

    @pytest.mark.parametrize("s", [1, 2.5, 4])
    def test_unimodal_on_grid(self, s):
        prof = argmax_tau(s, 1000, 1.0, grid=(s - 0.5, s + 3, 0.02))
        i = int(np.argmax(prof.v_values))
        left, right = prof.v_values[: i + 1], prof.v_values[i:]
        assert np.all(np.diff(left) > 0) and np.all(np.diff(right) < 0)

    @pytest.mark.parametrize("s,k", [(1, 50), (2, 1000), (3.5, 300), (5, 2000)])
    def test_global_dominance(self, s, k):
        best = v_n(s, s, k, 1.0)
        for tau in np.arange(s - 0.5, s + 10, 0.05):
            assert v_n(tau, s, k, 1.0) <= best * (1 + 1e-14)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            argmax_tau(1, 100, 1.0, grid=(0.5, 3, 0))
        with pytest.raises(ValueError):
            argmax_tau(1, 100, 1.0, grid=(12, 13, 0.1))


class TestCauchySchwarz:
    def test_equality_at_s(self):
        assert cauchy_schwarz_ratio(2, 2, 1000) == pytest.approx(1, abs=1e-15)

    @pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
    def test_strict_elsewhere(self, s):
        for tau in np.arange(s - 0.5, s + 3.0001, 0.05):
            r = cauchy_schwarz_ratio(tau, s, 1000)
            if abs(tau - s) < 1e-9:
                assert r == pytest.approx(1, abs=1e-12)
            else:
                assert r < 1 - 1e-6

    @given(st.floats(0.5, 4), st.floats(-0.5, 3), st.integers(2, 2000))
    @settings(max_examples=40)
    def test_bounded_by_one(self, s, dt, k):
        assert cauchy_schwarz_ratio(s + dt, s, k) <= 1 + 1e-12
