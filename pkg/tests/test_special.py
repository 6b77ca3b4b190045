import itertools
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from doublehill.special import (
    PowerSumBound,
    closed_I,
    closed_J,
    gamma_fn,
    power_sum_bounds,
    quad_I,
    quad_J,
)


def _gamma_by_quadrature(x):
    return integrate.quad(lambda t: t ** (x - 1) * math.exp(-t), 0, math.inf, epsrel=1e-13)[0]


class TestGamma:
    def test_integers(self):
        assert gamma_fn(1) == 1
        assert gamma_fn(4) == pytest.approx(6, rel=1e-15)
        for n in range(1, 20):
            assert gamma_fn(n) == pytest.approx(math.factorial(n - 1), rel=1e-14)

    def test_half_integer(self):
        # oracle: quadrature of x^1.5 e^-x
        expected = _gamma_by_quadrature(2.5)
        assert expected == pytest.approx(1.3293403882, abs=1e-10)
        assert gamma_fn(2.5) == pytest.approx(expected, rel=1e-10)
        assert gamma_fn(2.5) == pytest.approx(float(mpmath.gamma(2.5)), rel=1e-15)

    def test_relative_error_contract(self):
        mpmath.mp.dps = 30
        for x in [0.5 + 0.37 * i for i in range(133)]:
            ref = float(mpmath.gamma(x))
            assert abs(gamma_fn(x) - ref) / ref <= 1e-13

    @pytest.mark.parametrize("x", [0, -1, -0.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)


class TestClosedI:
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_order_one(self, a, b):
        assert closed_I(a, b, 1) == pytest.approx(a + b, rel=1e-12, abs=1e-12)

    def test_values(self):
        assert closed_I(0, 1, 3) == 6
        # 2!(1/2! + 1/1! + 1/0!) = 5
        assert closed_I(1, 1, 2) == 5
        assert closed_I(1, 1, 2) == pytest.approx(quad_I(1, 1, 2), abs=1e-9)

    def test_order_zero(self):
        assert closed_I(3.0, 7.0, 0) == 1.0

    @given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 8))
    def test_recursion(self, a, b, s):
        lhs = closed_I(a, b, s)
        rhs = a**s + s * b * closed_I(a, b, s - 1)
        scale = sum(abs(t) for t in (a**s, s * b * closed_I(a, b, s - 1)))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, scale)

    def test_grid_against_quadrature(self):
        for s in range(7):
            for a, b in itertools.product((0, 0.5, 1, 2), repeat=2):
                c = closed_I(a, b, s)
                assert abs(c - quad_I(a, b, s)) <= 1e-8 * max(1, abs(c))

    @pytest.mark.parametrize("s", [-1, 1.5, True])
    def test_rejects_non_integer(self, s):
        with pytest.raises(ValueError):
            closed_I(1, 1, s)


class TestClosedJ:
    def test_order_zero_is_I1(self):
        for a, b, c in itertools.product((0, 0.3, 2), repeat=3):
            assert closed_J(a, b, c, 0) == closed_I(a, b, 1)

    def test_pure_exponential(self):
        for s in range(8):
            assert closed_J(1, 0, 0, s) == pytest.approx(1.0, rel=1e-15)

    def test_hand_value(self):
        # int (1+x)^2 e^-x dx by quadrature
        oracle = integrate.quad(lambda x: (1 + x) ** 2 * math.exp(-x), 0, math.inf)[0]
        assert oracle == pytest.approx(5, abs=1e-10)
        assert closed_J(1, 1, 1, 1) == pytest.approx(oracle, abs=1e-10)

    @given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 3), st.integers(1, 6))
    @settings(max_examples=50)
    def test_by_parts_recursion(self, a, b, c, s):
        lhs = closed_J(a, b, c, s)
        rhs = a ** (s + 1) + b * closed_I(a, c, s) + c * s * closed_J(a, b, c, s - 1)
        assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)

    def test_grid_against_quadrature(self):
        for s in range(6):
            for a, b, c in itertools.product((0, 0.5, 1), repeat=3):
                v = closed_J(a, b, c, s)
                assert abs(v - quad_J(a, b, c, s)) <= 1e-8 * max(1, abs(v))


class TestQuadrature:
    def test_gamma_four(self):
        assert quad_I(0, 1, 3) == pytest.approx(6, abs=1e-9)

    def test_constant_integrand(self):
        assert quad_J(2, 0, 0, 5) == pytest.approx(64, abs=1e-7)

    def test_non_integer_order(self):
        assert quad_I(0, 1, 1.5) == pytest.approx(gamma_fn(2.5), rel=1e-10)

    @pytest.mark.parametrize("args", [(-1, 1, 2), (1, -1, 2), (1, 1, -1)])
    def test_domain_I(self, args):
        with pytest.raises(ValueError):
            quad_I(*args)

    def test_domain_J(self):
        with pytest.raises(ValueError):
            quad_J(1, 1, -0.5, 2)


class TestPowerSumBounds:
    def test_harmonic(self):
        exact = math.fsum(1 / h for h in range(1, 101))
        assert exact == pytest.approx(5.18738, abs=1e-5)
        bound = power_sum_bounds(1, 1, 101)
        assert bound.lower <= exact <= bound.upper
        assert bound.asymptotic_equivalent == pytest.approx(math.log(100))

    def test_basel(self):
        bound = power_sum_bounds(2, 1, 10**6)
        assert bound.lower <= math.pi**2 / 6 <= bound.upper + 1e-6

    def test_arithmetic_series(self):
        for k in (2, 3, 10, 1000):
            bound = power_sum_bounds(1, 1, k, negative=False)
            assert bound.lower <= k * (k - 1) / 2 <= bound.upper

    @given(
        st.floats(1, 4),
        st.integers(1, 50),
        st.integers(1, 3000),
    )
    @settings(max_examples=60, deadline=None)
    def test_bracket_decreasing(self, b, j, extra):
        k = j + extra
        exact = math.fsum(h**-b for h in range(j, k))
        bound = power_sum_bounds(b, j, k)
        assert bound.lower <= exact * (1 + 1e-12) and exact <= bound.upper * (1 + 1e-12)

    @given(st.floats(0.1, 3), st.integers(1, 50), st.integers(1, 3000))
    @settings(max_examples=60, deadline=None)
    def test_bracket_increasing(self, b, j, extra):
        k = j + extra
        exact = math.fsum(h**b for h in range(j, k))
        bound = power_sum_bounds(b, j, k, negative=False)
        assert bound.lower <= exact * (1 + 1e-12) and exact <= bound.upper * (1 + 1e-12)

    def test_exact_sum_large_k(self):
        k = 10**6
        exact = math.fsum(h**-1.5 for h in range(3, k))
        assert power_sum_bounds(1.5, 3, k).contains(exact)

    @pytest.mark.parametrize("b", [1, 2.5])
    def test_equivalent_ratio_tends_to_one(self, b):
        # the increasing-power equivalent is a ratio statement, not a bracket
        ratios = []
        for k in (10**2, 10**4, 10**6):
            bound = power_sum_bounds(b, 1, k, negative=False)
            ratios.append(bound.upper / bound.asymptotic_equivalent)
        assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)
        assert ratios[-1] == pytest.approx(1, rel=1e-4)

    def test_lower_le_upper(self):
        assert isinstance(power_sum_bounds(2, 3, 4), PowerSumBound)
        for b, j, k in [(1, 1, 2), (3, 5, 6), (1.2, 1, 10**5)]:
            bound = power_sum_bounds(b, j, k)
            assert bound.lower <= bound.upper

    @pytest.mark.parametrize("j,k", [(5, 5), (6, 5), (0, 5)])
    def test_domain(self, j, k):
        with pytest.raises(ValueError):
            power_sum_bounds(1, j, k)
