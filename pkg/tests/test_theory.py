import math
from fractions import Fraction

import numpy as np
import pytest

from holme_kim.core import HkParams
from holme_kim.oracle import exact_delta_degree_distribution, reachable_states
from holme_kim.theory import (
    RecurrenceSpec,
    cherry_law_constant,
    constant_recurrence_limit,
    expected_degree_factor,
    log_phi,
    log_psi,
    phi,
    power_law_limit,
    power_law_limit_exact,
    power_law_tail,
    psi,
    solve_recurrence,
)


def phi_product(t):
    return math.prod(Fraction(2 * s + 1, 2 * s) for s in range(1, t))


def psi_product(d, t):
    return math.prod(Fraction(2 * s - d, 2 * s) for s in range(d, t))


class TestPhi:
    def test_base(self):
        assert phi(1) == 1.0
        assert log_phi(1) == 0.0

    def test_three(self):
        assert phi(3) == pytest.approx(1.875, abs=1e-15)

    @pytest.mark.parametrize("t", [2, 5, 17, 100, 1000])
    def test_against_product(self, t):
        assert phi(t) == pytest.approx(float(phi_product(t)), rel=1e-14)

    def test_sqrt_scaling(self):
        assert abs(phi(10**6) / math.sqrt(10**6) - phi(10**7) / math.sqrt(10**7)) < 1e-3
        assert phi(10**7) / math.sqrt(10**7) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-6)

    @pytest.mark.parametrize("t", [1, 2, 10, 1234, 10**6, 10**9])
    def test_ratio(self, t):
        r = phi(t + 1) / phi(t)
        assert abs(r - expected_degree_factor(t)) <= 4 * math.ulp(r)

    def test_telescopes(self):
        j, t = 7, 60
        prod = math.prod(expected_degree_factor(s) for s in range(j, t))
        assert prod == pytest.approx(phi(t) / phi(j), rel=1e-13)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            phi(0)

    def test_huge_t_finite(self):
        assert math.isfinite(phi(10**9))
        assert math.isfinite(log_phi(10**12))


class TestPsi:
    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_base(self, d):
        assert psi(d, d) == pytest.approx(1.0, abs=1e-15)

    def test_example(self):
        assert psi(1, 3) == pytest.approx(0.375, abs=1e-15)

    @pytest.mark.parametrize("d,t", [(1, 50), (2, 9), (3, 200), (10, 400), (40, 41)])
    def test_against_product(self, d, t):
        assert psi(d, t) == pytest.approx(float(psi_product(d, t)), rel=1e-13)

    def test_decreasing(self):
        vals = [psi(4, t) for t in range(4, 80)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_rejects_t_below_d(self):
        with pytest.raises(ValueError):
            psi(5, 4)

    def test_large_t(self):
        assert log_psi(100, 10**9) < 0
        assert psi(2, 10**9) > 0


class TestPowerLaw:
    def test_m2_values(self):
        assert power_law_limit_exact(2, 2) == Fraction(1, 2)
        assert power_law_limit_exact(2, 3) == Fraction(1, 5)

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_starts_at_two_over_m_plus_two(self, m):
        assert power_law_limit_exact(m, m) == Fraction(2, m + 2)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_recursion_exact(self, m):
        for d in range(m + 1, 200):
            assert power_law_limit_exact(m, d) == power_law_limit_exact(m, d - 1) * Fraction(d - 1, d + 2)

    @pytest.mark.parametrize("m", [2, 3, 7])
    def test_fixed_point_float(self, m):
        for d in range(m + 1, 1001):
            lhs = power_law_limit(m, d) * (1 + d / 2)
            rhs = power_law_limit(m, d - 1) * (d - 1) / 2
            assert abs(lhs - rhs) < 1e-12

    @pytest.mark.parametrize("m", [2, 3])
    def test_sums_to_one(self, m):
        d_hi = 10**4
        head = math.fsum(power_law_limit(m, d) for d in range(m, d_hi + 1))
        assert abs(head + float(power_law_tail(m, d_hi)) - 1) < 1e-9
        assert sum((power_law_limit_exact(m, d) for d in range(m, 60)), Fraction(0)) \
            + power_law_tail(m, 59) == 1

    def test_float_matches_exact(self):
        for d in (2, 3, 10, 999):
            assert power_law_limit(2, d) == pytest.approx(float(power_law_limit_exact(2, d)), rel=1e-15)

    def test_rejects_small_degree(self):
        with pytest.raises(ValueError):
            power_law_limit(3, 2)
        with pytest.raises(ValueError):
            power_law_limit_exact(1, 1)

    def test_cubic_tail(self):
        # beta = 3: D_d d^3 -> 2m(m+1)
        assert power_law_limit(2, 10**5) * 1e15 == pytest.approx(12, rel=1e-4)


class TestCherryConstant:
    def test_values(self):
        assert cherry_law_constant(2) == 3
        assert cherry_law_constant(3) == 6

    @pytest.mark.parametrize("m", range(2, 9))
    def test_half_of_squared_degree_constant(self, m):
        assert cherry_law_constant(m) == Fraction(m * m + m, 2) == math.comb(m + 1, 2)

    def test_rejects_m1(self):
        with pytest.raises(ValueError):
            cherry_law_constant(1)


class TestRecurrence:
    def test_b1_c1(self):
        traj, ratio = solve_recurrence(RecurrenceSpec(lambda t: 1.0, lambda t: 1.0), 10**5)
        assert abs(ratio - 0.5) < 1e-3
        assert len(traj) == 10**5
        assert constant_recurrence_limit(1, 1) == 0.5

    def test_start_at_zero_is_exact(self):
        # from a_1 = 0 the b = c = 1 iteration gives exactly a_t = t/2 for t >= 2
        traj, _ = solve_recurrence(RecurrenceSpec(lambda t: 1.0, lambda t: 1.0), 100)
        assert list(traj[1:]) == [t / 2 for t in range(2, 101)]

    @pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
    def test_error_is_order_one_over_T(self, b):
        spec = RecurrenceSpec(lambda t: b, lambda t: 1.0, t_init=10)
        limit = constant_recurrence_limit(b, 1.0)
        scaled = [T * abs(solve_recurrence(spec, T)[1] - limit) for T in (10**3, 10**4)]
        assert scaled[0] > 0
        assert scaled[1] <= scaled[0]

    @pytest.mark.parametrize("b,c", [(0.5, 2.0), (3.0, 1.0), (1.5, 0.25)])
    def test_other_constants(self, b, c):
        _, ratio = solve_recurrence(RecurrenceSpec(lambda t: b, lambda t: c, t_init=5), 2 * 10**4)
        assert ratio == pytest.approx(c / (1 + b), rel=2e-3)

    def test_zero_forcing(self):
        _, ratio = solve_recurrence(RecurrenceSpec(lambda t: 1.0, lambda t: 0.0, a_init=7.0), 10**4)
        assert abs(ratio) < 1e-6

    @pytest.mark.parametrize("m,d", [(2, 3), (2, 4), (3, 5)])
    def test_degree_law_step(self, m, d):
        prev = power_law_limit(m, d - 1)
        spec = RecurrenceSpec(lambda t: d / 2 + d * d / t, lambda t: prev * (d - 1) / 2, t_init=d * d)
        _, ratio = solve_recurrence(spec, 10**5)
        assert ratio == pytest.approx(prev * (d - 1) / (d + 2), rel=1e-2)
        assert ratio == pytest.approx(power_law_limit(m, d), rel=1e-2)

    def test_rejects_short_horizon(self):
        with pytest.raises(ValueError):
            solve_recurrence(RecurrenceSpec(lambda t: 1.0, lambda t: 1.0, t_init=10), 10)

    def test_rejects_divergence(self):
        with pytest.raises(ArithmeticError):
            solve_recurrence(RecurrenceSpec(lambda t: -1e300 * t, lambda t: 0.0, a_init=1.0), 10)

    def test_trajectory_is_array(self):
        traj, _ = solve_recurrence(RecurrenceSpec(lambda t: 1.0, lambda t: 1.0, a_init=2.0, t_init=3), 10)
        assert isinstance(traj, np.ndarray)
        assert traj[0] == 2.0 and traj.shape == (8,)


class TestExpectedDegree:
    def test_factor(self):
        assert expected_degree_factor(1) == 1.5
        assert expected_degree_factor(10**12) == pytest.approx(1.0)

    @pytest.mark.parametrize("m,p", [(2, Fraction(1, 2)), (3, Fraction(1)), (2, Fraction(0))])
    def test_one_step_mean_is_exact(self, m, p):
        params = HkParams(m, float(p))
        for _, g in reachable_states(params, 2, p):
            t = g.vertex_count
            for v in g.vertices():
                dist = exact_delta_degree_distribution(g, params, v, p)
                mean = sum(k * q for k, q in dist.mass.items())
                assert mean == Fraction(g.degree(v), 2 * t)
                assert g.degree(v) + mean == g.degree(v) * Fraction(2 * t + 1, 2 * t)
