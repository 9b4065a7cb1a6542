import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvspec import timemap
from curvspec.errors import DomainViolation, InvalidInput, NoSolution
from curvspec.timemap import (Kind, Regime, compute_B, lambda_of_xi,
                              solve_amplitude, time_map, time_map_derivative_fd,
                              time_map_derivative_xi, time_map_raw)

PI2 = math.pi ** 2
B_ORACLE = 0.25 * math.gamma(0.75) * math.gamma(0.5) / math.gamma(1.25)

# Frozen from 30-digit mpmath evaluations of the unsimplified integrals
# (mpmath.quad / mpmath.findroot / mpmath.diff), independent of this package.
J_MINK_2PI2_035 = 0.491129950845196759
XI_EUCL_LAM6 = 0.422008775597591004
XI_MINK_2PI2 = 0.362779661314034412
DJ_MINK_2PI2_02 = 0.468259124980894953


class TestRegime:
    def test_kind_follows_sign(self):
        assert Regime(2.0).kind is Kind.EUCLIDEAN
        assert Regime(-0.1).kind is Kind.MINKOWSKI

    @pytest.mark.parametrize("bad", [0.0, math.nan, math.inf])
    def test_rejects_degenerate_kappa(self, bad):
        with pytest.raises(InvalidInput):
            Regime(bad)


class TestConstantB:
    def test_matches_gamma_closed_form(self):
        assert abs(compute_B() - B_ORACLE) < 1e-12

    def test_eight_b_squared(self):
        assert abs(8 * compute_B() ** 2 - 2.8710800441845199) < 1e-12

    def test_cached(self):
        assert compute_B() is compute_B()


class TestTimeMap:
    def test_small_amplitude_minkowski(self):
        assert abs(time_map(-1.0, PI2, 1e-5).value - 0.5) < 1e-6

    def test_euclidean_boundary_identity_at_8B2(self):
        lam = 8 * compute_B() ** 2
        xi = (1 - 1e-8) * math.sqrt(2 / lam)
        assert abs(time_map(1.0, lam, xi).value - 0.5) < 1e-6

    @pytest.mark.parametrize("lam", [4.0, 6.0, 9.0])
    def test_euclidean_boundary_identity(self, lam):
        xi = (1 - 1e-8) * math.sqrt(2 / lam)
        expect = compute_B() * math.sqrt(2 / lam)
        assert abs(time_map(1.0, lam, xi).value - expect) <= 1e-4
        assert expect == timemap.euclidean_boundary_value(lam)

    def test_two_routes_agree(self):
        a = time_map(-1.0, 2 * PI2, 0.35).value
        b = time_map_raw(-1.0, 2 * PI2, 0.35).value
        assert abs(a - b) < 1e-10
        assert abs(a - J_MINK_2PI2_035) < 1e-12

    def test_euclidean_above_pi2_stays_below_half(self):
        lam = 11.0
        xs = np.linspace(1e-3, 1 - 1e-8, 200) * math.sqrt(2 / lam)
        assert max(time_map(1.0, lam, x).value for x in xs) < 0.5

    def test_domain_errors(self):
        with pytest.raises(DomainViolation):
            time_map(1.0, 6.0, math.sqrt(2 / 6.0))
        with pytest.raises(InvalidInput):
            time_map(1.0, -1.0, 0.1)
        with pytest.raises(InvalidInput):
            time_map(-1.0, 1.0, 0.0)

    def test_small_amplitude_gap_is_quadratic(self):
        lam = 2 * PI2
        base = (math.pi / 2) / math.sqrt(lam)
        gaps = [abs(time_map(-1.0, lam, xi).value - base) for xi in (0.04, 0.02, 0.01)]
        for g1, g2 in zip(gaps, gaps[1:]):
            assert 3.8 < g1 / g2 < 4.2

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.5, 200.0), st.floats(0.5, 200.0), st.floats(0.01, 0.9),
           st.sampled_from([-4.0, -1.0, 1.0, 4.0]))
    def test_decreasing_in_lambda(self, l1, l2, frac, kappa):
        if abs(l1 - l2) < 1e-3:
            return
        lo, hi = sorted((l1, l2))
        xi = frac * (Regime(kappa).xi_max(hi) if kappa > 0 else 0.5)
        assert time_map(kappa, lo, xi).value > time_map(kappa, hi, xi).value

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1.0, 300.0), st.floats(0.001, 1.0), st.floats(0.001, 1.0))
    def test_minkowski_increasing_in_xi(self, lam, a, b):
        if abs(a - b) < 1e-4:
            return
        lo, hi = sorted((a, b))
        assert time_map(-1.0, lam, lo).value < time_map(-1.0, lam, hi).value


class TestDerivative:
    def test_positive(self):
        assert time_map_derivative_xi(-1.0, 2 * PI2, 0.2) > 0

    def test_rederived_form_matches_finite_difference(self):
        fd = time_map_derivative_fd(-1.0, 2 * PI2, 0.2)
        rd = time_map_derivative_xi(-1.0, 2 * PI2, 0.2, form="rederived")
        assert abs(fd - DJ_MINK_2PI2_02) < 1e-8
        assert abs(rd - DJ_MINK_2PI2_02) < 1e-12

    def test_printed_form_has_systematic_mismatch(self):
        # The printed form carries (1 - alpha^2)^{+3/2}; its value is
        # positive but far from the true derivative.
        pr = time_map_derivative_xi(-1.0, 2 * PI2, 0.2, form="printed")
        assert 0 < pr < 0.1 * DJ_MINK_2PI2_02

    def test_vanishes_as_xi_to_zero(self):
        vals = [time_map_derivative_xi(-1.0, 2 * PI2, xi, form="rederived")
                for xi in (0.04, 0.02, 0.01)]
        assert all(v > 0 for v in vals)
        # dJ/dxi = O(xi) when J - J(0) = O(xi^2)
        assert 1.9 < vals[0] / vals[1] < 2.1
        assert 1.9 < vals[1] / vals[2] < 2.1
        fd = time_map_derivative_fd(-1.0, 2 * PI2, 0.01)
        assert abs(fd - vals[2]) < 1e-7

    def test_euclidean_rejected(self):
        with pytest.raises(DomainViolation):
            time_map_derivative_xi(1.0, 6.0, 0.1)

    def test_unknown_form(self):
        with pytest.raises(InvalidInput):
            time_map_derivative_xi(-1.0, 6.0, 0.1, form="other")


class TestSolveAmplitude:
    def test_minkowski_below_pi2_has_no_solution(self):
        with pytest.raises(NoSolution) as info:
            solve_amplitude(-1.0, 9.0)
        assert info.value.diagnostic["sign_at_xi_min"] == 1

    def test_euclidean_below_8B2_has_no_solution(self):
        with pytest.raises(NoSolution):
            solve_amplitude(1.0, 2.0)

    def test_euclidean_lambda_6(self):
        xi = solve_amplitude(1.0, 6.0)
        assert 0 < xi < math.sqrt(2 / 6)
        assert abs(time_map(1.0, 6.0, xi).value - 0.5) <= 1e-10
        assert abs(xi - XI_EUCL_LAM6) < 1e-10

    def test_minkowski_2pi2(self):
        xi = solve_amplitude(-1.0, 2 * PI2)
        assert 0 < xi < 0.5
        assert abs(xi - XI_MINK_2PI2) < 1e-10

    def test_bisection_oracle_unique_sign_change(self):
        xs = np.linspace(1e-4, 1 - 1e-8, 400) * math.sqrt(2 / 6.0)
        vals = np.array([time_map(1.0, 6.0, x).value - 0.5 for x in xs])
        changes = np.nonzero(np.diff(np.sign(vals)))[0]
        assert len(changes) == 1
        xi = solve_amplitude(1.0, 6.0)
        assert xs[changes[0]] <= xi <= xs[changes[0] + 1]


class TestLambdaOfXi:
    def test_minkowski_small_amplitude_limit(self):
        assert abs(lambda_of_xi(-1.0, 1e-4) - PI2) < 1e-3

    def test_minkowski_strictly_increasing(self):
        lams = [lambda_of_xi(-1.0, xi) for xi in np.arange(0.05, 0.451, 0.05)]
        assert all(a < b for a, b in zip(lams, lams[1:]))
        assert all(lam > PI2 for lam in lams)

    def test_euclidean_singular_limit(self):
        B = compute_B()
        lam = lambda_of_xi(1.0, (1 - 1e-5) / (2 * B))
        assert abs(lam - 8 * B * B) < 1e-3

    def test_euclidean_beyond_amplitude_limit(self):
        with pytest.raises(NoSolution):
            lambda_of_xi(1.0, 1.01 / (2 * compute_B()))

    def test_budget(self):
        with pytest.raises(NoSolution):
            lambda_of_xi(-1.0, 0.3, lam_budget=10.0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.05, 0.45), st.sampled_from([-1.0, -4.0, 1.0, 0.5]))
    def test_inverse_of_solve_amplitude(self, frac, kappa):
        if kappa > 0:
            xi = frac * 1.6 / (2 * compute_B() * math.sqrt(kappa))
        else:
            xi = frac / math.sqrt(-kappa)
        lam = lambda_of_xi(kappa, xi)
        assert abs(time_map(kappa, lam, xi).value - 0.5) <= 1e-10
        assert abs(solve_amplitude(kappa, lam) - xi) <= 1e-8
