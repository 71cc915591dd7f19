import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from riffle.cutoff import (
    cutoff_report,
    cutoff_shape,
    exact_log_scaled_class_prob,
    gaussian_row_deviation,
    hyp_check,
    lindeberg_value,
    log_moments,
    log_scaled_class_prob_expansion,
    nearest_step,
    second_eigenvalue,
    step_gap,
    truncation_report,
    tv_normal_approximation,
    uniform_crossing_asymptotic,
    uniform_crossing_exact,
)
from riffle.combinatorics import eulerian_row, factorial
from riffle.laws import PackDistribution, inverse_square_pack, m_shuffle_law

MIX23 = PackDistribution.from_pairs({2: Fraction(1, 2), 3: Fraction(1, 2)})
DELTA2 = PackDistribution.delta(2)


def normal_mass(a):
    # Independent quadrature oracle for the standard-normal mass of [-a, a].
    value, _ = quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), -a, a)
    return value


class TestCutoffShape:
    def test_endpoints(self):
        assert cutoff_shape(0.0) == 0.0
        assert cutoff_shape(math.inf) == 1.0

    def test_unit_interval_mass(self):
        x = 4 * math.sqrt(3)
        assert abs(cutoff_shape(x) - normal_mass(1.0)) < 1e-12
        assert abs(cutoff_shape(x) - 0.682689492137086) < 1e-12

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 3.0, 10.0, 40.0])
    def test_against_quadrature(self, x):
        assert abs(cutoff_shape(x) - normal_mass(x / (4 * math.sqrt(3)))) < 1e-12

    def test_monotone(self):
        xs = [i / 10 for i in range(0, 200)]
        vals = [cutoff_shape(x) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            cutoff_shape(-0.1)


class TestLogMoments:
    def test_point_mass(self):
        mu, sigma = log_moments(PackDistribution.delta(7))
        assert mu == math.log(7) and sigma == 0.0

    def test_two_point_equal_weights(self):
        mu, sigma = log_moments(MIX23)
        assert abs(mu - math.log(math.sqrt(6))) < 1e-15
        assert abs(sigma - (math.log(3) - math.log(2)) / 2) < 1e-15

    def test_square_spread_family(self):
        # Pack counts m and m*k^2 with equal weights: mean log(m*k), sd log k.
        m, k = 2, 3
        p = PackDistribution.from_pairs({m: Fraction(1, 2), m * k * k: Fraction(1, 2)})
        mu, sigma = log_moments(p)
        assert abs(mu - math.log(m * k)) < 1e-14
        assert abs(sigma - math.log(k)) < 1e-14

    def test_delta1_flags_no_mixing(self):
        mu, sigma = log_moments(PackDistribution.delta(1))
        assert mu == 0.0 and sigma == 0.0


class TestSecondEigenvalue:
    def test_mix23(self):
        assert second_eigenvalue(MIX23) == (Fraction(5, 12), Fraction(12, 7))

    def test_delta2(self):
        beta, relax = second_eigenvalue(DELTA2)
        assert beta == Fraction(1, 2) and relax == 2

    def test_delta1_infinite_relaxation(self):
        beta, relax = second_eigenvalue(PackDistribution.delta(1))
        assert beta == 1 and relax is None

    @pytest.mark.parametrize("m", range(2, 21))
    def test_point_mass_relaxation_exact(self, m):
        beta, relax = second_eigenvalue(PackDistribution.delta(m))
        assert beta == Fraction(1, m)
        assert relax == Fraction(m, m - 1)


class TestLindeberg:
    def test_vanishes_once_threshold_clears_support(self):
        # Bounded support: once eps*log(n)/mu exceeds max xi^2 the value is 0.
        assert lindeberg_value(MIX23, 10**9, 1.0) == 0.0

    def test_huge_eps_gives_zero(self):
        assert lindeberg_value(MIX23, 10, 1e9) == 0.0

    def test_nonincreasing_in_eps(self):
        p = inverse_square_pack(10**5)
        values = [lindeberg_value(p, 10**5, eps) for eps in (0.25, 0.5, 1.0, 2.0, 4.0)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            lindeberg_value(DELTA2, 100, 1.0)


class TestTruncationReport:
    def test_inactive_truncation_recovers_plain_moments(self):
        p = MIX23
        mu, sigma = log_moments(p)
        rep = truncation_report(p, 52, a_n=math.log(3) + 1)
        assert rep.ey == mu
        assert abs(rep.ez2 - (sigma**2 + mu**2)) < 1e-15
        assert rep.t_n_truncated == 3 * math.log(52) / (2 * rep.ey)

    def test_active_truncation_shrinks_ey(self):
        p = inverse_square_pack(10**6)
        full = truncation_report(p, 10**6, a_n=math.log(10**6))
        cut = truncation_report(p, 10**6, a_n=0.5 * math.log(10**6))
        assert cut.ey < full.ey
        assert cut.ez2 < full.ez2

    def test_scaling_invariance_on_log_level(self):
        # Doubling a_n leaves EY unchanged once the level clears the support.
        for n in (10**4, 10**6):
            p = inverse_square_pack(n)
            a = math.log(n)
            r1 = truncation_report(p, n, a)
            r2 = truncation_report(p, n, 2 * a)
            assert abs(r1.ey / r2.ey - 1) < 1e-12

    def test_everything_above_level_rejected(self):
        with pytest.raises(ValueError):
            truncation_report(DELTA2, 100, a_n=0.1)


class TestHypCheck:
    def test_bounded_support_tail_vanishes(self):
        h1, h2 = hyp_check(MIX23, 10**6, eta=0.5)
        assert h2 == 0.0
        assert h1 == log_moments(MIX23).mu / math.log(10**6)

    def test_delta2_ratio(self):
        for n in (100, 10**4, 10**8):
            h1, _ = hyp_check(DELTA2, n, eta=1.0)
            assert abs(h1 - math.log(2) / math.log(n)) < 1e-15


class TestNearestStep:
    def test_examples(self):
        assert nearest_step(0.3) == 0.5 and step_gap(0.3) == 0.5
        assert nearest_step(1.5) == 2.0 and step_gap(1.5) == -0.5
        assert nearest_step(1.4) == 1.0 and abs(step_gap(1.4) - 0.4) < 1e-12

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            nearest_step(0.0)
        with pytest.raises(ValueError):
            step_gap(-1.0)

    @given(st.floats(min_value=0.5, max_value=1e6))
    def test_decomposition_property(self, t):
        k = nearest_step(t)
        d = step_gap(t)
        assert k == int(k) and k >= 1
        assert math.isclose(k + d, t, rel_tol=1e-12)
        assert -0.5 <= d < 0.5


class TestNormalApproximation:
    def test_c_equals_one(self):
        n = 100
        m = round(n**1.5)
        assert abs(tv_normal_approximation(n, m) - cutoff_shape(1.0)) < 1e-12

    def test_nonincreasing_in_m(self):
        vals = [tv_normal_approximation(64, m) for m in range(1, 4000, 37)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_nine_gsr_steps_of_52_cards(self):
        # m = 2^9 gives 1/c = 52^(3/2)/512 ~ 0.7324.
        assert tv_normal_approximation(52, 512) == cutoff_shape(52**1.5 / 512)
        assert abs(52**1.5 / 512 - 0.7324) < 1e-4

    def test_large_m_vanishes(self):
        assert tv_normal_approximation(32, 10**9) < 1e-6


class TestUniformCrossing:
    def test_small_case_direct_comparison(self):
        n, m = 6, 2
        law = m_shuffle_law(n, m)
        u = Fraction(1, factorial(n))
        r_star = max(r for r in range(1, n + 1) if law.prob(r) >= u)
        assert uniform_crossing_exact(n, m) == Fraction(2 * r_star - n, 2)

    def test_single_crossing_over_grid(self):
        # The per-arrangement probability crosses uniform exactly once.
        for n in range(2, 9):
            u = Fraction(1, factorial(n))
            for m in range(1, 31):
                law = m_shuffle_law(n, m)
                above = [law.prob(r) >= u for r in range(1, n + 1)]
                assert above[0]
                assert all(a or not b for a, b in zip(above, above[1:]))

    def test_large_m_crossing_near_middle(self):
        h = uniform_crossing_exact(10, 10**6)
        assert abs(float(h)) <= 1.0
        assert -1e-3 < uniform_crossing_asymptotic(10, 10**6) < 0

    def test_half_integer_for_odd_deck(self):
        h = uniform_crossing_exact(7, 3)
        assert h.denominator == 2


class TestExpansion:
    def test_floor_enforced(self):
        with pytest.raises(ValueError):
            log_scaled_class_prob_expansion(100, 10, 0.0, a=0.25)

    def test_matches_exact_at_center(self):
        n, m = 100, 2**11
        approx = log_scaled_class_prob_expansion(n, m, 0.0, a=0.25)
        exact = exact_log_scaled_class_prob(n, m, n // 2)
        assert abs(approx - exact) < 1e-5

    def test_residual_shrinks_with_n_at_fixed_c(self):
        devs = []
        for n in (52, 104, 208):
            m = math.ceil(1.0 * n**1.5)
            worst = max(
                abs(
                    log_scaled_class_prob_expansion(n, m, h, a=0.25)
                    - exact_log_scaled_class_prob(n, m, n // 2 + h)
                )
                for h in range(-5, 6)
            )
            devs.append(worst)
        assert devs[0] >= devs[1] >= devs[2]
        assert devs[0] < 1e-3


class TestGaussianRowDeviation:
    def test_small_rows_reasonable(self):
        dev20 = gaussian_row_deviation(eulerian_row(20))
        dev40 = gaussian_row_deviation(eulerian_row(40))
        assert 0 < dev40 < dev20 < 0.1


class TestCutoffReport:
    def test_gsr_deck_parameters(self):
        rep = cutoff_report(DELTA2, 52)
        assert abs(rep.t_n - 1.5 * math.log2(52)) < 1e-12
        assert rep.degenerate
        assert rep.b_n == 1 / math.log(2)
        assert rep.window_unit == 1.0
        assert rep.beta == Fraction(1, 2)

    def test_mixture_window_formula(self):
        n = 52
        rep = cutoff_report(MIX23, n)
        mu, sigma = log_moments(MIX23)
        expected = (1 / mu) * max(1.0, math.sqrt(sigma**2 * math.log(n) / mu))
        assert rep.b_n == expected
        assert rep.window_unit is None
        assert abs(rep.t_n - 3 * math.log(n) / (2 * mu)) < 1e-15

    def test_delta1_rejected(self):
        with pytest.raises(ValueError):
            cutoff_report(PackDistribution.delta(1), 52)

    def test_json_rendering(self):
        rep = cutoff_report(MIX23, 52)
        data = rep.to_json_dict()
        assert data["beta"] == {"num": "5", "den": "12"}
        assert data["relaxation"] == {"num": "12", "den": "7"}
        assert isinstance(data["mu"], str)
        assert float(data["t_n"]) == rep.t_n
