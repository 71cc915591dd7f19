import json
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riffle.combinatorics import binomial_big, factorial
from riffle.laws import (
    PackDistribution,
    ProductLaw,
    RisingSeqLaw,
    SizeGuardError,
    inverse_square_pack,
    law_after_k,
    law_from_json,
    law_to_json,
    m_shuffle_law,
    product_power,
    tail_set_gap,
    tv_to_uniform,
    window_set_gap,
)

MIX23 = PackDistribution.from_pairs({2: Fraction(1, 2), 3: Fraction(1, 2)})


class TestMShuffleLaw:
    def test_one_shuffle_is_identity(self):
        for n in (1, 3, 7):
            law = m_shuffle_law(n, 1)
            assert law.prob(1) == 1
            assert all(law.prob(r) == 0 for r in range(2, n + 1))

    def test_n2_m2(self):
        law = m_shuffle_law(2, 2)
        assert law.class_prob == (Fraction(3, 4), Fraction(1, 4))

    def test_power_of_two_matches_closed_form(self):
        n, k = 52, 3
        law = m_shuffle_law(n, 2**k)
        for r in (1, 2, 10, 52):
            assert law.prob(r) == Fraction(binomial_big(n + 2**k - r, n), 2 ** (k * n))

    def test_zero_beyond_m(self):
        law = m_shuffle_law(5, 3)
        assert law.prob(4) == 0 and law.prob(5) == 0

    def test_validation_rejects_bad_law(self):
        with pytest.raises(ValueError):
            RisingSeqLaw(2, (Fraction(1), Fraction(1)))  # mass 2
        with pytest.raises(ValueError):
            RisingSeqLaw(2, (Fraction(0), Fraction(1)))  # increasing in r

    @settings(deadline=None)
    @given(st.integers(1, 6), st.integers(1, 12))
    def test_law_invariants_property(self, n, m):
        law = m_shuffle_law(n, m)  # construction asserts normalization
        assert all(
            law.prob(r) >= law.prob(r + 1) for r in range(1, n)
        )


class TestProductPower:
    def test_point_mass_power(self):
        law = product_power(PackDistribution.delta(3), 4)
        assert law.atoms == {81: Fraction(1)}

    def test_k0_is_point_mass_at_one(self):
        assert product_power(MIX23, 0).atoms == {1: Fraction(1)}

    def test_k1_is_p_itself(self):
        assert product_power(MIX23, 1).atoms == {2: Fraction(1, 2), 3: Fraction(1, 2)}

    def test_mix_squared(self):
        law = product_power(MIX23, 2)
        assert law.atoms == {4: Fraction(1, 4), 6: Fraction(1, 2), 9: Fraction(1, 4)}

    def test_colliding_products_merge(self):
        p = PackDistribution.from_pairs(
            {2: Fraction(1, 3), 3: Fraction(1, 3), 6: Fraction(1, 3)}
        )
        law = product_power(p, 2)
        # 2*6 and 3*4 never collide here, but 6 = 2*3 = 3*2 and 12, 18 merge.
        assert law.atoms[6] == Fraction(2, 9)
        assert sum(law.atoms.values()) == 1

    def test_size_guard(self):
        p = PackDistribution.from_pairs(
            {2: Fraction(1, 4), 3: Fraction(1, 4), 5: Fraction(1, 4), 7: Fraction(1, 4)}
        )
        with pytest.raises(SizeGuardError):
            product_power(p, 10, max_atoms=50)

    def test_product_law_validates(self):
        with pytest.raises(ValueError):
            ProductLaw({2: Fraction(1, 2)})


class TestLawAfterK:
    def test_k0_identity(self):
        law = law_after_k(4, MIX23, 0)
        assert law.prob(1) == 1

    def test_delta2_k3_equals_single_8_shuffle(self):
        assert law_after_k(3, PackDistribution.delta(2), 3) == m_shuffle_law(3, 8)

    def test_mixture_expands_to_product_mixture(self):
        law = law_after_k(4, MIX23, 2)
        q4, q6, q9 = (m_shuffle_law(4, m) for m in (4, 6, 9))
        for r in range(1, 5):
            expected = (
                Fraction(1, 4) * q4.prob(r)
                + Fraction(1, 2) * q6.prob(r)
                + Fraction(1, 4) * q9.prob(r)
            )
            assert law.prob(r) == expected

    def test_parallel_map_bit_identical(self):
        ks = list(range(6))
        serial = [tv_to_uniform(law_after_k(5, MIX23, k)) for k in ks]
        with ThreadPoolExecutor(4) as pool:
            parallel = list(pool.map(lambda k: tv_to_uniform(law_after_k(5, MIX23, k)), ks))
        assert serial == parallel


class TestTvToUniform:
    def test_n2_m2(self):
        assert tv_to_uniform(m_shuffle_law(2, 2)) == Fraction(1, 4)

    def test_vanishes_monotonically_in_m(self):
        tvs = [tv_to_uniform(m_shuffle_law(5, m)) for m in range(5, 101)]
        assert all(b <= a for a, b in zip(tvs, tvs[1:]))
        assert float(tvs[-1]) < 0.02

    def test_identity_shuffle_tv(self):
        n = 4
        assert tv_to_uniform(m_shuffle_law(n, 1)) == 1 - Fraction(1, factorial(n))

    def test_single_gsr_step_of_52_cards(self):
        # Only the r = 1 and r = 2 classes carry mass after one 2-shuffle, so
        # the distance has the closed form 1 - (2^52 - 52)/52!.
        assert tv_to_uniform(m_shuffle_law(52, 2)) == 1 - Fraction(2**52 - 52, factorial(52))


class TestTailSetGap:
    def test_whole_space_gap_zero(self):
        assert tail_set_gap(5, 3, 1) == 0

    def test_example_nonnegative(self):
        assert tail_set_gap(4, 2, 3) >= 0

    def test_identity_shuffle_gap(self):
        # A 1-shuffle has no mass on r >= 2, so the gap is the uniform mass.
        assert tail_set_gap(4, 1, 2) == Fraction(23, 24)


class TestWindowSetGap:
    def test_k_equals_m_matches_direct_sum(self):
        n, m = 10, 40
        gap = window_set_gap(n, m, m)
        assert not gap.empty
        assert gap.gap >= 0

    def test_empty_window_flagged(self):
        gap = window_set_gap(2, 100, 1)
        assert gap.empty and gap.gap == 0

    def test_matches_normal_shape_at_calibrated_tolerance(self):
        # Recorded calibration: for n = 52, m = 2^9 the window gap sits within
        # 0.1 of the limiting shape value (observed gap ~0.035, on the scale
        # of n^(-1/4) ~ 0.37).
        from riffle.cutoff import cutoff_shape

        n, m = 52, 2**9
        gap = window_set_gap(n, m, m)
        assert not gap.empty
        c = m * n**-1.5
        assert abs(float(gap.gap) - cutoff_shape(1 / c)) <= 0.1

    def test_scan_minimized_at_k_equals_m_for_small_deck(self):
        # Recorded behaviour for n = 6 and every m <= 20: the infimum over
        # k <= m of the window gap is attained at k = m.
        for m in range(1, 21):
            gaps = {k: window_set_gap(6, m, k).gap for k in range(1, m + 1)}
            assert min(gaps.values()) == gaps[m], f"m={m}"


class TestPackDistribution:
    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            PackDistribution.from_pairs({2: Fraction(1, 2)})  # mass 1/2
        with pytest.raises(ValueError):
            PackDistribution([(2, Fraction(1, 2)), (2, Fraction(1, 2))])
        with pytest.raises(ValueError):
            PackDistribution.from_pairs({0: Fraction(1)})

    def test_truncated_records_discarded_mass(self):
        pairs = ((2**i, Fraction(1, 2**i)) for i in range(1, 1000))
        p = PackDistribution.truncated(pairs, Fraction(1, 100))
        assert p.discarded_mass == Fraction(1, 128)
        assert sum(w for _, w in p.atoms) == 1
        assert p.support() == (2, 4, 8, 16, 32, 64, 128)

    def test_truncated_requires_reachable_bound(self):
        pairs = [(2, Fraction(1, 2))]
        with pytest.raises(ValueError):
            PackDistribution.truncated(pairs, Fraction(1, 10))

    def test_inverse_square_family(self):
        p = inverse_square_pack(1000)
        # Support is floor(e^i) for i = 1..6 since floor(log 1000) = 6.
        assert p.support() == (2, 7, 20, 54, 148, 403)
        norm = sum(Fraction(1, i * i) for i in range(1, 7))
        assert p.prob_of(2) == Fraction(1, 1) / norm
        assert p.discarded_mass == 0


class TestJsonExport:
    def test_round_trip(self):
        law = law_after_k(5, MIX23, 2)
        text = law_to_json(law)
        data = json.loads(text)
        assert data["n"] == 5
        assert all(isinstance(e["prob_num"], str) for e in data["entries"])
        assert law_from_json(text) == law

    def test_counts_are_exact_decimal_strings(self):
        law = m_shuffle_law(4, 2)
        entries = json.loads(law_to_json(law))["entries"]
        assert [int(e["count"]) for e in entries] == [1, 11, 11, 1]
