from fractions import Fraction

import pytest

from riffle.laws import (
    PackDistribution,
    SizeGuardError,
    law_after_k,
    m_shuffle_law,
)
from riffle.oracles import (
    oracle_convolution,
    oracle_digit_law,
    oracle_shuffle_sequence,
)

MIX23 = PackDistribution.from_pairs({2: Fraction(1, 2), 3: Fraction(1, 2)})


class TestDigitOracle:
    def test_n2_m2(self):
        law = oracle_digit_law(2, 2)
        assert law.class_prob == (Fraction(3, 4), Fraction(1, 4))

    def test_n1_any_m(self):
        for m in (1, 2, 7):
            assert oracle_digit_law(1, m).prob(1) == 1

    def test_n5_m3_matches_closed_form(self):
        assert oracle_digit_law(5, 3) == m_shuffle_law(5, 3)

    def test_word_count_guard(self):
        with pytest.raises(SizeGuardError):
            oracle_digit_law(30, 10)


class TestConvolutionOracle:
    def test_k1_matches_definition(self):
        assert oracle_convolution(4, MIX23, 1) == law_after_k(4, MIX23, 1)

    def test_two_gsr_steps_equal_4_shuffle(self):
        assert oracle_convolution(5, PackDistribution.delta(2), 2) == m_shuffle_law(5, 4)

    def test_mixture_two_steps(self):
        assert oracle_convolution(5, MIX23, 2) == law_after_k(5, MIX23, 2)

    def test_mixture_on_n4(self):
        assert oracle_convolution(4, MIX23, 2) == law_after_k(4, MIX23, 2)

    def test_deck_size_guard(self):
        with pytest.raises(SizeGuardError):
            oracle_convolution(8, MIX23, 1)


class TestShuffleSequence:
    def test_2_then_3_equals_6(self):
        assert oracle_shuffle_sequence(4, (2, 3)) == m_shuffle_law(4, 6)

    def test_order_does_not_matter(self):
        assert oracle_shuffle_sequence(4, (3, 2)) == oracle_shuffle_sequence(4, (2, 3))

    def test_empty_sequence_is_identity(self):
        law = oracle_shuffle_sequence(3, ())
        assert law.prob(1) == 1
