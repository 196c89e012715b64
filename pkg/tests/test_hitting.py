from fractions import Fraction

import pytest

from forbidword.hitting import (CERTIFIED, CERTIFIED_EQUAL, EMPIRICAL, expectation_from_gf,
                                expected_hitting, expected_hitting_chain, hitting_survival,
                                simulate_coupling, stochastic_dominance)
from forbidword.words import WordError, all_words, word


def test_fixtures():
    assert expected_hitting(word("11")) == 6
    assert expected_hitting(word("10")) == 4


def test_three_ways_agree():
    for w in all_words(3, 3):
        e = expected_hitting(w)
        assert expected_hitting_chain(w) == e
        assert expectation_from_gf(w) == e


def test_survival_is_a_tail():
    prof = hitting_survival(word("0110"), 600)
    assert prof.survival[0] == 1
    assert all(a >= b for a, b in zip(prof.survival, prof.survival[1:]))
    assert 0 <= prof.remainder() < Fraction(1, 10 ** 6)


def test_dominance_tiers():
    assert stochastic_dominance(word("0011"), word("0111")).tier == CERTIFIED_EQUAL
    v = stochastic_dominance(word("01010"), word("01000"))
    assert v.tier == CERTIFIED and v.relation == "tau_v <=st tau_u" and v.strict
    e = stochastic_dominance(word("1001"), word("1100"))
    assert e.tier == EMPIRICAL and e.caveat


def test_coupling_small_run():
    s = simulate_coupling(word("01010"), word("01000"), seed=7, trials=2000, keep_trace=True)
    assert s.dominated_count == s.trials
    assert abs(s.z_tau) < 5 and abs(s.z_tau_prime) < 5
    assert s.trace[0] == (0, 0, 0)
    again = simulate_coupling(word("01010"), word("01000"), seed=7, trials=2000)
    assert again.mean_tau == s.mean_tau


def test_coupling_needs_D():
    with pytest.raises(WordError):
        simulate_coupling(word("1001"), word("1100"))
