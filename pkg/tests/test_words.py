import itertools

import pytest
from hypothesis import given, strategies as st

from forbidword.poly import IntPoly, charpoly, largest_real_root, poly_gcd, exact_div
from forbidword.words import (Word, WordError, all_words, canonical_form, correlation_poly,
                              cross_overlap, overlap_from_phi_value, permutation_between,
                              permutation_equivalent, phi_at, self_overlap, word)


def words(max_q=3, max_k=8):
    return st.integers(2, max_q).flatmap(
        lambda q: st.lists(st.integers(0, q - 1), min_size=1, max_size=max_k)
        .map(lambda s: Word(q, tuple(s))))


def test_overlap_example():
    w = word("100010")
    assert self_overlap(w) == [2, 6]
    assert str(correlation_poly(w)) == "t^5+t"
    assert phi_at(w, 2) == 34


def test_parse_forms():
    assert word("0120", 3) == Word(3, (0, 1, 2, 0))
    assert Word.parse("1,0,11", 12).symbols == (1, 0, 11)
    assert Word.parse('{"q":2,"symbols":[1,0]}') == word("10")
    with pytest.raises(WordError):
        word("102", 2)
    with pytest.raises(WordError):
        word("ab")


@given(words())
def test_overlap_contains_k(w):
    assert self_overlap(w)[-1] == w.k


@given(words())
def test_overlap_from_phi_value_roundtrip(w):
    assert overlap_from_phi_value(phi_at(w, w.q), w.q, w.k) == self_overlap(w)


@given(words())
def test_json_roundtrip(w):
    assert Word.from_json(w.to_json()) == w


@given(words(max_k=6))
def test_canonical_form_is_least_permutation(w):
    perms = [w.permute(p) for p in itertools.permutations(range(w.q))]
    assert canonical_form(w) == min(perms, key=lambda x: x.symbols)
    assert all(permutation_equivalent(w, p) for p in perms)


@given(words(max_k=6), st.data())
def test_permutation_between(w, data):
    p = data.draw(st.permutations(range(w.q)))
    pi = permutation_between(w, w.permute(p))
    assert pi is not None and w.permute(pi) == w.permute(p)


def test_cross_overlap_direction():
    # the length-i prefix of v equals the length-i suffix of u
    assert cross_overlap(word("0011"), word("1100")) == [1, 2]
    assert cross_overlap(word("1100"), word("0011")) == [1, 2]
    assert cross_overlap(word("110100"), word("111010")) == []
    assert cross_overlap(word("111010"), word("110100")) == [5]


def test_phi_bruteforce_definition():
    for w in all_words(2, 6):
        direct = [i for i in range(1, 7) if all(w.at(j) == w.at(6 - i + j) for j in range(1, i + 1))]
        assert direct == self_overlap(w)


def test_poly_basics():
    p = IntPoly([1, -1, -1])
    assert str(p) == "-t^2-t+1"
    assert charpoly([[1, 1], [1, 0]]) == IntPoly([-1, -1, 1])
    assert abs(largest_real_root(IntPoly([-1, -1, 1])).value - (1 + 5 ** 0.5) / 2) < 1e-12
    a, b = IntPoly([-1, 0, 1]), IntPoly([1, 1])
    assert poly_gcd(a, b) == IntPoly([1, 1])
    assert exact_div(a, b) == IntPoly([-1, 1])
