import itertools

import pytest

from forbidword.conjugacy import (FULL, GOLDEN_MEAN, ChainPreconditionError, ConjugacyChain,
                                  Move, SwapKind, apply_swap_code, conjugacy_chain, gm_R,
                                  gm_reducibility, swap_applicable, validate_chain)
from forbidword.counting import count_avoiding
from forbidword.words import Word, WordError, all_words, has_trivial_overlap, word


def test_swap_kinds():
    # 111010 ends with the length-5 prefix of 110100, so this is not a trivial swap
    assert swap_applicable(word("110100"), word("111010")) == SwapKind.NONE
    assert swap_applicable(word("110110"), word("011011")) == SwapKind.NONE
    assert swap_applicable(word("0110"), word("0110")) == SwapKind.PERMUTATION
    assert swap_applicable(word("110100"), word("111000")) == SwapKind.TRIVIAL


def test_110100_and_111010_are_chained():
    out = conjugacy_chain(word("110100"), word("111010"))
    assert out.status == "Found" and len(out.chain) <= 6
    assert validate_chain(out.chain).ok


def test_q3_example_pair_adjacent():
    out = conjugacy_chain(word("120", 3), word("110", 3))
    assert validate_chain(out.chain).ok
    assert swap_applicable(word("120", 3), word("110", 3)) == SwapKind.TRIVIAL


def test_unknown_and_failed_chain():
    out = conjugacy_chain(word("110110"), word("011011"))
    assert out.status == "Unknown" and out.chain is None
    bad = ConjugacyChain([word("110110"), word("011011")], [Move("swap")], 6)
    assert not validate_chain(bad).ok
    assert validate_chain(ConjugacyChain([word("1101")], [], 6)).ok
    with pytest.raises(ChainPreconditionError):
        conjugacy_chain(word("1100"), word("1101"))


def test_swap_code_involution_and_transport():
    for k in (3, 4):
        for u, v in itertools.combinations(list(all_words(2, k)), 2):
            if swap_applicable(u, v) not in (SwapKind.TRIVIAL, SwapKind.GENERAL):
                continue
            for n in range(1, 2 * k + 1):
                for x in itertools.product(range(2), repeat=n):
                    y = apply_swap_code(u, v, x, periodic=True).symbols
                    assert apply_swap_code(u, v, y, periodic=True).symbols == x
            # interior windows: u-avoiding words go to v-avoiding words
            n = 2 * k
            images = set()
            for x in itertools.product(range(2), repeat=n):
                wx = Word(2, x)
                if not wx.contains(u):
                    y = apply_swap_code(u, v, x).symbols
                    assert not Word(2, y).contains(v)
                    images.add(y)
            assert len(images) == count_avoiding(u, n) == count_avoiding(v, n)


def test_swap_code_rejects_inapplicable():
    with pytest.raises(WordError):
        apply_swap_code(word("110110"), word("011011"), (1, 1, 0))


def test_gm_chains_and_reducibility():
    out = conjugacy_chain(word("100100000"), word("101000000"), GOLDEN_MEAN)
    assert validate_chain(out.chain, GOLDEN_MEAN).ok and len(out.chain) <= 5
    for k in range(3, 10):
        for w in all_words(2, k):
            if not w.contains(word("11")) and has_trivial_overlap(w):
                assert gm_reducibility(w) == (w.symbols in gm_R(k))
    assert not gm_reducibility(word("1001000"))
