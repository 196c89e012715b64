import networkx as nx
import pytest

from forbidword.automaton import (GOLDEN_MEAN, NotAGMGraph, NotAnLGraph, Star, State, build_L,
                                  build_L_gm, build_L_restricted, d_table, d_table_bruteforce,
                                  gm_words, graph_from_json, graphs_isomorphic_L,
                                  is_irreducible, recover_word, recover_word_gm,
                                  reducible_closed_form, strip_labels)
from forbidword.counting import count_avoiding_naive
from forbidword.words import WordError, all_words, permutation_equivalent, word


def test_figure_graph():
    g = build_L(word("21201", 3))
    assert len(g.vertices) == 6
    assert g.out_degree(State(4)) == 2


def test_w10_by_hand():
    g = build_L(word("10"))
    assert set(g.vertices) == {Star(0), State(1)}
    assert g.edges == {(Star(0), Star(0), 0), (Star(0), State(1), 1), (State(1), State(1), 1)}


def test_d_table_examples():
    t = d_table(word("00000"))
    for i in range(1, 4):
        assert t[(i, 0)] == State(i + 1)
    assert all(t[(i, 1)] == Star(1) for i in range(1, 5))
    t = d_table(word("010"))
    assert t[(1, 1)] == State(2) and t[(1, 0)] == State(1) and t[(2, 1)] == Star(1)
    assert (2, 0) not in t
    with pytest.raises(WordError):
        d_table(word("1"))


def test_d_table_matches_bruteforce():
    for q in (2, 3):
        for k in range(2, 7):
            for w in all_words(q, k):
                assert d_table(w) == d_table_bruteforce(w)


def test_presentation_counts():
    # label paths of length n in the prefix automaton from state 0 avoid w
    from forbidword.counting import count_avoiding
    for q in (2, 3):
        for k in range(1, 5):
            for w in all_words(q, k):
                for n in range(0, 8):
                    assert count_avoiding(w, n) == count_avoiding_naive(w, n)


def test_irreducibility_examples():
    assert not is_irreducible(build_L(word("1000")))
    assert is_irreducible(build_L(word("1000", 3)))
    assert is_irreducible(build_L(word("0011")))


def test_restricted_graph():
    # the last state of 010 loses its only edge (label 1 after a 1)
    g = build_L_gm(word("010"))
    assert g.out_edges(State(2)) == []
    assert g.out_edges(State(1)) == [(State(1), State(1), 0), (State(1), State(2), 1)]
    for w in gm_words(6):
        g = build_L_gm(w)
        for i in range(1, w.k - 1):
            if w.at(i) == 1:
                assert g.out_degree(State(i)) == 1
    assert build_L_restricted(word("0110"), set()) == build_L(word("0110"))
    with pytest.raises(WordError):
        build_L_restricted(word("0110"), GOLDEN_MEAN)


def test_prefix_heredity():
    for w in all_words(3, 5):
        g = build_L(w)
        for r in range(2, w.k):
            small = build_L(w.prefix(r))
            keep = set(small.vertices)
            induced = {e for e in g.edges if e[0] in keep and e[1] in keep}
            assert induced == set(small.edges)


def test_recover_fixtures():
    u, v = word("110100"), word("111010")
    ru = recover_word(strip_labels(build_L(u)), 2).word
    rv = recover_word(strip_labels(build_L(v)), 2).word
    assert permutation_equivalent(ru, u) and permutation_equivalent(rv, v)
    assert not permutation_equivalent(ru, rv)
    gu, gv = strip_labels(build_L(u)), strip_labels(build_L(v))
    assert not graphs_isomorphic_L(gu, gv, 2)
    assert graphs_isomorphic_L(gu, strip_labels(build_L(u.flip())), 2)
    w = word("21201", 3)
    assert permutation_equivalent(recover_word(strip_labels(build_L(w)), 3).word, w)


def test_recover_rejects_non_L_graphs():
    g = nx.DiGraph([(0, 1), (1, 2), (2, 0)])
    with pytest.raises(NotAnLGraph):
        recover_word(g, 2)
    with pytest.raises(NotAGMGraph):
        recover_word_gm(nx.complete_graph(4, nx.DiGraph))


def test_recover_from_json_without_labels():
    w = word("0110")
    data = build_L(w).to_json()
    for e in data["edges"]:
        del e["label"]
    assert permutation_equivalent(recover_word(graph_from_json(data), 2).word, w)


def test_gm_recovery_cases():
    for text in ("0100", "0101", "000100", "0100010", "10100"):
        w = word(text)
        assert recover_word_gm(strip_labels(build_L_gm(w))).word == w


def test_dot_export():
    dot = build_L(word("21201", 3)).to_dot()
    assert '"*0"' in dot and "label=" in dot
