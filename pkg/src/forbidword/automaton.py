"""The labeled graph L_w, its golden-mean restriction, and recovery of w from
the unlabeled graph."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Union

import networkx as nx

from .words import Word, WordError, canonical_form


class NotAnLGraph(ValueError):
    """The digraph is not the unlabeled L_w of any word."""


class NotAGMGraph(NotAnLGraph):
    """The digraph is not the unlabeled golden-mean graph of any allowed word."""


@total_ordering
@dataclass(frozen=True)
class Star:
    a: int

    @property
    def value(self) -> int:
        # every star sits below every state, and stars are mutually equal
        return 0

    def __lt__(self, other):
        return _sort_key(self) < _sort_key(other)

    def __str__(self):
        return f"*{self.a}"


@total_ordering
@dataclass(frozen=True)
class State:
    i: int

    @property
    def value(self) -> int:
        return self.i

    def __lt__(self, other):
        return _sort_key(self) < _sort_key(other)

    def __str__(self):
        return str(self.i)


LVertex = Union[Star, State]


def _sort_key(v: LVertex) -> tuple[int, int]:
    return (0, v.a) if isinstance(v, Star) else (1, v.i)


def vertex_value(v: LVertex) -> int:
    """Integer used for comparisons: the state index, or 0 for any star."""
    return v.value


@dataclass(frozen=True)
class LabeledDigraph:
    vertices: tuple[LVertex, ...]
    edges: frozenset = field(default_factory=frozenset)  # of (src, dst, label)

    def out_edges(self, v: LVertex) -> list[tuple[LVertex, LVertex, int]]:
        return sorted((e for e in self.edges if e[0] == v), key=lambda e: e[2])

    def out_degree(self, v: LVertex) -> int:
        return sum(1 for e in self.edges if e[0] == v)

    def successor(self, v: LVertex, label: int) -> LVertex | None:
        for s, d, a in self.edges:
            if s == v and a == label:
                return d
        return None

    def sorted_edges(self) -> list[tuple[LVertex, LVertex, int]]:
        return sorted(self.edges, key=lambda e: (_sort_key(e[0]), e[2], _sort_key(e[1])))

    def adjacency(self) -> list[list[int]]:
        index = {v: n for n, v in enumerate(self.vertices)}
        m = [[0] * len(self.vertices) for _ in self.vertices]
        for s, d, _ in self.edges:
            m[index[s]][index[d]] += 1
        return m

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        for s, d, a in self.edges:
            g.add_edge(s, d, label=a)
        return g

    def to_json(self) -> dict:
        def name(v):
            return str(v) if isinstance(v, Star) else v.i
        return {
            "vertices": [name(v) for v in self.vertices],
            "edges": [{"src": name(s), "dst": name(d), "label": a}
                      for s, d, a in self.sorted_edges()],
        }

    def to_dot(self) -> str:
        lines = ["digraph L {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for s, d, a in self.sorted_edges():
            lines.append(f'  "{s}" -> "{d}" [label="{a}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def strip_labels(g: LabeledDigraph) -> nx.DiGraph:
    """Unlabeled copy with vertices renamed 0..n-1 in serialization order."""
    index = {v: n for n, v in enumerate(g.vertices)}
    out = nx.DiGraph()
    out.add_nodes_from(range(len(g.vertices)))
    out.add_edges_from((index[s], index[d]) for s, d, _ in g.edges)
    return out


def graph_from_json(data) -> nx.DiGraph:
    """Parse the JSON graph format; labels, if present, are ignored."""
    if isinstance(data, str):
        data = json.loads(data)
    g = nx.DiGraph()
    g.add_nodes_from(str(v) for v in data["vertices"])
    for e in data["edges"]:
        g.add_edge(str(e["src"]), str(e["dst"]))
    return g


# -- the d_i(a) table --------------------------------------------------------

def failure_function(w: Word) -> list[int]:
    """fail[i] = length of the longest proper border of w_1..w_i, for i = 0..k."""
    s, k = w.symbols, w.k
    fail = [0] * (k + 1)
    j = 0
    for i in range(1, k):
        while j and s[i] != s[j]:
            j = fail[j]
        if s[i] == s[j]:
            j += 1
        fail[i + 1] = j
    return fail


def kmp_transitions(w: Word) -> list[list[int]]:
    """delta[i][a] for i = 0..k-1: longest prefix of w that is a suffix of
    w_1..w_i a.  delta[k-1][w_k] == k marks the forbidden completion."""
    s, k, q = w.symbols, w.k, w.q
    fail = failure_function(w)
    delta = [[0] * q for _ in range(k)]
    for i in range(k):
        for a in range(q):
            if a == s[i]:
                delta[i][a] = i + 1
            elif i > 0:
                delta[i][a] = delta[fail[i]][a]
    return delta


def d_table(w: Word) -> dict[tuple[int, int], LVertex]:
    """Map (i, a) to State(d_i(a)) or Star(a); the pair (k-1, w_k) is omitted."""
    if w.k < 2:
        raise WordError("the graph L_w needs k >= 2")
    delta = kmp_transitions(w)
    table: dict[tuple[int, int], LVertex] = {}
    for i in range(1, w.k):
        for a in range(w.q):
            if i == w.k - 1 and a == w.at(w.k):
                continue
            j = delta[i][a]
            table[(i, a)] = State(j) if j >= 1 else Star(a)
    return table


def d_table_bruteforce(w: Word) -> dict[tuple[int, int], LVertex]:
    s, k = w.symbols, w.k
    table: dict[tuple[int, int], LVertex] = {}
    for i in range(1, k):
        for a in range(w.q):
            if i == k - 1 and a == s[-1]:
                continue
            text = s[:i] + (a,)
            best = max((j for j in range(1, i + 2) if s[:j] == text[len(text) - j:]), default=0)
            table[(i, a)] = State(best) if best else Star(a)
    return table


def d_value(w: Word, i: int, a: int) -> int:
    """d_i(a) as an integer, stars as 0 and d_{k-1}(w_k) extended to k."""
    if i == w.k - 1 and a == w.at(w.k):
        return w.k
    return d_table(w)[(i, a)].value


# -- construction ------------------------------------------------------------

def l_vertices(w: Word) -> tuple[LVertex, ...]:
    stars = [Star(a) for a in range(w.q) if a != w.at(1)]
    return tuple(stars) + tuple(State(i) for i in range(1, w.k))


def incoming_label(w: Word, v: LVertex) -> int:
    return v.a if isinstance(v, Star) else w.at(v.i)


def build_L(w: Word) -> LabeledDigraph:
    if w.k < 2:
        raise WordError("the graph L_w needs k >= 2")
    verts = l_vertices(w)
    stars = [v for v in verts if isinstance(v, Star)]
    edges = set()
    for s in stars:
        for t in stars:
            edges.add((s, t, t.a))
        edges.add((s, State(1), w.at(1)))
    for (i, a), dst in d_table(w).items():
        edges.add((State(i), dst, a))
    return LabeledDigraph(verts, frozenset(edges))


def _two_word(x) -> tuple[int, int]:
    syms = x.symbols if isinstance(x, Word) else tuple(x)
    if len(syms) != 2:
        raise WordError(f"restriction words must have length 2, got {x}")
    return syms[0], syms[1]


def build_L_restricted(w: Word, forbidden: Iterable) -> LabeledDigraph:
    """L_w with every edge labeled b leaving a vertex entered by label a
    deleted whenever ab is forbidden."""
    pairs = {_two_word(f) for f in forbidden}
    for a, b in pairs:
        if w.contains(Word(w.q, (a, b))):
            raise WordError(f"{w} contains the forbidden word {a}{b}")
    g = build_L(w)
    kept = frozenset(e for e in g.edges if (incoming_label(w, e[0]), e[2]) not in pairs)
    return LabeledDigraph(g.vertices, kept)


GOLDEN_MEAN = {(1, 1)}


def build_L_gm(w: Word) -> LabeledDigraph:
    if w.q != 2:
        raise WordError("the golden mean shift is binary")
    return build_L_restricted(w, GOLDEN_MEAN)


def is_irreducible(g) -> bool:
    if isinstance(g, LabeledDigraph):
        g = g.to_networkx()
    return g.number_of_nodes() > 0 and nx.is_strongly_connected(g)


def reducible_closed_form(w: Word) -> bool:
    """Closed-form reducibility test for the full-shift graph L_w."""
    if w.q != 2:
        return False
    k = w.k
    s = str(w)
    return s in {"1" + "0" * (k - 1), "1" * (k - 1) + "0", "0" + "1" * (k - 1), "0" * (k - 1) + "1"}


# -- recovery, full shift ----------------------------------------------------

@dataclass
class RecoveryReport:
    word: Word
    k: int
    state_names: dict  # input vertex -> LVertex
    method: str
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "word": str(self.word),
            "q": self.word.q,
            "k": self.k,
            "method": self.method,
            "notes": list(self.notes),
        }


def _backward_chain(g: nx.DiGraph, last, k: int, err=NotAnLGraph) -> list:
    """Walk from State(k-1) back to State(1): the only in-neighbor of j outside
    {j, ..., k-1} is j-1."""
    chain = [last]
    seen = {last}
    for _ in range(k - 2):
        outside = [u for u in g.predecessors(chain[-1]) if u not in seen]
        if len(outside) != 1:
            raise err(f"backward chain broken at step {len(chain)}: "
                      f"{len(outside)} candidate predecessors")
        chain.append(outside[0])
        seen.add(outside[0])
    chain.reverse()
    return chain


def _check_mapping(g: nx.DiGraph, names: dict, L: LabeledDigraph, err) -> None:
    expected = {(s, d) for s, d, _ in L.edges}
    actual = {(names[s], names[d]) for s, d in g.edges()}
    if expected != actual or len(L.vertices) != g.number_of_nodes():
        raise err("rebuilt graph does not match the input")


def recover_word(g: nx.DiGraph, q: int) -> RecoveryReport:
    """Recover w (up to an alphabet permutation) from the unlabeled L_w."""
    n = g.number_of_nodes()
    k = n - q + 2
    if k < 2:
        raise NotAnLGraph(f"{n} vertices is too few for q={q}")
    low = [v for v in g.nodes if g.out_degree(v) == q - 1]
    if len(low) != 1:
        raise NotAnLGraph(f"expected one vertex of out-degree {q - 1}, found {len(low)}")
    bad = [v for v in g.nodes if v != low[0] and g.out_degree(v) != q]
    if bad:
        raise NotAnLGraph(f"vertex {bad[0]!r} has out-degree {g.out_degree(bad[0])}")
    chain = _backward_chain(g, low[0], k)
    stars = sorted((v for v in g.nodes if v not in set(chain)), key=str)
    if len(stars) != q - 1:
        raise NotAnLGraph("wrong number of star vertices")

    label: dict = {}
    names: dict = {}
    for sym, v in enumerate(stars, start=1):
        label[v] = sym
        names[v] = Star(sym)
    for j, v in enumerate(chain, start=1):
        names[v] = State(j)
    syms = [0]
    label[chain[0]] = 0
    for j, v in enumerate(chain, start=1):
        seen = set()
        for u in g.successors(v):
            if j < k - 1 and u == chain[j]:
                continue
            if u not in label:
                raise NotAnLGraph(f"state {j} points forward past state {j + 1}")
            seen.add(label[u])
        missing = sorted(set(range(q)) - seen)
        if len(missing) != 1:
            raise NotAnLGraph(f"state {j} does not determine the next symbol")
        syms.append(missing[0])
        if j < k - 1:
            label[chain[j]] = missing[0]
    w = Word(q, tuple(syms))
    _check_mapping(g, names, build_L(w), NotAnLGraph)
    return RecoveryReport(canonical_form(w), k, names, "backward-chain")


def graphs_isomorphic_L(g1: nx.DiGraph, g2: nx.DiGraph, q: int) -> bool:
    w1 = recover_word(g1, q).word
    w2 = recover_word(g2, q).word
    return w1 == w2


# -- recovery, golden mean ---------------------------------------------------

def gm_words(k: int) -> list[Word]:
    """All binary words of length k avoiding 11, in lexicographic order."""
    return [Word(2, s) for s in itertools.product((0, 1), repeat=k)
            if all(not (x and y) for x, y in zip(s, s[1:]))]


def _base_graphs() -> dict[str, set]:
    """Edge sets of the base graphs on I1=0, I2=1, I3=2.  The exit edge drawn
    from I3 is not required: for k = 4 it has nowhere to go."""
    return {
        "S1": {(0, 1), (1, 2), (1, 0), (2, 2)},
        "S2": {(0, 1), (1, 2), (0, 0), (2, 1)},
        "S3": {(0, 1), (1, 2), (0, 0), (2, 0)},
        "S4": {(0, 1), (1, 2), (1, 0), (2, 0)},
    }


def _find_base(g: nx.DiGraph, name: str, induced: bool = True) -> list[tuple]:
    """Ordered vertex triples realizing the base graph, as an induced subgraph
    by default."""
    required = _base_graphs()[name]
    found = []
    for trip in itertools.permutations(g.nodes, 3):
        if not all(g.has_edge(trip[a], trip[b]) for a, b in required):
            continue
        if induced:
            present = {(a, b) for a in range(3) for b in range(3) if g.has_edge(trip[a], trip[b])}
            if present != required:
                continue
        found.append(trip)
    return found


def _locate_zero(g: nx.DiGraph, induced: bool = True):
    hits = _find_base(g, "S1", induced)
    if hits:
        return hits[0][0], "S1"
    for name in ("S2", "S3"):
        hits = _find_base(g, name, induced)
        if not hits:
            continue
        i1 = hits[0][0]
        sources = [t for t in g.predecessors(i1) if t != i1 and g.in_degree(t) == 0]
        if sources:
            return sources[0], name + "/in-degree-0"
        return i1, name
    hits = _find_base(g, "S4", induced)
    if hits:
        return hits[0][0], "S4"
    raise NotAGMGraph("no base graph found")


def _hamiltonian_end(g: nx.DiGraph, start):
    n = g.number_of_nodes()
    ends = []

    def dfs(v, seen):
        if len(seen) == n:
            ends.append(v)
            return
        for u in g.successors(v):
            if u not in seen:
                seen.add(u)
                dfs(u, seen)
                seen.discard(u)

    dfs(start, {start})
    ends = sorted(set(ends), key=str)
    if len(ends) != 1:
        raise NotAGMGraph(f"expected one Hamiltonian path end from the star, found {len(ends)}")
    return ends[0]


def _gm_last_candidates(g: nx.DiGraph):
    """Yield (vertex, method) guesses for State(k-1), most direct first.

    The out-degree-1 shortcut is only a guess: a state y with w_y = 1 whose
    successor is k-1 also points outside V0 when k-1 itself has out-degree 1.
    """
    zero = [v for v in g.nodes if g.out_degree(v) == 0]
    if len(zero) > 1 or any(g.out_degree(v) > 2 for v in g.nodes):
        raise NotAGMGraph("out-degree schedule is not that of a golden-mean graph")
    if zero:
        yield zero[0], "out-degree-0"
        return
    v0 = {v for v in g.nodes if g.out_degree(v) == 2}
    odd = [v for v in g.nodes if g.out_degree(v) == 1
           and next(iter(g.successors(v))) not in v0]
    if len(odd) == 1:
        yield odd[0], "V1-exit"
    start, how = _locate_zero(g)
    yield _hamiltonian_end(g, start), how


def _gm_word_from_chain(g: nx.DiGraph, chain: list, star) -> Word:
    syms = [1 if g.out_degree(v) == 1 else 0 for v in chain[:-1]]
    last = chain[-1]
    if g.out_degree(last) == 0:
        return Word(2, tuple(syms + [1, 0]))
    syms.append(0)
    (target,) = list(g.successors(last))
    # the edge label is the incoming label of its target; w_k is its complement
    label = 1 - syms[0] if target == star else syms[chain.index(target)]
    return Word(2, tuple(syms + [1 - label]))


def recover_word_gm(g: nx.DiGraph) -> RecoveryReport:
    """Recover w from the unlabeled golden-mean graph L^{11}_w (k >= 3)."""
    k = g.number_of_nodes()
    if k < 3:
        raise NotAGMGraph("need k >= 3")
    if k == 3:
        for w in gm_words(3):
            L = build_L_gm(w)
            if nx.is_isomorphic(g, strip_labels(L)):
                iso = nx.algorithms.isomorphism.DiGraphMatcher(g, strip_labels(L))
                mapping = next(iso.isomorphisms_iter())
                names = {v: L.vertices[mapping[v]] for v in g.nodes}
                return RecoveryReport(w, 3, names, "k=3 lookup")
        raise NotAGMGraph("no length-3 word matches")
    loops = sum(1 for v in g.nodes if g.has_edge(v, v))
    twos = len({frozenset((u, v)) for u, v in g.edges if u != v and g.has_edge(v, u)})
    if loops > 1 or twos > 1:
        raise NotAGMGraph("more than one 1-cycle or 2-cycle")
    errors = []
    for last, how in _gm_last_candidates(g):
        try:
            chain = _backward_chain(g, last, k, NotAGMGraph)
            rest = [v for v in g.nodes if v not in set(chain)]
            if len(rest) != 1:
                raise NotAGMGraph("expected a single star vertex")
            star = rest[0]
            w = _gm_word_from_chain(g, chain, star)
            if w.contains(Word(2, (1, 1))):
                raise NotAGMGraph("recovered word contains 11")
            names = {star: Star(1 - w.at(1))}
            names.update({v: State(j) for j, v in enumerate(chain, start=1)})
            _check_mapping(g, names, build_L_gm(w), NotAGMGraph)
        except NotAGMGraph as exc:
            errors.append(f"{how}: {exc}")
            continue
        return RecoveryReport(w, k, names, how, errors)
    raise NotAGMGraph("; ".join(errors) or "no candidate for the last state")

