"""Swap conjugacies between shifts with one forbidden word, and explicit
chains of them for words with trivial self-overlap."""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import networkx as nx

from .automaton import build_L_gm, gm_words
from .words import (
    Word, WordError, cross_overlap, has_trivial_overlap, permutation_between,
    self_overlap,
)


class SwapKind(str, Enum):
    TRIVIAL = "TrivialSwap"
    GENERAL = "GeneralSwap"
    PERMUTATION = "Permutation"
    NONE = "NotApplicable"


FULL = "full"
GOLDEN_MEAN = "gm"


class ChainPreconditionError(WordError):
    """The words are outside the class the chain construction covers."""


@functools.lru_cache(maxsize=4096)
def swap_applicable(u: Word, v: Word) -> SwapKind:
    if u.q != v.q or u.k != v.k:
        raise WordError("swap needs words of equal length and alphabet")
    su, sv = self_overlap(u), self_overlap(v)
    cuv, cvu = cross_overlap(u, v), cross_overlap(v, u)
    if su == sv == [u.k] and not cuv and not cvu:
        return SwapKind.TRIVIAL
    if su == sv and u != v and cuv == cvu == su[:-1]:
        return SwapKind.GENERAL
    if permutation_between(u, v) is not None:
        return SwapKind.PERMUTATION
    return SwapKind.NONE


def gm_swap_applicable(u: Word, v: Word) -> bool:
    """Golden-mean swap: both allowed, same end symbols, trivial and disjoint overlaps."""
    eleven = Word(2, (1, 1))
    if u.q != 2 or v.q != 2 or u.contains(eleven) or v.contains(eleven):
        return False
    if u.at(1) != v.at(1) or u.at(u.k) != v.at(v.k):
        return False
    return swap_applicable(u, v) == SwapKind.TRIVIAL


# -- the sliding block code -----------------------------------------------------

@dataclass
class SwapResult:
    symbols: tuple[int, ...]
    replaced: list[tuple[int, str]]  # (start, "u->v" | "v->u")
    boundary: list[int]  # positions whose image may depend on symbols outside x
    periodic: bool


def apply_swap_code(u: Word, v: Word, x: Sequence[int], periodic: bool = False) -> SwapResult:
    """Replace each occurrence of u in x by v and vice versa.

    Finite inputs use only windows lying inside x; the first and last k-1
    positions are reported as boundary.  Periodic inputs wrap around.
    """
    kind = swap_applicable(u, v)
    if kind not in (SwapKind.TRIVIAL, SwapKind.GENERAL):
        raise WordError(f"no swap code between {u} and {v} ({kind.value})")
    x = tuple(x)
    n, k = len(x), u.k
    y: list[int | None] = list(x)
    written: dict[int, int] = {}
    replaced = []
    starts = range(n) if periodic else range(max(0, n - k + 1))
    for p in starts:
        window = tuple(x[(p + j) % n] for j in range(k)) if periodic else x[p:p + k]
        if periodic and n == 0:
            break
        if window == u.symbols:
            new, tag = v.symbols, "u->v"
        elif window == v.symbols:
            new, tag = u.symbols, "v->u"
        else:
            continue
        replaced.append((p, tag))
        for j in range(k):
            idx = (p + j) % n if periodic else p + j
            if written.setdefault(idx, new[j]) != new[j]:
                raise AssertionError("inconsistent overlapping replacements")
            y[idx] = new[j]
    boundary = [] if periodic else sorted(set(range(min(k - 1, n))) | set(range(max(0, n - k + 1), n)))
    return SwapResult(tuple(y), replaced, boundary, periodic)


# -- chains -------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    kind: str  # "swap", "permutation", "flip"
    detail: tuple = ()

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "permutation":
            out["permutation"] = list(self.detail)
        return out


@dataclass
class ConjugacyChain:
    words: list[Word]
    moves: list[Move]
    bound: int
    ambient: str = FULL

    def __len__(self) -> int:
        return len(self.words)


@dataclass
class ChainOutcome:
    status: str  # "Found" or "Unknown"
    chain: ConjugacyChain | None
    reason: str = ""


@dataclass
class ChainReport:
    ok: bool
    steps: list[dict] = field(default_factory=list)
    within_bound: bool = True


def _move_between(a: Word, b: Word, ambient: str) -> Move:
    if ambient == GOLDEN_MEAN:
        return Move("swap")
    if a.q == 2 and b == a.flip():
        if swap_applicable(a, b) in (SwapKind.TRIVIAL, SwapKind.GENERAL):
            return Move("swap")
        return Move("flip")
    kind = swap_applicable(a, b)
    if kind in (SwapKind.TRIVIAL, SwapKind.GENERAL):
        return Move("swap")
    pi = permutation_between(a, b)
    if pi is not None:
        return Move("permutation", pi)
    return Move("swap")  # left for validate_chain to reject


def _collapse(words: list[Word]) -> list[Word]:
    """Cut out any cycle so that every word appears once."""
    out: list[Word] = []
    for w in words:
        if w in out:
            out = out[:out.index(w) + 1]
        else:
            out.append(w)
    return out


def _make_chain(words: list[Word], bound: int, ambient: str) -> ConjugacyChain:
    words = _collapse(words)
    moves = [_move_between(a, b, ambient) for a, b in zip(words, words[1:])]
    return ConjugacyChain(words, moves, bound, ambient)


def validate_chain(chain: ConjugacyChain, ambient: str | None = None) -> ChainReport:
    ambient = ambient or chain.ambient
    steps = []
    ok = True
    if chain.words and any(w.k != chain.words[0].k or w.q != chain.words[0].q for w in chain.words):
        return ChainReport(False, [{"error": "words differ in length or alphabet"}], False)
    for n, (a, b, mv) in enumerate(zip(chain.words, chain.words[1:], chain.moves)):
        if mv.kind == "flip":
            good = a.q == 2 and b == a.flip() and ambient == FULL
        elif mv.kind == "permutation":
            good = ambient == FULL and len(mv.detail) == a.q and a.permute(mv.detail) == b
        elif ambient == GOLDEN_MEAN:
            good = gm_swap_applicable(a, b)
        else:
            good = swap_applicable(a, b) in (SwapKind.TRIVIAL, SwapKind.GENERAL)
        steps.append({"step": n, "from": str(a), "to": str(b), "move": mv.kind, "ok": good})
        ok = ok and good
    return ChainReport(ok, steps, len(chain.words) <= chain.bound)


# binary full shift

def binary_reducible(k: int) -> set[tuple[int, ...]]:
    return {
        (1,) + (0,) * (k - 1), (0,) + (1,) * (k - 1),
        (1,) * (k - 1) + (0,), (0,) * (k - 1) + (1,),
    }


def in_C(w: Word) -> bool:
    return w.q == 2 and has_trivial_overlap(w) and w.symbols not in binary_reducible(w.k)


def _bin(s: str) -> Word:
    return Word(2, tuple(int(c) for c in s))


def _z(k: int) -> Word:
    return _bin("101" + "0" * (k - 3))


def _p(k: int, j: int) -> Word:
    return _bin("1" * j + "0" * (k - j))


def _in_D(w: Word, j: int) -> bool:
    k = w.k
    pre = (1,) * j + (0,) * (-(-k // 2))
    return w.symbols[:len(pre)] == pre


def _in_E(w: Word, l: int) -> bool:
    k = w.k
    suf = (1,) * (k // 2) + (0,) * l
    return len(suf) <= k and w.symbols[k - len(suf):] == suf


def _binary_to_z(w: Word) -> list[Word]:
    """Route a word of C_1(k), k > 4, to z through at most one test word."""
    k = w.k
    z = _z(k)
    if w == z:
        return [z]
    if any(w == _p(k, j) for j in range(2, k - 1)):
        return [w, z]
    d = [j for j in range(2, k // 2 + 1) if _in_D(w, j)]
    e = [l for l in range(2, -(-k // 2) + 1) if _in_E(w, l)]
    if not d and not e:
        return [w, _p(k, k // 2), z]
    if d:
        return [w, _p(k, d[0]), z]
    return [w, z]


def binary_chain(u: Word, v: Word) -> ConjugacyChain:
    if not (in_C(u) and in_C(v)):
        raise ChainPreconditionError("binary chains need trivial self-overlap and "
                                     "a word outside the four reducible ones")
    k = u.k
    if u == v:
        return _make_chain([u], 6, FULL)
    if k <= 4:
        return _make_chain([u, v], 6, FULL)  # C(4) = {0011, 1100}: a flip
    c1_u, c1_v = u.at(1) == 1, v.at(1) == 1
    uu = u if c1_u else u.flip()
    vv = v if c1_v else v.flip()
    mid = _binary_to_z(uu) + _binary_to_z(vv)[::-1][1:]
    if not c1_u and not c1_v:
        words = [w.flip() for w in mid]
    elif c1_u and c1_v:
        words = mid
    elif c1_u:
        words = mid + [v]
    else:
        words = [u] + mid
    return _make_chain(words, 6, FULL)


# q > 2 full shift

def _to_C10(w: Word) -> tuple[int, ...]:
    """Permutation sending w_1 to 1 and w_k to 0."""
    a, b = w.at(1), w.at(w.k)
    perm = list(range(w.q))
    pos = {s: s for s in range(w.q)}  # symbol -> index in perm
    def send(src, dst):
        i, j = pos[src], dst
        other = perm[j]
        perm[i], perm[j] = other, src
        pos[other], pos[src] = i, j
    # build the inverse arrangement: perm[target] = source symbol
    send(a, 1)
    send(b, 0)
    inv = perm
    out = [0] * w.q
    for target, src in enumerate(inv):
        out[src] = target
    return tuple(out)


def _longest_one_run(w: Word) -> int:
    return max((len(list(g)) for s, g in itertools.groupby(w.symbols) if s == 1), default=0)


def _qary_to_z(w: Word) -> list[Word]:
    """Route a word of C_10(k), k > 4, to z = 1010^{k-3}."""
    k, q = w.k, w.q
    z = Word(q, _z(k).symbols)
    binary = set(w.symbols) <= {0, 1}
    if binary:
        wb = Word(2, w.symbols)
        if wb.symbols in binary_reducible(k):
            a = 2
            aa = Word(q, (a, a) + (0,) * (k - 2))
            return [w, aa, Word(q, (1, 1) + (0,) * (k - 2)), z]
        return [Word(q, x.symbols) for x in _binary_to_z(wb)]
    l = _longest_one_run(w)
    x = Word(q, (1,) * (l + 1) + (0,) * (k - l - 1))
    return [w] + _qary_to_z(x)


def _qary_small(k: int, q: int, u: Word, v: Word) -> list[Word]:
    """Shortest swap/permutation path among trivial-overlap words (k <= 4)."""
    nodes = [w for w in (Word(q, s) for s in itertools.product(range(q), repeat=k))
             if has_trivial_overlap(w)]
    prev = {u: None}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        if a == v:
            break
        for b in nodes:
            if b in prev:
                continue
            if swap_applicable(a, b) in (SwapKind.TRIVIAL, SwapKind.PERMUTATION):
                prev[b] = a
                queue.append(b)
    if v not in prev:
        raise ChainPreconditionError(f"no chain found between {u} and {v}")
    path = [v]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _qary_k3_to_target(w: Word) -> list[Word]:
    """k = 3 inside C_10: reach 110 through c c 0 or directly (120 -> 110)."""
    q = w.q
    target = Word(q, (1, 1, 0))
    if w == target:
        return [w]
    unused = [c for c in range(2, q) if c not in w.symbols]
    if unused:
        c = unused[0]
        return [w, Word(q, (c, c, 0)), target]
    return [w, target]


def qary_chain(u: Word, v: Word) -> ConjugacyChain:
    if u.q != v.q or u.k != v.k:
        raise WordError("words must have equal length and alphabet")
    if not (has_trivial_overlap(u) and has_trivial_overlap(v)):
        raise ChainPreconditionError("q > 2 chains need trivial self-overlap")
    k, q = u.k, u.q
    if u == v:
        return _make_chain([u], 11, FULL)
    if k <= 2 or permutation_between(u, v) is not None:
        return _make_chain([u, v], 11, FULL)
    if k == 4:
        return _make_chain(_qary_small(k, q, u, v), 11, FULL)
    pu, pv = _to_C10(u), _to_C10(v)
    cu, cv = u.permute(pu), v.permute(pv)
    route = _qary_k3_to_target if k == 3 else _qary_to_z
    mid = route(cu) + route(cv)[::-1][1:]
    words = ([u] if cu != u else []) + mid + ([v] if cv != v else [])
    return _make_chain(words, 11, FULL)


# golden mean

def gm_R(k: int) -> set[tuple[int, ...]]:
    out = {(1,) + (0,) * (k - 1), (0,) * (k - 1) + (1,)}
    if k % 2 == 1:
        h = (k - 1) // 2
        out.add((1, 0) * h + (0,))
        out.add((0,) + (0, 1) * h)
    return out


def in_G(w: Word) -> bool:
    return (w.q == 2 and not w.contains(Word(2, (1, 1))) and has_trivial_overlap(w)
            and w.symbols not in gm_R(w.k))


def gm_class(w: Word) -> int | None:
    if not in_G(w):
        return None
    if w.at(1) == 1 and w.at(w.k) == 0:
        return 1
    if w.at(1) == 0 and w.at(w.k) == 1:
        return 2
    return None


def _gm_to_z(w: Word) -> list[Word]:
    k = w.k
    z = _bin("1001" + "0" * (k - 4))
    m = -(-k // 4)

    def p(j):
        return _bin("10" * j + "0" * (k - 2 * j))

    if w == z:
        return [z]
    tests = [j for j in range(2, (k - 2) // 2 + 1)]
    if any(w == p(j) for j in tests):
        return [w, z]
    d = [j for j in range(2, m + 1)
         if w.symbols[:k + 2 * j - 2 * m] == p(j).symbols[:2 * j] + (0,) * (k - 2 * m)]
    e = [l for l in range(2, k - 2 * m + 1)
         if 2 * m + l <= k and w.symbols[k - 2 * m - l:] == (1, 0) * m + (0,) * l]
    if not d and not e:
        return [w, p(m), z]
    if d:
        return [w, p(d[0]), z]
    return [w, z]


def _gm_bfs(u: Word, v: Word) -> list[Word]:
    nodes = [w for w in gm_words(u.k) if gm_class(w) == gm_class(u)]
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from((a, b) for a, b in itertools.combinations(nodes, 2) if gm_swap_applicable(a, b))
    try:
        return nx.shortest_path(g, u, v)
    except nx.NetworkXNoPath as exc:
        raise ChainPreconditionError(f"no golden-mean chain between {u} and {v}") from exc


def gm_chain(u: Word, v: Word) -> ConjugacyChain:
    cu, cv = gm_class(u), gm_class(v)
    if cu is None or cu != cv:
        raise ChainPreconditionError("golden-mean chains need both words in G_1(k) or both in G_2(k)")
    if u == v:
        return _make_chain([u], 5, GOLDEN_MEAN)
    if cu == 2:
        inner = gm_chain(u.reverse(), v.reverse())
        return _make_chain([w.reverse() for w in inner.words], 5, GOLDEN_MEAN)
    words = _gm_to_z(u) + _gm_to_z(v)[::-1][1:] if u.k >= 7 else [u, v]
    chain = _make_chain(words, 5, GOLDEN_MEAN)
    if not validate_chain(chain).ok:
        chain = _make_chain(_gm_bfs(u, v), 5, GOLDEN_MEAN)
    return chain


def conjugacy_chain(u: Word, v: Word, ambient: str = FULL) -> ChainOutcome:
    if u.q != v.q or u.k != v.k:
        raise WordError("words must have equal length and alphabet")
    if ambient == GOLDEN_MEAN:
        return ChainOutcome("Found", gm_chain(u, v))
    if ambient != FULL:
        raise WordError(f"unknown ambient {ambient!r}")
    if has_trivial_overlap(u) and has_trivial_overlap(v):
        chain = binary_chain(u, v) if u.q == 2 else qary_chain(u, v)
        return ChainOutcome("Found", chain)
    if u == v:
        return ChainOutcome("Found", _make_chain([u], 1, FULL))
    kind = swap_applicable(u, v)
    if kind in (SwapKind.GENERAL, SwapKind.PERMUTATION, SwapKind.TRIVIAL):
        return ChainOutcome("Found", _make_chain([u, v], 2, FULL))
    if self_overlap(u) != self_overlap(v):
        raise ChainPreconditionError("overlap sets differ, so the shifts have different "
                                     "entropy and cannot be conjugate")
    return ChainOutcome("Unknown", None,
                        "equal nontrivial overlap sets with no direct swap; conjugacy is open")


def gm_reducibility(w: Word) -> bool:
    """True when the golden-mean shift with w forbidden is reducible."""
    if w.q != 2 or w.contains(Word(2, (1, 1))):
        raise WordError(f"{w} is not allowed in the golden mean shift")
    g = build_L_gm(w).to_networkx()
    return not nx.is_strongly_connected(g)
