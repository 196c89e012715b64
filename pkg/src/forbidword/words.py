"""Words over [q], overlap sets and correlation polynomials."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

from .poly import IntPoly


class WordError(ValueError):
    """Malformed word, or two words that cannot be compared."""


@dataclass(frozen=True)
class Word:
    """A finite word w_1 ... w_k over the alphabet {0, ..., q-1}.

    Positions are 1-based in every public function that talks about overlaps
    or automaton states; ``symbols`` itself is a plain 0-based tuple.
    """

    q: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise WordError(f"alphabet size must be at least 2, got {self.q}")
        syms = tuple(int(s) for s in self.symbols)
        if not syms:
            raise WordError("words must be nonempty")
        bad = [s for s in syms if not 0 <= s < self.q]
        if bad:
            raise WordError(f"symbols {bad} outside alphabet [0, {self.q})")
        object.__setattr__(self, "symbols", syms)

    @property
    def k(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def at(self, i: int) -> int:
        """1-based access, w_i."""
        return self.symbols[i - 1]

    def __str__(self) -> str:
        if self.q <= 10:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, q={self.q})"

    @classmethod
    def parse(cls, text: str, q: int = 2) -> "Word":
        text = text.strip()
        if text.startswith("{"):
            return cls.from_json(text)
        if "," in text or q > 10:
            return cls(q, tuple(int(x) for x in text.split(",") if x.strip()))
        if not text.isdigit():
            raise WordError(f"cannot parse word {text!r}")
        return cls(q, tuple(int(c) for c in text))

    @classmethod
    def from_json(cls, data) -> "Word":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["q"]), tuple(data["symbols"]))

    def to_json(self) -> dict:
        return {"q": self.q, "symbols": list(self.symbols)}

    def reverse(self) -> "Word":
        return Word(self.q, self.symbols[::-1])

    def permute(self, perm: Sequence[int]) -> "Word":
        """Apply the alphabet map a -> perm[a]."""
        return Word(self.q, tuple(perm[s] for s in self.symbols))

    def flip(self) -> "Word":
        if self.q != 2:
            raise WordError("bit flip is only defined for q = 2")
        return self.permute((1, 0))

    def prefix(self, r: int) -> "Word":
        return Word(self.q, self.symbols[:r])

    def contains(self, other: "Word") -> bool:
        k = other.k
        return any(self.symbols[i:i + k] == other.symbols for i in range(self.k - k + 1))


def word(text: str, q: int = 2) -> Word:
    """Shorthand for :meth:`Word.parse`."""
    return Word.parse(text, q)


def all_words(q: int, k: int) -> Iterator[Word]:
    for syms in itertools.product(range(q), repeat=k):
        yield Word(q, syms)


def _check_pair(u: Word, v: Word) -> None:
    if u.q != v.q:
        raise WordError(f"alphabet mismatch: q={u.q} vs q={v.q}")
    if u.k != v.k:
        raise WordError(f"length mismatch: {u.k} vs {v.k}")


def self_overlap(w: Word) -> list[int]:
    """Sorted lengths i with w_1..w_i == w_{k-i+1}..w_k; always contains k."""
    s, k = w.symbols, w.k
    return [i for i in range(1, k + 1) if s[:i] == s[k - i:]]


def cross_overlap(u: Word, v: Word) -> list[int]:
    """Sorted i in [1, k] such that the length-i prefix of v is the length-i suffix of u."""
    _check_pair(u, v)
    k = u.k
    return [i for i in range(1, k + 1) if v.symbols[:i] == u.symbols[k - i:]]


def has_trivial_overlap(w: Word) -> bool:
    return self_overlap(w) == [w.k]


def correlation_poly(w: Word) -> IntPoly:
    coeffs = [0] * w.k
    for i in self_overlap(w):
        coeffs[i - 1] = 1
    return IntPoly(coeffs)


def phi_at(w: Word, t: int) -> int:
    """Correlation polynomial evaluated at an integer t >= 0 (exact)."""
    if t < 0:
        raise ValueError("phi_at expects t >= 0")
    return sum(t ** (i - 1) for i in self_overlap(w))


def overlap_from_phi_value(value: int, q: int, k: int) -> list[int]:
    """Read the overlap set back from the base-q digits of phi_w(q)."""
    out = []
    for i in range(1, k + 1):
        value, digit = divmod(value, q)
        if digit not in (0, 1):
            raise ValueError("value is not a 0/1 digit string in base q")
        if digit:
            out.append(i)
    if value:
        raise ValueError("value exceeds k digits")
    return out


def canonical_form(w: Word) -> Word:
    """Relabel symbols by order of first appearance; the lexicographically least
    word among all alphabet permutations of ``w``."""
    mapping: dict[int, int] = {}
    for s in w.symbols:
        if s not in mapping:
            mapping[s] = len(mapping)
    return Word(w.q, tuple(mapping[s] for s in w.symbols))


def permutation_equivalent(u: Word, v: Word) -> bool:
    return u.q == v.q and u.k == v.k and canonical_form(u) == canonical_form(v)


def permutation_between(u: Word, v: Word) -> tuple[int, ...] | None:
    """An alphabet bijection pi with pi(u) == v, or None."""
    if u.q != v.q or u.k != v.k:
        return None
    mapping: dict[int, int] = {}
    used: dict[int, int] = {}
    for a, b in zip(u.symbols, v.symbols):
        if mapping.setdefault(a, b) != b or used.setdefault(b, a) != a:
            return None
    free_src = [a for a in range(u.q) if a not in mapping]
    free_dst = [b for b in range(u.q) if b not in used]
    for a, b in zip(free_src, free_dst):
        mapping[a] = b
    return tuple(mapping[a] for a in range(u.q))
