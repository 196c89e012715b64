"""Patterns on finite subsets of Z^d: agreement sets, replacement, avoidance
counts on finite shapes, periodic configurations and the lexicographic
replacement map for 2x2 blocks."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .words import Word

Vec = tuple[int, ...]

DEFAULT_BUDGET = 24
MAX_PLACEMENTS = 22


class PatternError(ValueError):
    """Malformed pattern, shape or lattice, or a violated precondition."""


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the configured budget."""


def _add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def _neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


@dataclass(frozen=True)
class Shape:
    d: int
    points: tuple[Vec, ...]

    def __post_init__(self):
        pts = sorted({tuple(int(c) for c in p) for p in self.points})
        if not pts:
            raise PatternError("shapes must be nonempty")
        if any(len(p) != self.d for p in pts):
            raise PatternError(f"every point must have {self.d} coordinates")
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def box(cls, dims: Sequence[int], origin: Sequence[int] | None = None) -> "Shape":
        origin = tuple(origin) if origin is not None else (0,) * len(dims)
        if any(n < 1 for n in dims):
            raise PatternError(f"box sides must be positive, got {tuple(dims)}")
        pts = [_add(origin, p) for p in itertools.product(*(range(n) for n in dims))]
        return cls(len(dims), tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._set

    @property
    def _set(self) -> frozenset:
        return frozenset(self.points)

    def translate(self, i: Vec) -> "Shape":
        return Shape(self.d, tuple(_add(p, i) for p in self.points))

    def differences(self) -> set[Vec]:
        return {_sub(a, b) for a in self.points for b in self.points}


@dataclass(frozen=True)
class PatternD:
    shape: Shape
    values: tuple[int, ...]
    q: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) != len(self.shape.points):
            raise PatternError("values must be given on exactly the shape's points")
        if self.q < 2:
            raise PatternError(f"alphabet size must be at least 2, got {self.q}")
        bad = [v for v in vals if not 0 <= v < self.q]
        if bad:
            raise PatternError(f"symbols {bad} outside alphabet [0, {self.q})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_map(cls, cells: dict, q: int) -> "PatternD":
        if not cells:
            raise PatternError("patterns must be nonempty")
        items = sorted((tuple(p), v) for p, v in cells.items())
        shape = Shape(len(items[0][0]), tuple(p for p, _ in items))
        return cls(shape, tuple(v for _, v in items), q)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], q: int) -> "PatternD":
        """rows[y][x] is the symbol at (x, y); None or ' ' leaves the cell out."""
        cells = {}
        for y, row in enumerate(rows):
            for x, v in enumerate(row):
                if v is None or v == " ":
                    continue
                cells[(x, y)] = int(v)
        return cls.from_map(cells, q)

    @classmethod
    def from_word(cls, w: Word) -> "PatternD":
        """The word w_1 ... w_k placed on {1, ..., k} in Z."""
        return cls.from_map({(i + 1,): s for i, s in enumerate(w.symbols)}, w.q)

    @classmethod
    def constant(cls, shape: Shape, value: int, q: int) -> "PatternD":
        return cls(shape, (value,) * len(shape), q)

    @classmethod
    def from_json(cls, data: dict | str) -> "PatternD":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            d, q = int(data["d"]), int(data["q"])
            cells = {tuple(c["pos"]): int(c["val"]) for c in data["cells"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise PatternError(f"bad pattern JSON: {exc}") from exc
        if any(len(p) != d for p in cells):
            raise PatternError(f"every position must have {d} coordinates")
        return cls.from_map(cells, q)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "cells": [{"pos": list(p), "val": v} for p, v in self.items()],
        }

    @property
    def d(self) -> int:
        return self.shape.d

    def items(self):
        return zip(self.shape.points, self.values)

    def as_dict(self) -> dict[Vec, int]:
        return dict(self.items())

    def __getitem__(self, p) -> int:
        return self.as_dict()[tuple(p)]


@dataclass(frozen=True)
class LatticeSubgroup:
    """Full-rank subgroup of Z^d spanned by the rows of ``basis``."""

    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        b = tuple(tuple(int(x) for x in row) for row in self.basis)
        d = len(b)
        if d == 0 or any(len(row) != d for row in b):
            raise PatternError("lattice basis must be a square integer matrix")
        object.__setattr__(self, "basis", b)
        if self.index == 0:
            raise PatternError("lattice basis is singular")

    @classmethod
    def diagonal(cls, *periods: int) -> "LatticeSubgroup":
        d = len(periods)
        return cls(tuple(tuple(p if i == j else 0 for j in range(d)) for i, p in enumerate(periods)))

    @classmethod
    def parse(cls, text: str) -> "LatticeSubgroup":
        """'a,b;c,d' with one basis vector per ';'-separated group."""
        try:
            rows = [tuple(int(x) for x in part.split(",")) for part in text.split(";")]
        except ValueError as exc:
            raise PatternError(f"bad lattice {text!r}") from exc
        return cls(tuple(rows))

    @property
    def d(self) -> int:
        return len(self.basis)

    @property
    def index(self) -> int:
        return abs(_int_det([list(r) for r in self.basis]))

    def hermite(self) -> list[list[int]]:
        """Lower-triangular row basis with positive diagonal."""
        h = [list(r) for r in self.basis]
        d = self.d
        for col in range(d - 1, -1, -1):
            rows = list(range(col + 1))
            while True:
                nz = [r for r in rows if h[r][col] != 0]
                piv = min(nz, key=lambda r: abs(h[r][col]))
                done = True
                for r in nz:
                    if r != piv:
                        f = h[r][col] // h[piv][col]
                        h[r] = [a - f * b for a, b in zip(h[r], h[piv])]
                        if h[r][col] != 0:
                            done = False
                if done:
                    break
            h[col], h[piv] = h[piv], h[col]
            if h[col][col] < 0:
                h[col] = [-a for a in h[col]]
        return h

    def reducer(self):
        h = self.hermite()
        d = self.d

        def reduce(v: Vec) -> Vec:
            x = list(v)
            for i in range(d - 1, -1, -1):
                c = x[i] // h[i][i]
                if c:
                    x = [a - c * b for a, b in zip(x, h[i])]
            return tuple(x)

        return reduce

    def fundamental_domain(self) -> list[Vec]:
        """Box of coset representatives read off the Hermite form."""
        h = self.hermite()
        return [tuple(p) for p in itertools.product(*(range(h[i][i]) for i in range(self.d)))]


def _int_det(m: list[list[int]]) -> int:
    # fraction-free Bareiss elimination
    m = [row[:] for row in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# -- agreement sets -------------------------------------------------------------

def agree_set(u: PatternD) -> set[Vec]:
    """Differences i in S - S with u_j = u_{j-i} on S and (S + i)."""
    vals = u.as_dict()
    out = set()
    for i in u.shape.differences():
        if all(vals.get(_sub(j, i), v) == v for j, v in vals.items()):
            out.add(i)
    return out


def agree_contained(u: PatternD, v: PatternD) -> Vec | None:
    """None if agree(u) is a subset of agree(v), else an offending difference."""
    missing = agree_set(u) - agree_set(v)
    return min(missing) if missing else None


def _check_same_shape(u: PatternD, v: PatternD) -> None:
    if u.shape != v.shape or u.q != v.q:
        raise PatternError("patterns must share shape and alphabet")


def mutually_replaceable_fullshift(u: PatternD, v: PatternD) -> bool:
    _check_same_shape(u, v)
    return agree_set(u) == agree_set(v)


def occurs_at(w: PatternD | dict, u: PatternD, i: Vec) -> bool:
    vals = w.as_dict() if isinstance(w, PatternD) else w
    return all(vals.get(_add(i, s)) == x for s, x in u.items())


def replace_occurrences(w: PatternD, u: PatternD, v: PatternD,
                        sites: Iterable[Vec]) -> PatternD:
    """Write v over every translate i + S, i in sites, where w shows u."""
    _check_same_shape(u, v)
    sites = sorted(tuple(i) for i in sites)
    vals = w.as_dict()
    for i in sites:
        for s in u.shape.points:
            if _add(i, s) not in vals:
                raise PatternError(f"translate by {i} leaves the support at {_add(i, s)}")
        if not occurs_at(vals, u, i):
            j = next(_add(i, s) for s, x in u.items() if vals[_add(i, s)] != x)
            raise PatternError(f"u does not occur at {i}: mismatch at site {j}")
    missing = agree_set(u) - agree_set(v)
    if missing:
        pair = next(((a, b) for a, b in itertools.combinations(sites, 2)
                     if _sub(b, a) in missing), None)
        if pair:
            raise PatternError(f"agree(u) is not contained in agree(v): sites {pair[0]}, "
                               f"{pair[1]} differ by {_sub(pair[1], pair[0])}")
        raise PatternError(f"agree(u) is not contained in agree(v): {min(missing)}")
    out = dict(vals)
    for i in sites:
        for s, x in v.items():
            out[_add(i, s)] = x
    # containment makes overlapping writes agree; double check
    for i in sites:
        if not occurs_at(out, v, i):
            raise AssertionError(f"inconsistent replacement at {i}")
    return PatternD.from_map(out, w.q)


# -- counting on finite shapes ------------------------------------------------------

def _placements(t: Shape, u: PatternD) -> list[Vec]:
    """Translations i with i + S inside T."""
    tset = t._set
    anchor = u.shape.points[0]
    out = []
    for p in t.points:
        i = _sub(p, anchor)
        if all(_add(i, s) in tset for s in u.shape.points):
            out.append(i)
    return out


def _constraints(t: Shape, patterns: Sequence[PatternD]) -> list[tuple[tuple[Vec, ...], tuple[int, ...]]]:
    cons = []
    for u in patterns:
        for i in _placements(t, u):
            cons.append((tuple(_add(i, s) for s in u.shape.points), u.values))
    return cons


def _check_budget(t: Shape, q: int, budget: float) -> None:
    bits = len(t) * math.log2(q)
    if bits > budget:
        raise BudgetExceeded(f"|T| log2 q = {bits:.1f} exceeds the budget of {budget} bits")


def _check_patterns(t: Shape, q: int, patterns: Sequence[PatternD]) -> None:
    for p in patterns:
        if p.d != t.d:
            raise PatternError(f"pattern dimension {p.d} differs from shape dimension {t.d}")
        if p.q != q:
            raise PatternError("all patterns must share the alphabet")


def cell_order(t: Shape, order: str = "column") -> list[Vec]:
    """'column': first coordinate varies slowest (column-major over T);
    'row': last coordinate varies slowest."""
    if order == "column":
        return list(t.points)
    if order == "row":
        return sorted(t.points, key=lambda p: tuple(reversed(p)))
    raise PatternError(f"unknown enumeration order {order!r}")


def _frontier_count(cells: list[Vec], q: int, cons, pins: dict[Vec, int] | None = None) -> int:
    """Number of assignments on ``cells`` matching no constraint.

    Cells are assigned in the given order; the state keeps only the values
    still needed by constraints that are not yet fully assigned."""
    pins = pins or {}
    pos = {c: n for n, c in enumerate(cells)}
    last = [max(pos[c] for c in cs) for cs, _ in cons]
    finishing: list[list[int]] = [[] for _ in cells]
    for n, m in enumerate(last):
        finishing[m].append(n)
    # a cell stays live while some constraint through it is unfinished
    release = {c: pos[c] for c in cells}
    for (cs, _), m in zip(cons, last):
        for c in cs:
            release[c] = max(release[c], m)

    live: tuple[Vec, ...] = ()
    states: dict[tuple[int, ...], int] = {(): 1}
    for n, c in enumerate(cells):
        ext = live + (c,)
        idx = {x: m for m, x in enumerate(ext)}
        checks = [([idx[x] for x in cons[m][0]], cons[m][1]) for m in finishing[n]]
        keep_cells = tuple(x for x in ext if release[x] > n)
        keep = [idx[x] for x in keep_cells]
        symbols = [pins[c]] if c in pins else range(q)
        nxt: dict[tuple[int, ...], int] = {}
        for st, cnt in states.items():
            for a in symbols:
                full = st + (a,)
                if any(all(full[m] == v for m, v in zip(ix, vals)) for ix, vals in checks):
                    continue
                key = tuple(full[m] for m in keep)
                nxt[key] = nxt.get(key, 0) + cnt
        states, live = nxt, keep_cells
    return sum(states.values())


def count_avoiding_patterns(t: Shape, u: PatternD, forbidden: Sequence[PatternD] = (),
                            budget: float = DEFAULT_BUDGET, order: str = "column") -> int:
    """Assignments on T with no translate of u, nor of any member of F, lying
    fully inside T (locally allowed patterns)."""
    _check_patterns(t, u.q, [u, *forbidden])
    _check_budget(t, u.q, budget)
    return _frontier_count(cell_order(t, order), u.q, _constraints(t, [u, *forbidden]))


def count_avoiding_bruteforce(t: Shape, u: PatternD, forbidden: Sequence[PatternD] = (),
                              budget: float = DEFAULT_BUDGET) -> int:
    """Same count by listing every assignment; chunked numpy evaluation."""
    _check_patterns(t, u.q, [u, *forbidden])
    _check_budget(t, u.q, budget)
    return _vector_count(list(t.points), u.q, _constraints(t, [u, *forbidden]))


def _vector_count(cells: list[Vec], q: int, cons, chunk_bits: int = 16) -> int:
    n = len(cells)
    idx = {c: m for m, c in enumerate(cells)}
    plan = [([idx[c] for c in cs], vals) for cs, vals in cons]
    total = q ** n
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    step = q ** max(1, min(n, chunk_bits))
    count = 0
    for start in range(0, total, step):
        codes = np.arange(start, min(total, start + step), dtype=np.int64)
        grid = (codes[:, None] // powers[None, :]) % q
        bad = np.zeros(len(codes), dtype=bool)
        for ix, vals in plan:
            bad |= np.all(grid[:, ix] == np.asarray(vals)[None, :], axis=1)
        count += int((~bad).sum())
    return count


def inclusion_exclusion_count(t: Shape, u: PatternD, forbidden: Sequence[PatternD] = (),
                              budget: float = DEFAULT_BUDGET,
                              max_placements: int = MAX_PLACEMENTS) -> int:
    """sum over placement sets P of (-1)^|P| times the F-avoiding assignments
    showing u at every translate in P."""
    _check_patterns(t, u.q, [u, *forbidden])
    _check_budget(t, u.q, budget)
    places = _placements(t, u)
    if len(places) > max_placements:
        raise BudgetExceeded(f"{len(places)} placements exceed the limit of {max_placements}")
    cells = cell_order(t)
    f_cons = _constraints(t, forbidden)
    q = u.q
    total = 0

    def term(pins: dict[Vec, int]) -> int:
        if not f_cons:
            return q ** (len(cells) - len(pins))
        return _frontier_count(cells, q, f_cons, pins)

    def walk(start: int, pins: dict[Vec, int], sign: int) -> None:
        nonlocal total
        total += sign * term(pins)
        for m in range(start, len(places)):
            i = places[m]
            new = dict(pins)
            ok = True
            for s, x in u.items():
                c = _add(i, s)
                if new.setdefault(c, x) != x:
                    ok = False
                    break
            # an inconsistent pin set stays inconsistent in every superset
            if ok:
                walk(m + 1, new, -sign)

    walk(0, {}, 1)
    return total


# -- periodic configurations -----------------------------------------------------------

def periodic_count_multidim(lattice: LatticeSubgroup, u: PatternD,
                            forbidden: Sequence[PatternD] = (),
                            budget: float = DEFAULT_BUDGET) -> int:
    """Lambda-periodic configurations in which no translate of u or of a
    member of F occurs anywhere in Z^d."""
    _check_patterns(Shape(lattice.d, ((0,) * lattice.d,)), u.q, [u, *forbidden])
    dom = lattice.fundamental_domain()
    bits = len(dom) * math.log2(u.q)
    if bits > budget:
        raise BudgetExceeded(f"index log2 q = {bits:.1f} exceeds the budget of {budget} bits")
    reduce = lattice.reducer()
    cons = []
    for p in (u, *forbidden):
        for i in dom:
            cons.append((tuple(reduce(_add(i, s)) for s in p.shape.points), p.values))
    return _vector_count(dom, u.q, cons)


def periodic_count_unrolled(periods: Sequence[int], u: PatternD,
                            forbidden: Sequence[PatternD] = ()) -> int:
    """Oracle for the box lattice p_1 Z x ... x p_d Z: write each assignment
    on the period box out over a window two periods wide plus the pattern
    extent, and search the window for every pattern anchored in one period."""
    pats = [u, *forbidden]
    d = len(periods)
    lo = [min(min(pt[a] for pt in p.shape.points) for p in pats) for a in range(d)]
    hi = [max(max(pt[a] for pt in p.shape.points) for p in pats) for a in range(d)]
    window = list(itertools.product(*(range(lo[a], 2 * periods[a] + hi[a]) for a in range(d))))
    box = list(itertools.product(*(range(n) for n in periods)))
    count = 0
    for vals in itertools.product(range(u.q), repeat=len(box)):
        x = dict(zip(box, vals))
        big = {c: x[tuple(c[a] % periods[a] for a in range(d))] for c in window}
        count += not any(occurs_at(big, p, i) for p in pats for i in box)
    return count


# -- lexicographic replacement ------------------------------------------------------------

def lex_key(p: Vec) -> Vec:
    """(i, j) > (k, l) iff j > l, or j = l and i > k."""
    return tuple(reversed(p))


@dataclass
class InjectionCertificate:
    sites: list[Vec]
    inverse_sites: list[Vec]
    recovered: bool
    image_avoids_from: bool
    extension_pattern: PatternD
    extension_absent: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sites": [list(s) for s in self.sites],
            "inverse_sites": [list(s) for s in self.inverse_sites],
            "recovered": self.recovered,
            "image_avoids_from": self.image_avoids_from,
            "extension_pattern": self.extension_pattern.to_json(),
            "extension_absent": self.extension_absent,
            "notes": self.notes,
        }


def _square_side(p: PatternD) -> int:
    pts = p.shape.points
    n = math.isqrt(len(pts))
    if p.d != 2 or Shape.box((n, n)) != p.shape:
        raise PatternError("expected an n x n pattern anchored at the origin")
    return n


def _check_injection_inputs(p_from: PatternD, p_to: PatternD, grid: PatternD) -> int:
    n = _square_side(p_from)
    if p_to.shape != p_from.shape:
        raise PatternError("p_from and p_to must have the same n x n shape")
    if p_from.q != 2 or p_to.q != 2 or grid.q != 2:
        raise PatternError("the lexicographic replacement is defined for binary patterns")
    if any(p_from.values):
        raise PatternError("p_from must be the all-zero block")
    if sum(p_to.values) != 1:
        raise PatternError("p_to must contain exactly one 1")
    m = math.isqrt(len(grid.shape))
    if Shape.box((m, m)) != grid.shape:
        raise PatternError("grid must be an m x m square anchored at the origin")
    return n


def _plan(p: PatternD, m: int, anchors) -> list[list[tuple[int, int]]]:
    """Flat-index (cell, value) lists of p translated to each anchor of an
    m x m box whose cells are numbered in sorted order."""
    return [[((a[0] + s[0]) * m + a[1] + s[1], x) for s, x in p.items()] for a in anchors]


def _hits(cells: list[int], plan) -> bool:
    return all(cells[c] == x for c, x in plan)


def _replace_sweep(cells: list[int], src: PatternD, dst: PatternD, m: int, n: int,
                   largest: bool) -> list[Vec]:
    """Replace occurrences of src by dst one at a time, always taking the
    lexicographically smallest (or largest) current occurrence."""
    anchors = sorted(itertools.product(range(m - n + 1), repeat=2), key=lex_key,
                     reverse=largest)
    src_plan, dst_plan = _plan(src, m, anchors), _plan(dst, m, anchors)
    done = []
    while True:
        hit = next((k for k, pl in enumerate(src_plan) if _hits(cells, pl)), None)
        if hit is None:
            return done
        for c, x in dst_plan[hit]:
            cells[c] = x
        done.append(anchors[hit])


def _occurs_anywhere(cells: list[int], p: PatternD, m: int) -> bool:
    side = _square_side(p)
    anchors = list(itertools.product(range(m - side + 1), repeat=2))
    return any(_hits(cells, pl) for pl in _plan(p, m, anchors))


def extension_pattern(p_from: PatternD, p_to: PatternD) -> PatternD:
    """The (n+1) x (n+1) zero block after reverse-lexicographic replacement of
    p_from by p_to; it lies in the shift avoiding p_from but never in an image
    of the forward map."""
    n = _square_side(p_from)
    cells = [0] * (n + 1) ** 2
    _replace_sweep(cells, p_from, p_to, n + 1, n, largest=True)
    return PatternD(Shape.box((n + 1, n + 1)), tuple(cells), 2)


def lex_replacement_injection(p_from: PatternD, p_to: PatternD, grid: PatternD,
                              ext: PatternD | None = None) -> tuple[PatternD, InjectionCertificate]:
    """Replace occurrences of p_from by p_to in lexicographic order until none
    remain, then replay the inverse in reverse lexicographic order.

    The map is injective on grids avoiding p_to; other grids are processed
    the same way and flagged in the certificate notes."""
    n = _check_injection_inputs(p_from, p_to, grid)
    m = math.isqrt(len(grid.shape))
    start = list(grid.values)
    notes = []
    if _occurs_anywhere(start, p_to, m):
        notes.append("grid already contains p_to; it lies outside the injection's domain")
    cells = start[:]
    sites = _replace_sweep(cells, p_from, p_to, m, n, largest=False)
    back = cells[:]
    inverse = _replace_sweep(back, p_to, p_from, m, n, largest=True)
    ext = ext if ext is not None else extension_pattern(p_from, p_to)
    cert = InjectionCertificate(
        sites=sites,
        inverse_sites=inverse,
        recovered=back == start,
        image_avoids_from=not _occurs_anywhere(cells, p_from, m),
        extension_pattern=ext,
        extension_absent=m <= n or not _occurs_anywhere(cells, ext, m),
        notes=notes,
    )
    return PatternD(grid.shape, tuple(cells), 2), cert


def single_one_block(n: int, pos: Vec) -> PatternD:
    shape = Shape.box((n, n))
    return PatternD(shape, tuple(int(p == tuple(pos)) for p in shape.points), 2)


def grid_from_code(code: int, m: int) -> PatternD:
    """Binary m x m grid whose cells, in sorted order, spell code (MSB first)."""
    shape = Shape.box((m, m))
    n = len(shape)
    return PatternD(shape, tuple((code >> (n - 1 - b)) & 1 for b in range(n)), 2)
