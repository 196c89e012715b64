"""Exact counts of words avoiding w: B_n, generating functions, zeta
denominators and periodic points."""

from __future__ import annotations

import itertools
from fractions import Fraction
from dataclasses import dataclass

from .automaton import build_L, kmp_transitions
from .poly import IntPoly, charpoly, exact_div, matpow, poly_gcd
from .words import Word, correlation_poly


@dataclass(frozen=True)
class RationalGF:
    numerator: IntPoly
    denominator: IntPoly

    def __post_init__(self):
        if self.denominator[0] == 0:
            raise ValueError("denominator must have a nonzero constant term")

    def series(self, n: int) -> list[int]:
        """First n power-series coefficients (exact; requires den(0) = +-1)."""
        d0 = self.denominator[0]
        if d0 not in (1, -1):
            raise ValueError("series expansion needs a unit constant term")
        out: list[int] = []
        for m in range(n):
            acc = self.numerator[m]
            for j in range(1, min(m, self.denominator.degree) + 1):
                acc -= self.denominator[j] * out[m - j]
            out.append(acc * d0)
        return out

    def to_json(self) -> dict:
        return {
            "numerator": self.numerator.to_list(),
            "denominator": self.denominator.to_list(),
            "numerator_str": str(self.numerator),
            "denominator_str": str(self.denominator),
        }


def count_matrix(w: Word) -> list[list[int]]:
    """M[s][s'] = number of symbols taking prefix state s to s' without
    completing w; states 0..k-1."""
    delta = kmp_transitions(w)
    k = w.k
    m = [[0] * k for _ in range(k)]
    for s in range(k):
        for a in range(w.q):
            t = delta[s][a]
            if t < k:
                m[s][t] += 1
    return m


def count_avoiding(w: Word, n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return count_avoiding_upto(w, n)[n]


def count_avoiding_upto(w: Word, n: int) -> list[int]:
    """[B_0, ..., B_n] in one DP pass."""
    delta = kmp_transitions(w)
    k = w.k
    mass = [0] * k
    mass[0] = 1
    out = [1]
    for _ in range(n):
        nxt = [0] * k
        for s, c in enumerate(mass):
            if c:
                for a in range(w.q):
                    t = delta[s][a]
                    if t < k:
                        nxt[t] += c
        mass = nxt
        out.append(sum(mass))
    return out


def count_avoiding_naive(w: Word, n: int) -> int:
    k, s = w.k, w.symbols
    return sum(
        1 for x in itertools.product(range(w.q), repeat=n)
        if not any(x[i:i + k] == s for i in range(n - k + 1))
    )


def _normalize(num: IntPoly, den: IntPoly) -> RationalGF:
    g = poly_gcd(num, den)
    if g.degree > 0:
        num, den = exact_div(num, g), exact_div(den, g)
    if den[0] < 0:
        num, den = -num, -den
    return RationalGF(num, den)


def generating_function(w: Word) -> RationalGF:
    """G_w(t) = sum B_n t^n from the automaton recurrence, verified against the DP."""
    m = count_matrix(w)
    size = len(m)
    den = charpoly(m).reversed(size)  # det(I - tM)
    terms = count_avoiding_upto(w, 2 * size + 2)
    num = (IntPoly(terms) * den).truncate(size)
    gf = _normalize(num, den)
    check = 2 * gf.denominator.degree + 2
    if gf.series(check + 1) != terms[:check + 1]:
        raise ArithmeticError("generating function disagrees with the DP")
    return gf


def reversed_correlation(w: Word) -> IntPoly:
    """c_w(t) = t^{k-1} phi_w(1/t)."""
    return correlation_poly(w).reversed(w.k - 1)


def closed_form_gf(w: Word) -> RationalGF:
    """c_w(t) / (t^k + (1 - qt) c_w(t))."""
    c = reversed_correlation(w)
    den = IntPoly.monomial(w.k) + IntPoly([1, -w.q]) * c
    return _normalize(c, den)


def printed_formula_series(w: Word, n: int) -> list[Fraction]:
    """Series of t*phi_w(t) / (1 - (t - q) phi_w(q)).  Kept only to document
    that it does not reproduce B_n (its constant term is 0)."""
    phiq = correlation_poly(w)(w.q)
    den = [Fraction(1 + w.q * phiq), Fraction(-phiq)]
    num = correlation_poly(w).shift(1)
    out: list[Fraction] = []
    for m in range(n):
        acc = Fraction(num[m])
        if m >= 1:
            acc -= den[1] * out[m - 1]
        out.append(acc / den[0])
    return out


def zeta_denominator(w: Word) -> IntPoly:
    """det(I - tA) for the adjacency matrix A of L_w."""
    a = build_L(w).adjacency()
    return charpoly(a).reversed(len(a))


def periodic_count(w: Word, n: int) -> int:
    """Points of period n (divisors included): trace(A^n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a = build_L(w).adjacency()
    p = matpow(a, n)
    return sum(p[i][i] for i in range(len(p)))


def periodic_count_naive(w: Word, n: int) -> int:
    k, s = w.k, w.symbols
    total = 0
    for x in itertools.product(range(w.q), repeat=n):
        ext = x * (k // n + 2)
        if not any(ext[i:i + k] == s for i in range(n)):
            total += 1
    return total
