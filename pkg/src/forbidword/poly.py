"""Exact integer polynomials, characteristic polynomials and real-root isolation.

Everything here is exact (Python ints and :class:`fractions.Fraction`); floats
only appear when a root bracket is collapsed to a number for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with integer coefficients in ascending degree order.

    The stored tuple is canonical: trailing zeros are stripped, so the zero
    polynomial is the empty tuple.
    """

    coeffs: tuple[int, ...] = ()

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPoly":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_descending(cls, coeffs: Sequence[int]) -> "IntPoly":
        return cls(list(reversed(list(coeffs))))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "IntPoly | int") -> "IntPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other: "IntPoly | int") -> "IntPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: "IntPoly | int") -> "IntPoly":
        return _as_poly(other) - self

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __call__(self, t):
        """Horner evaluation; exact for int and Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def reversed(self, degree: int | None = None) -> "IntPoly":
        """Return t^degree * p(1/t) (degree defaults to deg p)."""
        n = self.degree if degree is None else degree
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        padded = list(self.coeffs) + [0] * (n + 1 - len(self.coeffs))
        return IntPoly(reversed(padded))

    def strip_t_power(self) -> "IntPoly":
        """Divide by the largest power of t dividing the polynomial."""
        c = list(self.coeffs)
        while c and c[0] == 0:
            c.pop(0)
        return IntPoly(c)

    def shift(self, n: int) -> "IntPoly":
        """Multiply by t^n."""
        return IntPoly([0] * n + list(self.coeffs)) if self.coeffs else IntPoly()

    def truncate(self, n: int) -> "IntPoly":
        """Keep the terms of degree < n."""
        return IntPoly(self.coeffs[:n])

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = "t" if i == 1 else f"t^{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"


def _as_poly(x: "IntPoly | int") -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    return IntPoly([x])


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

def charpoly(matrix: Sequence[Sequence[int]]) -> IntPoly:
    """det(tI - M) for an integer matrix, by Berkowitz's division-free algorithm."""
    M = [[int(x) for x in row] for row in matrix]
    n = len(M)
    # Descending coefficients of the char poly of the leading r x r block.
    vec = [1]
    for r in range(n):
        a = M[r][r]
        row = M[r][:r]
        col = [M[i][r] for i in range(r)]
        sub = [M[i][:r] for i in range(r)]
        # Toeplitz column: 1, -a, -R S, -R A S, ..., -R A^{r-1} S
        toe = [1, -a]
        s = col
        for _ in range(r):
            toe.append(-sum(x * y for x, y in zip(row, s)))
            s = [sum(sub[i][j] * s[j] for j in range(r)) for i in range(r)]
        new = []
        for i in range(r + 2):
            new.append(sum(toe[i - j] * vec[j] for j in range(min(i, r) + 1) if i - j < len(toe)))
        vec = new
    return IntPoly.from_descending(vec)


def minor(matrix: Sequence[Sequence], i: int, j: int) -> list[list]:
    return [list(row[:j]) + list(row[j + 1:]) for r, row in enumerate(matrix) if r != i]


def poly_matrix_det(matrix: Sequence[Sequence[IntPoly]]) -> IntPoly:
    """Determinant of a matrix with IntPoly entries by Laplace expansion (small sizes only)."""
    n = len(matrix)
    if n == 0:
        return IntPoly([1])
    if n == 1:
        return matrix[0][0]
    total = IntPoly()
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        term = entry * poly_matrix_det(minor(matrix, 0, j))
        total = total + term if j % 2 == 0 else total - term
    return total


def tI_minus(matrix: Sequence[Sequence[int]]) -> list[list[IntPoly]]:
    n = len(matrix)
    return [[IntPoly([-matrix[i][j], 1 if i == j else 0]) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def matpow(A: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    size = len(A)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    base = [list(r) for r in A]
    while n:
        if n & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# Rational polynomial helpers (lists of Fractions, ascending)
# ---------------------------------------------------------------------------

def _trim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _qdivmod(num: list, den: list) -> tuple[list, list]:
    num = _trim([Fraction(x) for x in num])
    den = _trim([Fraction(x) for x in den])
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        quot[shift] = factor
        for i, d in enumerate(den):
            num[i + shift] -= factor * d
        num = _trim(num)
    return _trim(quot), num


def _qgcd(a: list, b: list) -> list:
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    while b:
        _, r = _qdivmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [x / lead for x in a]


def _qderiv(p: list) -> list:
    return _trim([i * c for i, c in enumerate(p) if i > 0])


def _qeval(p: list, t) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def to_primitive(p: list) -> IntPoly:
    """Scale a rational polynomial to a primitive integer one (positive leading coefficient)."""
    p = _trim([Fraction(x) for x in p])
    if not p:
        return IntPoly()
    from math import gcd, lcm

    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return IntPoly(ints)


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd of two integer polynomials."""
    return to_primitive(_qgcd(list(a.coeffs), list(b.coeffs)))


def exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Divide exactly; raises if the division leaves a remainder or non-integer quotient."""
    q, r = _qdivmod(list(a.coeffs), list(b.coeffs))
    if r:
        raise ArithmeticError("polynomial division is not exact")
    if any(c.denominator != 1 for c in q):
        raise ArithmeticError("quotient has non-integer coefficients")
    return IntPoly(int(c) for c in q)


# ---------------------------------------------------------------------------
# Real roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealRoot:
    """An isolated real root: lo <= root <= hi, with hi - lo <= the requested tolerance."""

    lo: Fraction
    hi: Fraction
    multiplicity: int

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)


def _squarefree_parts(p: list) -> list[tuple[list, int]]:
    """Yun's algorithm over Q: [(factor, multiplicity), ...] with squarefree coprime factors."""
    p = _trim([Fraction(x) for x in p])
    out = []
    dp = _qderiv(p)
    a = _qgcd(p, dp)
    b, _ = _qdivmod(p, a) if a else (p, [])
    c, _ = _qdivmod(dp, a) if a else (dp, [])
    d = _trim([x - y for x, y in _zip_pad(c, _qderiv(b))])
    i = 1
    while len(b) > 1:
        a = _qgcd(b, d) if d else b
        if len(a) > 1:
            out.append((a, i))
        b, _ = _qdivmod(b, a)
        c, _ = _qdivmod(d, a) if d else ([], [])
        d = _trim([x - y for x, y in _zip_pad(c, _qderiv(b))])
        i += 1
    return out


def _zip_pad(a: list, b: list):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def _sturm_chain(p: list) -> list[list]:
    chain = [p, _qderiv(p)]
    while chain[-1] and len(chain[-1]) > 1:
        _, r = _qdivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-x for x in r])
    return [c for c in chain if c]


def _sign_changes(chain: list[list], t: Fraction) -> int:
    signs = []
    for c in chain:
        v = _qeval(c, t)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def _cauchy_bound(p: list) -> Fraction:
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def real_roots(poly: IntPoly, tol: float = 1e-12) -> list[RealRoot]:
    """All real roots of ``poly`` in increasing order, each bracketed to width <= tol."""
    if poly.degree < 1:
        return []
    tol_q = Fraction(tol)
    roots: list[RealRoot] = []
    for factor, mult in _squarefree_parts(list(poly.coeffs)):
        chain = _sturm_chain(factor)
        bound = _cauchy_bound(factor)
        stack = [(-bound, bound)]
        # Roots exactly at interval endpoints are handled by nudging the split point.
        while stack:
            lo, hi = stack.pop()
            n = _sign_changes(chain, lo) - _sign_changes(chain, hi)
            if n == 0:
                continue
            if n == 1:
                roots.append(_refine(factor, lo, hi, tol_q, mult))
                continue
            mid = (lo + hi) / 2
            if _qeval(factor, mid) == 0:
                mid = mid + (hi - lo) / 7
            stack.append((lo, mid))
            stack.append((mid, hi))
    roots.sort(key=lambda r: r.lo)
    return roots


def _refine(p: list, lo: Fraction, hi: Fraction, tol: Fraction, mult: int) -> RealRoot:
    """Bisection on (lo, hi] known to hold exactly one simple root of squarefree p."""
    fhi = _qeval(p, hi)
    if fhi == 0:
        return RealRoot(hi, hi, mult)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = _qeval(p, mid)
        if fm == 0:
            return RealRoot(mid, mid, mult)
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo = mid
    return RealRoot(lo, hi, mult)


def largest_real_root(poly: IntPoly, tol: float = 1e-12) -> RealRoot:
    roots = real_roots(poly, tol)
    if not roots:
        raise ValueError(f"polynomial {poly} has no real root")
    return roots[-1]
