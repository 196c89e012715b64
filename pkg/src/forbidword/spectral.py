"""Characteristic polynomials, Perron data, the D(u, v) condition and entropy
comparison, including the memory-one ambient case."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .automaton import (
    LabeledDigraph, Star, State, build_L, build_L_restricted, d_value,
    is_irreducible,
)
from .poly import (
    IntPoly, RealRoot, charpoly, largest_real_root, minor, poly_matrix_det,
    real_roots, tI_minus,
)
from .words import Word, WordError, correlation_poly, phi_at, self_overlap


# -- full shift ---------------------------------------------------------------

def char_poly(w: Word) -> IntPoly:
    """chi_w(t) = (t - q) phi_w(t) + 1."""
    return IntPoly([-w.q, 1]) * correlation_poly(w) + 1


def adjacency_char_poly(w: Word) -> IntPoly:
    """det(tI - A) for L_w with its factor of t removed."""
    return charpoly(build_L(w).adjacency()).strip_t_power()


def perron_root(w: Word, tol: float = 1e-12) -> RealRoot:
    return largest_real_root(char_poly(w), tol)


def perron_eigenvalue(w: Word, tol: float = 1e-12) -> float:
    return perron_root(w, tol).value


def entropy(w: Word, tol: float = 1e-12) -> float:
    return math.log(perron_eigenvalue(w, tol))


@dataclass
class SpectralReport:
    char_poly: IntPoly
    lam: float
    entropy: float
    vertices: tuple
    right: list[float]
    left: list[float]
    residual: float
    irreducible: bool
    checks: dict = field(default_factory=dict)

    def vector_dict(self, which: str = "right") -> dict[str, float]:
        vec = self.right if which == "right" else self.left
        return {str(v): x for v, x in zip(self.vertices, vec)}


def _null_vector(m: np.ndarray) -> np.ndarray:
    """Unit vector spanning the (numerical) kernel of m, sign-fixed to be
    nonnegative in sum."""
    _, _, vh = np.linalg.svd(m)
    x = vh[-1]
    if x.sum() < 0:
        x = -x
    x[np.abs(x) < 1e-15] = 0.0
    return x / np.abs(x).sum()


def perron_vectors(g: LabeledDigraph, tol: float = 1e-9,
                   lam: float | None = None) -> tuple[float, np.ndarray, np.ndarray, float]:
    """Perron value and right/left eigenvectors (normalized to sum 1).

    The eigenvalue comes from exact root isolation of det(tI - A); the
    vectors are the kernels of A - lam I and its transpose.
    """
    a = np.array(g.adjacency(), dtype=float)
    if lam is None:
        lam = largest_real_root(charpoly(g.adjacency()), 1e-14).value
    n = len(a)
    r = _null_vector(a - lam * np.eye(n))
    l = _null_vector(a.T - lam * np.eye(n))
    res = max(np.abs(a @ r - lam * r).max(), np.abs(l @ a - lam * l).max())
    if res > tol:
        raise ArithmeticError(f"eigenvector residual {res:.3g} exceeds tolerance {tol}")
    return lam, r, l, float(res)


def _ratio_bound(w: Word, lam: float, i: int) -> float:
    """lam - sum_{a != w_{i+1}} (lam - q + 1)^{d_i(a) - i}, stars counted as 0."""
    c = lam - w.q + 1
    nxt = w.at(i + 1)
    return lam - sum(c ** (d_value(w, i, a) - i) for a in range(w.q) if a != nxt)


def spectral_report(w: Word, tol: float = 1e-9) -> SpectralReport:
    """Perron data for L_w with the full-shift eigenvector relations checked."""
    g = build_L(w)
    lam = perron_eigenvalue(w, 1e-14)
    lam, r, l, res = perron_vectors(g, tol, lam)
    irreducible = is_irreducible(g)
    pos = {v: n for n, v in enumerate(g.vertices)}
    c = lam - w.q + 1
    checks: dict = {"gap_in_unit_interval": 0 < c < 1 if irreducible else 0 <= c < 1}
    stars = [v for v in g.vertices if isinstance(v, Star)]
    r1 = r[pos[State(1)]]
    checks["r1_equals_gap_times_rstar"] = all(abs(r1 - c * r[pos[s]]) <= tol for s in stars)
    decreasing, refined = True, True
    for i in range(1, w.k - 1):
        ri, rn = r[pos[State(i)]], r[pos[State(i + 1)]]
        if rn > c * ri + tol:
            decreasing = False
        if rn > _ratio_bound(w, lam, i) * ri + tol:
            refined = False
    checks["r_decay"] = decreasing
    checks["r_refined_ratio_bound"] = refined
    if irreducible:
        checks["right_positive"] = bool((r > 0).all())
        checks["left_positive"] = bool((l > 0).all())
    else:
        checks["right_nonnegative"] = bool((r >= -tol).all())
        checks["left_nonnegative"] = bool((l >= -tol).all())
    return SpectralReport(char_poly(w), lam, math.log(lam), g.vertices,
                          r.tolist(), l.tolist(), res, irreducible, checks)


# -- condition D --------------------------------------------------------------

@dataclass(frozen=True)
class DCertificate:
    per_state: dict  # i -> tuple pi_i with pi_i[a] the matched symbol
    strict_witness: tuple[int, int] | None


def _d_row(w: Word, i: int) -> list[int]:
    return [d_value(w, i, a) for a in range(w.q)]


def _match_row(du: list[int], dv: list[int]) -> tuple[int, ...] | None:
    """A permutation pi with du[a] <= dv[pi[a]] for all a, or None."""
    q = len(du)
    ou = sorted(range(q), key=lambda a: (-du[a], a))
    ov = sorted(range(q), key=lambda b: (-dv[b], b))
    if all(du[a] <= dv[b] for a, b in zip(ou, ov)):
        pi = [0] * q
        for a, b in zip(ou, ov):
            pi[a] = b
        return tuple(pi)
    # full bipartite matching; only reached if the greedy pairing fails
    g = nx.Graph()
    left = [("u", a) for a in range(q)]
    g.add_nodes_from(left, bipartite=0)
    g.add_nodes_from((("v", b) for b in range(q)), bipartite=1)
    g.add_edges_from((("u", a), ("v", b)) for a in range(q) for b in range(q) if du[a] <= dv[b])
    match = nx.bipartite.maximum_matching(g, top_nodes=left)
    if sum(1 for x in left if x in match) < q:
        return None
    return tuple(match[("u", a)][1] for a in range(q))


def condition_D(u: Word, v: Word) -> DCertificate | None:
    """Certificate that d^u_i(a) <= d^v_i(pi_i(a)) for every i and a, stars
    as 0 and d_{k-1}(w_k) read as k.  Constant words come first: D(1^k, w)."""
    if u.q != v.q or u.k != v.k:
        raise WordError("condition D needs words of equal length and alphabet")
    if u.k < 2:
        raise WordError("condition D needs k >= 2")
    per_state = {}
    witness = None
    both_irreducible = is_irreducible(build_L(u)) and is_irreducible(build_L(v))
    for i in range(1, u.k):
        du, dv = _d_row(u, i), _d_row(v, i)
        pi = _match_row(du, dv)
        if pi is None:
            return None
        per_state[i] = pi
        if witness is None and (i <= u.k - 2 or both_irreducible):
            for a in range(u.q):
                if du[a] < dv[pi[a]]:
                    witness = (i, a)
                    break
    return DCertificate(per_state, witness)


# -- comparison ---------------------------------------------------------------

@dataclass
class ComparisonVerdict:
    u: Word
    v: Word
    phi_u: int
    phi_v: int
    order: str  # ">", "<" or "="
    all_invariants_equal: bool
    d_uv: DCertificate | None
    d_vu: DCertificate | None
    lam_u: float
    lam_v: float
    numeric_agrees: bool
    tol: float

    @property
    def d_strict(self) -> bool:
        cert = self.d_uv or self.d_vu
        return cert is not None and cert.strict_witness is not None


def compare_shifts(u: Word, v: Word, tol: float = 1e-12) -> ComparisonVerdict:
    if u.q != v.q or u.k != v.k:
        raise WordError("comparison needs words of equal length and alphabet")
    pu, pv = phi_at(u, u.q), phi_at(v, v.q)
    order = ">" if pu > pv else "<" if pu < pv else "="
    lu, lv = perron_eigenvalue(u, tol), perron_eigenvalue(v, tol)
    if abs(lu - lv) > 10 * tol:
        numeric = (lu > lv) == (order == ">") and order != "="
    else:
        numeric = True
    d_uv = condition_D(u, v) if u.k >= 2 else None
    d_vu = condition_D(v, u) if u.k >= 2 else None
    return ComparisonVerdict(u, v, pu, pv, order, self_overlap(u) == self_overlap(v),
                             d_uv, d_vu, lu, lv, numeric, tol)


# -- memory-one ambient shift -------------------------------------------------

def _check_allowed(T: Sequence[Sequence[int]], w: Word) -> None:
    if len(T) != w.q or any(len(row) != w.q for row in T):
        raise WordError("transition matrix size must match the alphabet")
    for a, b in zip(w.symbols, w.symbols[1:]):
        if not T[a][b]:
            raise WordError(f"{w} is not allowed: transition {a}{b} is forbidden")


def forbidden_pairs(T: Sequence[Sequence[int]]) -> set[tuple[int, int]]:
    return {(a, b) for a in range(len(T)) for b in range(len(T)) if not T[a][b]}


def two_block_correlation(w: Word) -> IntPoly:
    """phi of w^{[2]}: overlaps of the 2-block word are those of w shifted down by one."""
    coeffs = [0] * (w.k - 1)
    for i in self_overlap(w):
        if i >= 2:
            coeffs[i - 2] = 1
    return IntPoly(coeffs)


def cofactor_poly(T: Sequence[Sequence[int]], i: int, j: int) -> IntPoly:
    """cof_{ij}(tI - T) = (-1)^{i+j} det of tI - T without row i and column j."""
    det = poly_matrix_det(minor(tI_minus(T), i, j))
    return det if (i + j) % 2 == 0 else -det


def ambient_char_poly(T: Sequence[Sequence[int]], w: Word) -> IntPoly:
    """chi_T(t) phi_{w^[2]}(t) + cof_{ij}(tI - T), with i = w_1 and j = w_k."""
    _check_allowed(T, w)
    if w.k < 2:
        raise WordError("ambient characteristic polynomial needs k >= 2")
    return charpoly(T) * two_block_correlation(w) + cofactor_poly(T, w.at(1), w.at(w.k))


def ambient_perron_value(T, w: Word, tol: float = 1e-12) -> float:
    return largest_real_root(ambient_char_poly(T, w), tol).value


def restricted_perron_value(T, w: Word) -> float:
    g = build_L_restricted(w, forbidden_pairs(T))
    return largest_real_root(charpoly(g.adjacency()), 1e-14).value


@dataclass
class AmbientConditions:
    lam_T: float
    eta_T: float | None
    eta_multiplicity: int | None
    cof_at_eta: float | None
    cof_at_2: int
    chi_T_at_2: int
    k_threshold: float | None
    holds: dict
    predicted: str | None  # ">", "<", "=" from phi at lam_T, when a condition holds
    lam_u: float
    lam_v: float
    confirmed: bool | None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _second_root(chi: IntPoly, lam: float) -> tuple[float | None, int | None]:
    roots = [r for r in real_roots(chi) if r.value < lam - 1e-9]
    if not roots:
        return None, None
    return roots[-1].value, roots[-1].multiplicity


def _phi_order_at(pu: IntPoly, pv: IntPoly, t: float) -> str:
    if pu == pv:
        return "="
    if t >= 2:
        # 0/1 coefficients at t >= 2: the highest differing power decides
        n = max(pu.degree, pv.degree)
        for e in range(n, -1, -1):
            if pu[e] != pv[e]:
                return ">" if pu[e] > pv[e] else "<"
    a, b = pu(t), pv(t)
    return ">" if a > b else "<" if a < b else "="


def _lambda_star(hi: IntPoly, lo: IntPoly) -> float:
    """Largest root of t^r - sum_{i<r} t^i, r the top power in hi but not lo."""
    r = max(e for e in range(hi.degree + 1) if hi[e] == 1 and lo[e] == 0)
    if r == 0:
        return -math.inf
    return largest_real_root(IntPoly([-1] * r + [1])).value


def ambient_comparison_conditions(T, u: Word, v: Word, tol: float = 1e-12) -> AmbientConditions:
    _check_allowed(T, u)
    _check_allowed(T, v)
    if u.k != v.k:
        raise WordError("words must have equal length")
    if u.at(1) != v.at(1) or u.at(u.k) != v.at(v.k):
        raise WordError("words must share first and last symbols (same extender set)")
    chi_T = charpoly(T)
    lam_T = largest_real_root(chi_T, tol).value
    eta, eta_mult = _second_root(chi_T, lam_T)
    i, j = u.at(1), u.at(u.k)
    cof = cofactor_poly(T, i, j)
    cof_eta = float(cof(eta)) if eta is not None else None
    cof2, chi2 = cof(2), chi_T(2)
    big = lam_T >= 2 - 1e-12
    eta_lt2 = eta is None or eta < 2
    eta_le2 = eta is None or eta <= 2
    holds = {
        "a": big and eta is not None and eta >= 2 and cof_eta is not None and cof_eta < 0,
        "b": (lam_T > 2 and eta_le2 and cof2 < 0) or (lam_T > 2 and eta_lt2 and cof2 <= 0),
    }
    threshold = None
    if lam_T > 2 and eta_lt2 and cof2 > 0 and chi2 < 0:
        threshold = math.log2(-cof2 / chi2) + 1
        holds["c"] = u.k >= threshold
    else:
        holds["c"] = False

    pu, pv = two_block_correlation(u), two_block_correlation(v)
    order = _phi_order_at(pu, pv, lam_T)
    lam_u = largest_real_root(ambient_char_poly(T, u), tol).value
    lam_v = largest_real_root(ambient_char_poly(T, v), tol).value
    if order == "=":
        holds["d"] = big
    else:
        hi, lo = (pu, pv) if order == ">" else (pv, pu)
        lam_lo = lam_v if order == ">" else lam_u
        bound = max(eta if eta is not None else -math.inf, _lambda_star(hi, lo))
        holds["d"] = big and lam_lo > bound
    if not big:
        holds = {key: False for key in holds}

    predicted = order if any(holds.values()) else None
    confirmed = None
    if predicted is not None:
        if abs(lam_u - lam_v) <= 10 * tol:
            confirmed = predicted == "="
        else:
            confirmed = predicted == (">" if lam_u > lam_v else "<")
    return AmbientConditions(lam_T, eta, eta_mult, cof_eta, cof2, chi2, threshold,
                             holds, predicted, lam_u, lam_v, confirmed)
