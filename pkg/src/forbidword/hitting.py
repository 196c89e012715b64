"""Hitting times of a word in i.i.d. uniform letters: exact law, expectation,
dominance verdicts and the two-walk coupling simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .automaton import kmp_transitions
from .counting import count_avoiding_upto, generating_function
from .spectral import DCertificate, condition_D, perron_eigenvalue
from .words import Word, WordError, phi_at, self_overlap


def expected_hitting(w: Word) -> int:
    """E tau_w = q phi_w(q)."""
    return w.q * phi_at(w, w.q)


def _solve_fraction(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(b)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def expected_hitting_chain(w: Word) -> Fraction:
    """E tau_w from the absorbing chain on prefix states, in exact arithmetic."""
    delta = kmp_transitions(w)
    k, q = w.k, w.q
    a = [[Fraction(0)] * k for _ in range(k)]
    b = [Fraction(1)] * k
    for s in range(k):
        a[s][s] += 1
        for sym in range(q):
            t = delta[s][sym]
            if t < k:
                a[s][t] -= Fraction(1, q)
    return _solve_fraction(a, b)[0]


@dataclass
class HittingProfile:
    word: Word
    expectation: Fraction
    survival: list[Fraction]

    def partial_expectation(self) -> Fraction:
        return sum(self.survival, Fraction(0))

    def remainder(self) -> Fraction:
        """E tau minus the truncated sum of P(tau > n) over the horizon."""
        return self.expectation - self.partial_expectation()


def hitting_survival(w: Word, horizon: int) -> HittingProfile:
    """P(tau_w > n) = B_n(w) / q^n for n = 0..horizon."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    counts = count_avoiding_upto(w, horizon)
    surv = [Fraction(c, w.q ** n) for n, c in enumerate(counts)]
    return HittingProfile(w, Fraction(expected_hitting(w)), surv)


def expectation_from_gf(w: Word) -> Fraction:
    """sum_n B_n q^{-n} = G_w(1/q)."""
    gf = generating_function(w)
    x = Fraction(1, w.q)
    return Fraction(gf.numerator(x)) / gf.denominator(x)


# -- dominance ----------------------------------------------------------------

CERTIFIED = "CERTIFIED"
CERTIFIED_EQUAL = "CERTIFIED-EQUAL"
EMPIRICAL = "EMPIRICAL"


@dataclass
class DominanceVerdict:
    u: Word
    v: Word
    tier: str
    relation: str  # e.g. "tau_v <=st tau_u"
    strict: bool | None
    certificate: DCertificate | None
    horizon: int
    holds_up_to_horizon: bool | None
    caveat: bool
    lambda_order: str | None = None
    first_crossing: int | None = None


def stochastic_dominance(u: Word, v: Word, horizon: int = 60) -> DominanceVerdict:
    if u.q != v.q or u.k != v.k:
        raise WordError("dominance needs words of equal length and alphabet")
    if self_overlap(u) == self_overlap(v):
        return DominanceVerdict(u, v, CERTIFIED_EQUAL, "tau_u =d tau_v", False, None,
                                horizon, True, False)
    for a, b, name in ((u, v, "tau_v <=st tau_u"), (v, u, "tau_u <=st tau_v")):
        cert = condition_D(a, b)
        if cert is not None:
            return DominanceVerdict(u, v, CERTIFIED, name, cert.strict_witness is not None,
                                    cert, horizon, True, False)
    su = hitting_survival(u, horizon).survival
    sv = hitting_survival(v, horizon).survival
    v_below = all(y <= x for x, y in zip(su, sv))
    u_below = all(x <= y for x, y in zip(su, sv))
    lu, lv = perron_eigenvalue(u), perron_eigenvalue(v)
    lam_order = ">" if lu > lv else "<" if lu < lv else "="
    if v_below:
        relation, ok = "tau_v <=st tau_u", True
    elif u_below:
        relation, ok = "tau_u <=st tau_v", True
    else:
        relation, ok = "incomparable", False
    crossing = None
    if not ok:
        sign = None
        for n, (x, y) in enumerate(zip(su, sv)):
            if x != y:
                s = x > y
                if sign is None:
                    sign = s
                elif s != sign:
                    crossing = n
                    break
    return DominanceVerdict(u, v, EMPIRICAL, relation, None, None, horizon, ok, True,
                            lam_order, crossing)


# -- coupling -----------------------------------------------------------------

def _coupling_perms(u: Word, v: Word, cert: DCertificate) -> list[tuple[int, ...]]:
    """pi_0 .. pi_{k-1}; the star level swaps u_1 and v_1."""
    q = u.q
    star = list(range(q))
    a, b = u.at(1), v.at(1)
    star[a], star[b] = b, a
    return [tuple(star)] + [cert.per_state[i] for i in range(1, u.k)]


@dataclass
class CouplingSummary:
    u: Word
    v: Word
    seed: int
    trials: int
    mean_tau: float
    mean_tau_prime: float
    stderr_tau: float
    stderr_tau_prime: float
    expected_tau: int
    expected_tau_prime: int
    dominated_count: int
    strict_count: int
    certificate: DCertificate
    trace: list[tuple[int, int, int]] | None = field(default=None, repr=False)

    @property
    def z_tau(self) -> float:
        return (self.mean_tau - self.expected_tau) / self.stderr_tau if self.stderr_tau else 0.0

    @property
    def z_tau_prime(self) -> float:
        if not self.stderr_tau_prime:
            return 0.0
        return (self.mean_tau_prime - self.expected_tau_prime) / self.stderr_tau_prime


class CouplingInvariantError(AssertionError):
    """A pathwise invariant of the coupling failed; this is a bug, not data."""


def _one_trial(du, dv, perms, k, q, rng, record):
    x = xp = sigma = s = 0
    tau_prime = None
    steps = [(0, 0, 0)] if record else None
    block = rng.integers(0, q, size=256)
    pos = 0
    while x < k:
        if pos == len(block):
            block = rng.integers(0, q, size=256)
            pos = 0
        a = int(block[pos])
        pos += 1
        nx_ = du[x][a]
        if xp == x:
            xp = dv[xp][perms[x][a]]
            sigma += 1
            if xp == k and tau_prime is None:
                tau_prime = sigma
        x = nx_
        s += 1
        if x > xp or sigma > s:
            raise CouplingInvariantError(f"X={x} X'={xp} sigma={sigma} s={s}")
        if record:
            steps.append((x, xp, sigma))
    if xp != k or tau_prime is None or s < tau_prime:
        raise CouplingInvariantError(f"tau={s} tau'={tau_prime}")
    return s, tau_prime, steps


def simulate_coupling(u: Word, v: Word, seed: int = 0, trials: int = 10_000,
                      keep_trace: bool = False) -> CouplingSummary:
    """Run the coupled walks for D(u, v); tau belongs to u, tau' to v."""
    cert = condition_D(u, v)
    if cert is None:
        raise WordError(f"condition D({u}, {v}) does not hold; the coupling is undefined")
    # levels: 0 is the merged star vertex, k is absorption
    du, dv = kmp_transitions(u), kmp_transitions(v)
    perms = _coupling_perms(u, v, cert)
    k, q = u.k, u.q
    taus = np.empty(trials, dtype=np.int64)
    primes = np.empty(trials, dtype=np.int64)
    trace = None
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        tau, tp, steps = _one_trial(du, dv, perms, k, q, rng, keep_trace and t == 0)
        taus[t], primes[t] = tau, tp
        if steps is not None:
            trace = steps
    sd = taus.std(ddof=1) if trials > 1 else 0.0
    sdp = primes.std(ddof=1) if trials > 1 else 0.0
    return CouplingSummary(
        u, v, seed, trials,
        float(taus.mean()), float(primes.mean()),
        float(sd / math.sqrt(trials)), float(sdp / math.sqrt(trials)),
        expected_hitting(u), expected_hitting(v),
        int((taus >= primes).sum()), int((taus > primes).sum()),
        cert, trace,
    )
