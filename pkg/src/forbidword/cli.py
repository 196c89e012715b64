"""Command line front end.  Every command prints one JSON report (or DOT for
``graph --format dot``) on stdout.

Exit codes: 0 success, 1 precondition failure, 2 parse error, 3 Unknown
verdict from ``chain``, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from importlib import metadata

from . import automaton, conjugacy, counting, hitting, multidim, spectral
from .poly import IntPoly
from .words import Word, WordError, correlation_poly, self_overlap

SCHEMA_VERSION = 1
EXACT = "exact"

EXIT_OK, EXIT_PRECONDITION, EXIT_PARSE, EXIT_UNKNOWN, EXIT_BUDGET = 0, 1, 2, 3, 4


class ParseError(ValueError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _float(tol: float) -> str:
    return f"float(tol={tol:g})"


def _poly(p: IntPoly) -> dict:
    return {"coefficients": p.to_list(), "string": str(p)}


def _rat(x) -> str:
    return str(Fraction(x))


def _word(text: str, q: int) -> Word:
    try:
        return Word.parse(text, q)
    except (WordError, ValueError, KeyError) as exc:
        raise ParseError(str(exc)) from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.results: dict = {}
        self.provenance: dict = {}
        self.tolerances: dict = {}
        self.caveats: list[str] = []

    def put(self, key: str, value, provenance: str | None = EXACT) -> None:
        self.results[key] = value
        if provenance is not None:
            self.provenance[key] = provenance

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": _version(),
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "provenance": self.provenance,
            "tolerances": self.tolerances,
            "caveats": self.caveats,
        }


def _emit(report: Report) -> None:
    sys.stdout.write(json.dumps(report.to_json(), indent=2) + "\n")


# -- commands -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    w = _word(args.word, args.q)
    n = args.n if args.n is not None else 2 * w.k
    rep = Report("analyze", {"word": str(w), "q": w.q, "n": n})
    rep.tolerances["lambda"] = args.tol
    rep.put("overlap", self_overlap(w))
    phi = correlation_poly(w)
    rep.put("phi", str(phi))
    rep.put("phi_coefficients", phi.to_list())
    rep.put("phi_at_q", str(phi(w.q)))
    rep.put("chi", _poly(spectral.char_poly(w)))
    lam = spectral.perron_eigenvalue(w, args.tol)
    rep.put("lambda", lam, _float(args.tol))
    rep.put("entropy", math.log(lam), _float(args.tol))
    g = automaton.build_L(w)
    rep.put("irreducible", automaton.is_irreducible(g))
    rep.put("E_tau", _rat(hitting.expected_hitting(w)))
    rep.put("B_n", [str(x) for x in counting.count_avoiding_upto(w, n)])
    gf = counting.generating_function(w)
    rep.put("generating_function", gf.to_json())
    _emit(rep)
    return EXIT_OK


def _cert_json(cert) -> dict | None:
    if cert is None:
        return None
    return {
        "per_state": {str(i): list(pi) for i, pi in sorted(cert.per_state.items())},
        "strict_witness": list(cert.strict_witness) if cert.strict_witness else None,
    }


def cmd_compare(args) -> int:
    u, v = _word(args.u, args.q), _word(args.v, args.q)
    if args.ambient == "gm":
        t = [[1, 1], [1, 0]]
        rep = Report("compare", {"u": str(u), "v": str(v), "q": u.q, "ambient": "gm"})
        try:
            cond = spectral.ambient_comparison_conditions(t, u, v, args.tol)
        except WordError as exc:
            raise _Precondition(str(exc)) from exc
        for key, val in cond.to_json().items():
            is_float = isinstance(val, float)
            rep.put(key, val, _float(args.tol) if is_float else EXACT)
        _emit(rep)
        return EXIT_OK
    try:
        verdict = spectral.compare_shifts(u, v, args.tol)
    except WordError as exc:
        raise _Precondition(str(exc)) from exc
    rep = Report("compare", {"u": str(u), "v": str(v), "q": u.q})
    rep.tolerances["lambda"] = args.tol
    rep.put("phi_u_at_q", str(verdict.phi_u))
    rep.put("phi_v_at_q", str(verdict.phi_v))
    rep.put("order", verdict.order)
    rep.put("all_invariants_equal", verdict.all_invariants_equal)
    rep.put("D_u_v", _cert_json(verdict.d_uv))
    rep.put("D_v_u", _cert_json(verdict.d_vu))
    rep.put("d_strict", verdict.d_strict)
    rep.put("lambda_u", verdict.lam_u, _float(args.tol))
    rep.put("lambda_v", verdict.lam_v, _float(args.tol))
    rep.put("numeric_agrees", verdict.numeric_agrees, _float(args.tol))
    _emit(rep)
    return EXIT_OK


def cmd_count(args) -> int:
    w = _word(args.word, args.q)
    if args.n < 0:
        raise _Precondition("n must be nonnegative")
    rep = Report("count", {"word": str(w), "q": w.q, "n": args.n})
    value = counting.count_avoiding(w, args.n)
    rep.put("B_n", str(value))
    if args.oracle:
        bits = args.n * math.log2(w.q)
        if bits > args.budget:
            raise multidim.BudgetExceeded(f"oracle needs {bits:.1f} bits, budget {args.budget}")
        naive = counting.count_avoiding_naive(w, args.n)
        rep.put("oracle", str(naive))
        rep.put("oracle_agrees", naive == value)
        if naive != value:
            _emit(rep)
            return EXIT_PRECONDITION
    if args.gf:
        rep.put("generating_function", counting.generating_function(w).to_json())
    _emit(rep)
    return EXIT_OK


def cmd_hitting(args) -> int:
    w = _word(args.word, args.q)
    rep = Report("hitting", {"word": str(w), "q": w.q, "horizon": args.horizon})
    prof = hitting.hitting_survival(w, args.horizon)
    rep.put("E_tau", _rat(prof.expectation))
    rep.put("survival", [_rat(x) for x in prof.survival])
    rep.put("tail_remainder", _rat(prof.remainder()))
    if args.versus:
        v = _word(args.versus, args.q)
        try:
            dv = hitting.stochastic_dominance(w, v, args.horizon)
        except WordError as exc:
            raise _Precondition(str(exc)) from exc
        rep.put("dominance", {
            "versus": str(v),
            "tier": dv.tier,
            "relation": dv.relation,
            "strict": dv.strict,
            "certificate": _cert_json(dv.certificate),
            "holds_up_to_horizon": dv.holds_up_to_horizon,
            "lambda_order": dv.lambda_order,
            "first_crossing": dv.first_crossing,
        })
        if dv.caveat:
            rep.caveats.append("dominance is empirical up to the horizon, not certified")
    _emit(rep)
    return EXIT_OK


def cmd_simulate(args) -> int:
    u, v = _word(args.u, args.q), _word(args.v, args.q)
    try:
        s = hitting.simulate_coupling(u, v, seed=args.seed, trials=args.trials)
    except WordError as exc:
        raise _Precondition(str(exc)) from exc
    rep = Report("simulate", {"u": str(u), "v": str(v), "q": u.q,
                              "seed": args.seed, "trials": args.trials})
    sample = "float(sample mean)"
    rep.put("mean_tau", s.mean_tau, sample)
    rep.put("mean_tau_prime", s.mean_tau_prime, sample)
    rep.put("stderr_tau", s.stderr_tau, sample)
    rep.put("stderr_tau_prime", s.stderr_tau_prime, sample)
    rep.put("z_tau", s.z_tau, sample)
    rep.put("z_tau_prime", s.z_tau_prime, sample)
    rep.put("expected_tau", str(s.expected_tau))
    rep.put("expected_tau_prime", str(s.expected_tau_prime))
    rep.put("dominated_count", s.dominated_count)
    rep.put("strict_count", s.strict_count)
    rep.put("certificate", _cert_json(s.certificate))
    _emit(rep)
    return EXIT_OK


def cmd_graph(args) -> int:
    w = _word(args.word, args.q)
    try:
        g = automaton.build_L_gm(w) if args.ambient == "gm" else automaton.build_L(w)
    except WordError as exc:
        raise _Precondition(str(exc)) from exc
    if args.format == "dot":
        sys.stdout.write(g.to_dot())
        return EXIT_OK
    rep = Report("graph", {"word": str(w), "q": w.q, "ambient": args.ambient or "full"})
    rep.put("graph", g.to_json())
    rep.put("irreducible", automaton.is_irreducible(g))
    _emit(rep)
    return EXIT_OK


def cmd_recover(args) -> int:
    data = _load_json(args.graph)
    try:
        g = automaton.graph_from_json(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from exc
    try:
        res = automaton.recover_word_gm(g) if args.ambient == "gm" else automaton.recover_word(g, args.q)
    except automaton.NotAnLGraph as exc:
        raise _Precondition(str(exc)) from exc
    rep = Report("recover", {"graph": args.graph, "q": args.q, "ambient": args.ambient or "full"})
    for key, val in res.to_json().items():
        rep.put(key, val)
    rep.put("state_names", {str(a): str(b) for a, b in sorted(res.state_names.items(), key=str)})
    _emit(rep)
    return EXIT_OK


def cmd_chain(args) -> int:
    u, v = _word(args.u, args.q), _word(args.v, args.q)
    ambient = conjugacy.GOLDEN_MEAN if args.ambient == "gm" else conjugacy.FULL
    rep = Report("chain", {"u": str(u), "v": str(v), "q": u.q, "ambient": ambient})
    try:
        out = conjugacy.conjugacy_chain(u, v, ambient)
    except conjugacy.ChainPreconditionError as exc:
        rep.put("status", "PreconditionFailed")
        rep.put("reason", str(exc))
        _emit(rep)
        return EXIT_PRECONDITION
    except WordError as exc:
        raise _Precondition(str(exc)) from exc
    rep.put("status", out.status)
    if out.chain is None:
        rep.put("reason", out.reason)
        _emit(rep)
        return EXIT_UNKNOWN
    ch = out.chain
    steps = [{"word": str(ch.words[0]), "move": None}]
    steps += [{"word": str(w), "move": mv.to_json()} for w, mv in zip(ch.words[1:], ch.moves)]
    rep.put("chain", steps)
    rep.put("length", len(ch))
    rep.put("bound", ch.bound)
    if args.validate:
        vr = conjugacy.validate_chain(ch)
        rep.put("validation", {"ok": vr.ok, "within_bound": vr.within_bound, "steps": vr.steps})
        if not vr.ok:
            _emit(rep)
            return EXIT_PRECONDITION
    _emit(rep)
    return EXIT_OK


def _grid(text: str) -> multidim.Shape:
    try:
        dims = tuple(int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise ParseError(f"bad grid {text!r}; expected e.g. 4x5") from exc
    try:
        return multidim.Shape.box(dims)
    except multidim.PatternError as exc:
        raise ParseError(str(exc)) from exc


def _pattern(path: str) -> multidim.PatternD:
    try:
        return multidim.PatternD.from_json(_load_json(path))
    except multidim.PatternError as exc:
        raise ParseError(str(exc)) from exc


def cmd_multidim(args) -> int:
    u = _pattern(args.pattern)
    forbid = [_pattern(p) for p in args.forbid or []]
    inputs = {"action": args.action, "pattern": args.pattern, "forbid": args.forbid or [],
              "budget": args.budget}
    rep = Report("multidim", inputs)
    if args.action == "agree":
        rep.put("agree", sorted(list(i) for i in multidim.agree_set(u)))
        if args.versus:
            v = _pattern(args.versus)
            inputs["versus"] = args.versus
            try:
                rep.put("mutually_replaceable", multidim.mutually_replaceable_fullshift(u, v))
            except multidim.PatternError as exc:
                raise _Precondition(str(exc)) from exc
    elif args.action in ("count", "ie"):
        if not args.grid:
            raise ParseError(f"multidim {args.action} needs --grid")
        t = _grid(args.grid)
        inputs["grid"] = args.grid
        fn = multidim.count_avoiding_patterns if args.action == "count" else multidim.inclusion_exclusion_count
        rep.put("count", str(fn(t, u, forbid, budget=args.budget)))
        if forbid:
            rep.caveats.append("counts locally allowed patterns: members of F are forbidden "
                               "only where fully supported inside the grid")
    else:
        if not args.lattice:
            raise ParseError("multidim periodic needs --lattice")
        try:
            lat = multidim.LatticeSubgroup.parse(args.lattice)
        except multidim.PatternError as exc:
            raise ParseError(str(exc)) from exc
        inputs["lattice"] = args.lattice
        rep.put("index", lat.index)
        rep.put("count", str(multidim.periodic_count_multidim(lat, u, forbid, budget=args.budget)))
    _emit(rep)
    return EXIT_OK


class _Precondition(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forbidword",
                                description="Forbidden words in shift spaces: counts, "
                                            "spectra, hitting times and conjugacies.")
    sub = p.add_subparsers(dest="command", required=True)

    def word_cmd(name, help_, *words):
        sp = sub.add_parser(name, help=help_)
        for w in words:
            sp.add_argument(w)
        sp.add_argument("--q", type=int, default=2, help="alphabet size (default 2)")
        return sp

    sp = word_cmd("analyze", "overlap set, polynomials, entropy and counts", "word")
    sp.add_argument("--n", type=int, default=None, help="count B_0..B_n (default 2k)")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_analyze)

    sp = word_cmd("compare", "compare the shifts forbidding u and v", "u", "v")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--ambient", choices=["gm"], default=None)
    sp.set_defaults(func=cmd_compare)

    sp = word_cmd("count", "number of length-n words avoiding w", "word")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--oracle", action="store_true", help="also enumerate all q^n words")
    sp.add_argument("--gf", action="store_true", help="include the generating function")
    sp.add_argument("--budget", type=float, default=multidim.DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_count)

    sp = word_cmd("hitting", "exact law of the hitting time", "word")
    sp.add_argument("--horizon", type=int, default=30)
    sp.add_argument("--versus", default=None, help="second word for a dominance verdict")
    sp.set_defaults(func=cmd_hitting)

    sp = word_cmd("simulate", "coupled walks for condition D(u, v)", "u", "v")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)

    sp = word_cmd("graph", "the follower graph L_w", "word")
    sp.add_argument("--format", choices=["json", "dot"], default="json")
    sp.add_argument("--ambient", choices=["gm"], default=None)
    sp.set_defaults(func=cmd_graph)

    sp = word_cmd("recover", "recover w from an unlabeled graph (JSON file)", "graph")
    sp.add_argument("--ambient", choices=["gm"], default=None)
    sp.set_defaults(func=cmd_recover)

    sp = word_cmd("chain", "chain of elementary conjugacies from u to v", "u", "v")
    sp.add_argument("--ambient", choices=["gm"], default=None)
    sp.add_argument("--validate", action="store_true")
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("multidim", help="patterns on Z^d")
    sp.add_argument("action", choices=["agree", "count", "ie", "periodic"])
    sp.add_argument("--pattern", required=True, help="pattern JSON file")
    sp.add_argument("--forbid", action="append", help="extra forbidden pattern (repeatable)")
    sp.add_argument("--versus", default=None, help="second pattern for agree")
    sp.add_argument("--grid", default=None, help="box such as 4x5")
    sp.add_argument("--lattice", default=None, help="basis rows, e.g. '3,0;0,3'")
    sp.add_argument("--budget", type=float, default=multidim.DEFAULT_BUDGET,
                    help="enumeration budget in bits (default 24)")
    sp.set_defaults(func=cmd_multidim)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except multidim.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (_Precondition, multidim.PatternError, WordError, ValueError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
