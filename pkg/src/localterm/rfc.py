"""Global termination of string rewriting via right-hand sides of forward closures.

A string rewriting system R terminates iff it terminates on the right-hand
sides of its forward closures. Those are over-approximated by the closure of
``rhs(R)#`` under R together with

    R_# = { u# -> r# | uv -> r in R, u and v nonempty },

where ``#`` marks the right end of the string. A partial algebra whose
language contains the seeds ``r#`` (grounded by the constant ``e``) and which
is a partial model for R and R_# describes such a closed set; labeling R with
it yields a system whose global termination implies termination of R.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .algebra import (
    Counterexample,
    FiniteAlgebra,
    ModelReport,
    check_partial_model,
    interpret,
    restrict_to_core,
)
from .labeling import label_trs
from .prover import ProofStep, ProofTrace, _replay_global, prove_global
from .terms import App, Rule, Term, Trs, Var, is_srs, render, term_to_word, word_to_term
from .trs_io import SRS_CONSTANT, SRS_VAR, parse_algebra, parse_trs, write_algebra, write_trs

MARK = "#"


@dataclass
class MarkedSrs:
    base: Trs
    marked: Trs  # base rules followed by R_#
    seeds: list[Term]

    @property
    def sharp_rules(self) -> list[Rule]:
        return list(self.marked.rules[len(self.base):])


def build_marked(srs: Trs) -> MarkedSrs:
    """The end-marker system and the seeds ``r#`` over the constant ``e``."""
    if not is_srs(srs):
        raise ValueError("the forward-closure method needs a string rewriting system")
    x = Var(SRS_VAR)
    sharp: list[Rule] = []
    seeds: list[Term] = []
    e = App(SRS_CONSTANT)
    for r in srs.rules:
        lw, _ = term_to_word(r.lhs)
        rw, _ = term_to_word(r.rhs)
        for k in range(1, len(lw)):
            rule = Rule(App(MARK, [word_to_term(lw[:k], x)]), App(MARK, [word_to_term(rw, x)]))
            if rule not in sharp:
                sharp.append(rule)
        seed = App(MARK, [word_to_term(rw, e)])
        if seed not in seeds:
            seeds.append(seed)
    sig = srs.signature.copy()
    sig.add(MARK, 1)
    sig.add(SRS_CONSTANT, 0)
    return MarkedSrs(srs, Trs(tuple(srs.rules) + tuple(sharp), sig), seeds)


def check_rfc_closure(m: MarkedSrs, a: FiniteAlgebra) -> ModelReport:
    """Seeds are defined and ``a`` is a partial model for R and R_#."""
    cex = [Counterexample("seed", detail=f"seed {render(s)} is undefined")
           for s in m.seeds if interpret(a, s) is None]
    report = check_partial_model(a, m.marked)
    return ModelReport(not cex and report.ok, cex + list(report.counterexamples))


# ---------------------------------------------------------------- explanation


def _letters(m: MarkedSrs) -> list[str]:
    return [f for f, k in m.base.signature.items() if k == 1 and f != MARK]


def forbidden_factors(m: MarkedSrs, a: FiniteAlgebra, max_len: int = 4) -> list[str]:
    """Minimal words that are undefined from every state reachable from ``e`` by letters."""
    letters = _letters(m)
    start = a.apply(SRS_CONSTANT, ())
    if start is None:
        return []
    states = {start}
    frontier = [start]
    while frontier:
        q = frontier.pop()
        for f in letters:
            v = a.apply(f, (q,))
            if v is not None and v not in states:
                states.add(v)
                frontier.append(v)

    def blocked(word) -> bool:
        for q in states:
            for f in word:
                q = a.apply(f, (q,))
                if q is None:
                    break
            else:
                return False
        return True

    found: list[tuple[str, ...]] = []
    for n in range(1, max_len + 1):
        for word in itertools.product(letters, repeat=n):
            if any(_is_factor(w, word) for w in found):
                continue
            if blocked(word):
                found.append(word)
    return ["".join(w) if all(len(f) == 1 for f in w) else " ".join(w) for w in found]


def _is_factor(small, big) -> bool:
    n = len(small)
    return any(tuple(big[i:i + n]) == tuple(small) for i in range(len(big) - n + 1))


# ---------------------------------------------------------------- pipeline


def _label(m: MarkedSrs, a: FiniteAlgebra) -> Trs:
    core, _ = restrict_to_core(a)
    return label_trs(core, m.base, allow_collapsing=True)


def rfc_pipeline(
    srs: Trs,
    a: FiniteAlgebra,
    coeff_bound: int = 3,
    lpo: bool = False,
    mirror_srs: bool = True,
    max_nodes: int = 200_000,
    loop_depth: int = 6,
) -> ProofTrace:
    """Closure check, labeling of R, and a global proof of the labeled system."""
    m = build_marked(srs)
    trace = ProofTrace("rfc", {"system": write_trs(srs), "algebra": write_algebra(a)})
    report = check_rfc_closure(m, a)
    closure = ProofStep("rfc-closure", data={"sharp_rules": [str(r) for r in m.sharp_rules],
                                             "seeds": [render(s) for s in m.seeds]})
    trace.steps.append(closure)
    if not report.ok:
        closure.ok = False
        closure.messages = [str(c) for c in report.counterexamples]
        trace.notes.append("the algebra does not prove closure of the forward closures")
        return trace
    factors = forbidden_factors(m, a)
    if factors:
        trace.notes.append("the domain excludes all words containing a factor in: " + ", ".join(factors))
    labeled = _label(m, a)
    sub = prove_global(labeled, coeff_bound, lpo, mirror_srs, max_nodes=max_nodes, loop_depth=loop_depth)
    trace.steps.append(ProofStep("transform", data={"labeled_rules": len(labeled), "subproof": sub.to_dict()}))
    trace.outcome = sub.outcome
    return trace


def replay_rfc(trace: ProofTrace) -> tuple[str, list[str]]:
    srs = parse_trs(trace.inputs["system"])
    m = build_marked(srs)
    a = parse_algebra(trace.inputs["algebra"], m.marked.signature)
    if not check_rfc_closure(m, a).ok:
        return "unknown", ["closure check fails"]
    if len(trace.steps) < 2:
        return "unknown", ["no subproof recorded"]
    sub = trace.steps[1].data["subproof"]
    if sub["inputs"]["system"] != write_trs(_label(m, a)):
        return "unknown", ["recorded labeled system differs from the recomputed one"]
    return _replay_global(ProofTrace.from_dict(sub))


# ---------------------------------------------------------------- search


def closing_algebras(srs: Trs, states: int) -> Iterator[FiniteAlgebra]:
    """Closing algebras with exactly ``states`` reachable states, in canonical order.

    ``e`` is state 0; transitions are filled state by state, and a new state
    may only be the least unused one, so each automaton appears once up to
    renaming. Undefined transitions are tried first.
    """
    m = build_marked(srs)
    letters = _letters(m) + [MARK]
    slots = [(q, f) for q in range(states) for f in letters]
    table: dict[tuple[int, str], int | None] = {}
    rules = [(term_to_word(r.lhs)[0], term_to_word(r.rhs)[0]) for r in m.marked.rules]
    seeds = [term_to_word(s)[0] for s in m.seeds]
    unknown = object()

    def run(word, q):
        for f in word:
            if q is None:
                return None
            key = (q, f)
            if key not in table:
                return unknown
            q = table[key]
        return q

    def consistent() -> bool:
        for w in seeds:
            if run(w, 0) is None:
                return False
        for lw, rw in rules:
            for q in range(states):
                lv = run(lw, q)
                if lv is None or lv is unknown:
                    continue
                rv = run(rw, q)
                if rv is unknown:
                    continue
                if rv != lv:
                    return False
        return True

    def go(k: int, used: int) -> Iterator[FiniteAlgebra]:
        if k == len(slots):
            if used == states:
                a = FiniteAlgebra(m.marked.signature.copy(), states)
                a.set(SRS_CONSTANT, (), 0)
                for (q, f), v in table.items():
                    if v is not None:
                        a.set(f, (q,), v)
                yield a
            return
        q, f = slots[k]
        if q >= used:
            return  # later slots cannot make state q reachable
        for v in [None] + list(range(min(used + 1, states))):
            table[(q, f)] = v
            if consistent():
                yield from go(k + 1, max(used, v + 1) if v is not None else used)
        del table[(q, f)]

    yield from go(0, 1)


def search_closing_algebra(
    srs: Trs,
    max_states: int = 4,
    coeff_bound: int = 3,
    max_candidates: int = 5000,
    min_states: int = 1,
    max_nodes: int = 20_000,
) -> tuple[FiniteAlgebra, ProofTrace] | None:
    """The first closing algebra whose labeled system is proved.

    Fewer states come first; among algebras with the same number of states,
    those giving fewer labeled rules are tried first, ties broken by the
    canonical enumeration order.
    """
    m = build_marked(srs)
    tried = 0
    for n in range(min_states, max_states + 1):
        batch = []
        for a in closing_algebras(srs, n):
            if tried + len(batch) >= max_candidates:
                break
            batch.append((len(_label(m, a)), len(batch), a))
        batch.sort(key=lambda x: x[:2])
        for _, _, a in batch:
            tried += 1
            trace = rfc_pipeline(srs, a, coeff_bound, max_nodes=max_nodes, loop_depth=3)
            if trace.outcome == "proved":
                return a, trace
        if tried >= max_candidates:
            return None
    return None


__all__ = [
    "MARK",
    "MarkedSrs",
    "build_marked",
    "check_rfc_closure",
    "closing_algebras",
    "forbidden_factors",
    "replay_rfc",
    "rfc_pipeline",
    "search_closing_algebra",
]
