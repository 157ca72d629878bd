"""Termination proofs and their replayable traces.

Global proofs remove rules with linear interpretations and finish with the
lexicographic path order; local proofs label with a partial model and hand
the labeled system to the global prover; stepwise scripts check declared
removal steps (stepwise, quasicomb, qremove) one by one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .algebra import (
    CarrierRelation,
    FiniteAlgebra,
    ModelReport,
    check_closed_monotone,
    check_partial_model,
    check_relational_model,
    check_relative_wf,
    defined_assignments,
    interpret,
    is_core,
    restrict_to_core,
    seeds_included,
)
from .interpretations import (
    LinearInterpretation,
    MissingInterpretation,
    check_label_compat,
    check_mu_monotone,
    check_rule,
    eval_symbolic,
    search_linear,
    strict_rules,
)
from .labeling import label_trs, nf_replacement_map
from .terms import (
    App,
    Position,
    Rule,
    Term,
    Trs,
    Var,
    eliminate_collapsing,
    is_srs,
    match,
    mirror,
    one_step_successors,
    positions,
    render,
    subterm_at,
    variables,
)
from .trs_io import (
    ParseError,
    parse_algebra,
    parse_algebra_items,
    parse_sexprs,
    parse_term,
    parse_trs,
    write_algebra,
    write_trs,
)

OUTCOMES = ("proved", "disproved", "unknown", "exported")


# ---------------------------------------------------------------- traces


@dataclass
class ProofStep:
    kind: str  # transform, stepwise, quasicomb, qremove, linear-removal, lpo-finish, loop, rfc-closure
    removed: list[int] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    ok: bool = True
    messages: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "removed": list(self.removed), "ok": self.ok,
                "messages": list(self.messages), "data": self.data}

    @classmethod
    def from_dict(cls, d: dict) -> "ProofStep":
        return cls(d["kind"], list(d.get("removed", [])), d.get("data", {}), d.get("ok", True),
                   list(d.get("messages", [])))


@dataclass
class ProofTrace:
    """A proof attempt: the inputs, the steps taken and the outcome.

    ``inputs`` holds the texts needed to replay the proof (``system`` always,
    plus ``algebra`` or ``script`` depending on the goal).
    """

    goal: str  # global, local, relative, rfc
    inputs: dict[str, str]
    steps: list[ProofStep] = field(default_factory=list)
    outcome: str = "unknown"
    notes: list[str] = field(default_factory=list)
    export_path: str | None = None

    def to_dict(self) -> dict:
        return {"goal": self.goal, "outcome": self.outcome, "export_path": self.export_path,
                "notes": list(self.notes), "inputs": dict(self.inputs),
                "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, d: dict) -> "ProofTrace":
        return cls(d["goal"], dict(d["inputs"]), [ProofStep.from_dict(s) for s in d.get("steps", [])],
                   d.get("outcome", "unknown"), list(d.get("notes", [])), d.get("export_path"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProofTrace":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        lines = [f"goal: {self.goal}", f"outcome: {self.outcome}"]
        if self.export_path:
            lines.append(f"exported to: {self.export_path}")
        lines.extend(f"note: {n}" for n in self.notes)
        for k, s in enumerate(self.steps, 1):
            status = "ok" if s.ok else "FAILED"
            removed = f" removes {s.removed}" if s.removed else ""
            lines.append(f"step {k}: {s.kind}{removed} [{status}]")
            lines.extend(f"  {m}" for m in s.messages)
            sub = s.data.get("subproof")
            if sub:
                inner = ProofTrace.from_dict(sub).summary()
                lines.extend("  | " + x for x in inner.splitlines())
        return "\n".join(lines)


def _forms_to_json(i: LinearInterpretation) -> dict:
    return {name: None if f is None else [f[0], list(f[1])] for name, f in sorted(i.items())}


def _forms_from_json(d: Mapping) -> LinearInterpretation:
    return LinearInterpretation({k: None if v is None else (v[0], tuple(v[1])) for k, v in d.items()})


# ---------------------------------------------------------------- LPO


def lpo_gt(s: Term, t: Term, rank: Mapping[str, int]) -> bool:
    """``s >_lpo t`` for the precedence given by ``rank`` (higher rank is bigger)."""
    if isinstance(s, Var):
        return False
    if isinstance(t, Var):
        return t.name in variables(s)
    if any(si == t or lpo_gt(si, t, rank) for si in s.args):
        return True
    f, g = s.symbol, t.symbol
    if f == g and len(s.args) == len(t.args):
        for i, (si, ti) in enumerate(zip(s.args, t.args)):
            if si != ti:
                return lpo_gt(si, ti, rank) and all(lpo_gt(s, tj, rank) for tj in t.args[i + 1:])
        return False
    if f in rank and g in rank and rank[f] > rank[g]:
        return all(lpo_gt(s, tj, rank) for tj in t.args)
    return False


class _Budget(Exception):
    pass


_Prec = frozenset  # transitively closed set of pairs (f, g) meaning f > g


def _extend(p: _Prec, f: str, g: str) -> _Prec | None:
    if (f, g) in p:
        return p
    if f == g or (g, f) in p:
        return None
    above = {f} | {a for a, b in p if b == f}
    below = {g} | {b for a, b in p if a == g}
    if above & below:
        return None
    return p | {(a, b) for a in above for b in below}


class _LpoSearch:
    def __init__(self, max_nodes: int):
        self.nodes = max_nodes

    def tick(self):
        self.nodes -= 1
        if self.nodes < 0:
            raise _Budget

    def gt(self, s: Term, t: Term, p: _Prec) -> Iterator[_Prec]:
        """Precedences extending ``p`` under which ``s >_lpo t``, weakest alternatives first."""
        self.tick()
        if isinstance(s, Var) or s == t:
            return
        if isinstance(t, Var):
            if t.name in variables(s):
                yield p
            return
        if any(si == t for si in s.args):
            yield p
            return
        seen: set[_Prec] = set()
        for si in s.args:
            for q in self.gt(si, t, p):
                if q not in seen:
                    seen.add(q)
                    yield q
                    if q == p:
                        return
        f, g = s.symbol, t.symbol
        if f == g and len(s.args) == len(t.args):
            i = next(k for k, (a, b) in enumerate(zip(s.args, t.args)) if a != b)
            for q in self.gt(s.args[i], t.args[i], p):
                for q2 in self.all_gt(s, t.args[i + 1:], q):
                    if q2 not in seen:
                        seen.add(q2)
                        yield q2
        elif f != g:
            q = _extend(p, f, g)
            if q is not None:
                for q2 in self.all_gt(s, t.args, q):
                    if q2 not in seen:
                        seen.add(q2)
                        yield q2

    def all_gt(self, s: Term, ts, p: _Prec) -> Iterator[_Prec]:
        if not ts:
            yield p
            return
        for q in self.gt(s, ts[0], p):
            yield from self.all_gt(s, ts[1:], q)

    def rules(self, rules: list[Rule], p: _Prec) -> Iterator[_Prec]:
        if not rules:
            yield p
            return
        for q in self.gt(rules[0].lhs, rules[0].rhs, p):
            yield from self.rules(rules[1:], q)


def prove_lpo(trs: Trs, max_symbols: int = 12, max_nodes: int = 200_000) -> list[str] | None:
    """A precedence (largest first) under which every rule decreases in LPO, or None.

    Systems with more than ``max_symbols`` symbols in their rules are not tried.
    """
    used: list[str] = []
    for r in trs.rules:
        for side in (r.lhs, r.rhs):
            for u in _apps(side):
                if u.symbol not in used:
                    used.append(u.symbol)
    if len(used) > max_symbols:
        return None
    search = _LpoSearch(max_nodes)
    try:
        prec = next(search.rules(list(trs.rules), frozenset()), None)
    except _Budget:
        return None
    if prec is None:
        return None
    return _linearize(used, prec)


def _apps(t: Term) -> Iterator[App]:
    if isinstance(t, App):
        yield t
        for a in t.args:
            yield from _apps(a)


def _linearize(symbols: list[str], prec: _Prec) -> list[str]:
    out: list[str] = []
    left = list(symbols)
    while left:
        for f in left:
            if not any((g, f) in prec for g in left if g != f):
                out.append(f)
                left.remove(f)
                break
    return out


def _rank(precedence: list[str]) -> dict[str, int]:
    n = len(precedence)
    return {f: n - k for k, f in enumerate(precedence)}


# ---------------------------------------------------------------- loops


@dataclass
class Loop:
    """``start`` rewrites in ``steps`` to a term containing an instance of ``start`` at ``position``."""

    start: Term
    steps: list[tuple[int, Position]]
    position: Position

    def to_dict(self) -> dict:
        return {"start": render(self.start), "variables": variables(self.start),
                "steps": [[i, list(p)] for i, p in self.steps], "position": list(self.position)}


def find_loop(trs: Trs, max_depth: int = 6, max_terms: int = 2000) -> Loop | None:
    """Breadth-first search from each left-hand side for a reduct containing an instance of it."""
    for r in trs.rules:
        start = r.lhs
        seen = {start}
        frontier: list[tuple[Term, list[tuple[int, Position]]]] = [(start, [])]
        for _ in range(max_depth):
            nxt = []
            for t, path in frontier:
                for i, p, u in one_step_successors(trs, t):
                    steps = path + [(i, p)]
                    for q in positions(u):
                        if match(start, subterm_at(u, q)) is not None:
                            return Loop(start, steps, q)
                    if u not in seen and len(seen) < max_terms:
                        seen.add(u)
                        nxt.append((u, steps))
            frontier = nxt
            if not frontier:
                break
    return None


def check_loop(trs: Trs, data: Mapping) -> bool:
    start = parse_term(data["start"], data.get("variables", ()))
    t = start
    for i, p in data["steps"]:
        p = tuple(p)
        hits = [u for j, q, u in one_step_successors(trs, t) if j == i and q == p]
        if not hits:
            return False
        t = hits[0]
    try:
        return match(start, subterm_at(t, tuple(data["position"]))) is not None
    except (IndexError, ValueError):
        return False


# ---------------------------------------------------------------- global proofs


def _find_removal(system: Trs, coeff_bound: int, max_nodes: int) -> LinearInterpretation | None:
    for k in range(len(system)):
        interp = search_linear(system, {k}, coeff_bound, max_nodes=max_nodes)
        if interp is not None:
            return interp
    return None


def prove_global(
    trs: Trs,
    coeff_bound: int = 3,
    lpo: bool = True,
    mirror_srs: bool = False,
    max_rules: int = 300,
    max_nodes: int = 200_000,
    loop_depth: int = 6,
) -> ProofTrace:
    """Rule removal by linear interpretations, with an LPO attempt before each round.

    With ``mirror_srs`` a string rewriting system may be reversed for a round
    when no interpretation works on the rules as given.
    """
    trace = ProofTrace("global", {"system": write_trs(trs)})
    if len(trs) > max_rules:
        trace.notes.append(f"{len(trs)} rules exceed the internal limit of {max_rules}; not attempted")
        return trace
    remaining = list(range(len(trs)))
    while remaining:
        sub = trs.with_rules(trs.rules[i] for i in remaining)
        if lpo:
            prec = prove_lpo(sub)
            if prec is not None:
                trace.steps.append(ProofStep("lpo-finish", list(remaining), {"precedence": prec}))
                remaining = []
                break
        found = None
        options = [False, True] if mirror_srs and is_srs(sub) else [False]
        for mirrored in options:
            system = mirror(sub) if mirrored else sub
            interp = _find_removal(system, coeff_bound, max_nodes)
            if interp is not None:
                found = (mirrored, interp, strict_rules(interp, system))
                break
        if found is None:
            break
        mirrored, interp, strict = found
        removed = [remaining[k] for k in strict]
        trace.steps.append(ProofStep("linear-removal", removed,
                                     {"mirrored": mirrored, "interpretation": _forms_to_json(interp)}))
        remaining = [i for i in remaining if i not in removed]
    if not remaining:
        trace.outcome = "proved"
        return trace
    sub = trs.with_rules(trs.rules[i] for i in remaining)
    loop = find_loop(sub, loop_depth)
    if loop is not None:
        data = loop.to_dict()
        data["steps"] = [[remaining[i], p] for i, p in data["steps"]]
        trace.steps.append(ProofStep("loop", [], data))
        trace.outcome = "disproved"
    else:
        trace.notes.append(f"rules {remaining} could not be removed")
    return trace


def _replay_global(trace: ProofTrace) -> tuple[str, list[str]]:
    trs = parse_trs(trace.inputs["system"])
    remaining = list(range(len(trs)))
    problems: list[str] = []
    for k, step in enumerate(trace.steps, 1):
        sub = trs.with_rules(trs.rules[i] for i in remaining)
        if step.kind == "lpo-finish":
            rank = _rank(step.data["precedence"])
            bad = [i for i in remaining if not lpo_gt(trs.rules[i].lhs, trs.rules[i].rhs, rank)]
            if bad or sorted(step.removed) != sorted(remaining):
                problems.append(f"step {k}: LPO does not orient rules {bad or remaining}")
                return "unknown", problems
            remaining = []
        elif step.kind == "linear-removal":
            interp = _forms_from_json(step.data["interpretation"])
            system = mirror(sub) if step.data.get("mirrored") else sub
            local = {i: n for n, i in enumerate(remaining)}
            try:
                ok = all(check_rule(interp, system.rules[local[i]], strict=i in step.removed) for i in remaining)
            except (MissingInterpretation, KeyError):
                ok = False
            if not ok or not step.removed or check_mu_monotone(interp) or any(i not in local for i in step.removed):
                problems.append(f"step {k}: interpretation does not justify the removal")
                return "unknown", problems
            remaining = [i for i in remaining if i not in step.removed]
        elif step.kind == "loop":
            if not check_loop(trs, step.data):
                problems.append(f"step {k}: loop does not replay")
                return "unknown", problems
            return "disproved", problems
        else:
            problems.append(f"step {k}: unexpected step kind {step.kind}")
            return "unknown", problems
    return ("proved" if not remaining else "unknown"), problems


# ---------------------------------------------------------------- local proofs


@dataclass
class _Prepared:
    system: Trs
    algebra: FiniteAlgebra
    collapsing: bool
    renumbered: bool
    report: ModelReport
    labeled: Trs | None


def _prepare_local(trs: Trs, a: FiniteAlgebra) -> _Prepared:
    collapsing = trs.is_collapsing()
    system = eliminate_collapsing(trs) if collapsing else trs
    renumbered = not is_core(a)
    if renumbered:
        a, _ = restrict_to_core(a)
    report = check_partial_model(a, system)
    labeled = label_trs(a, system) if report.ok else None
    return _Prepared(system, a, collapsing, renumbered, report, labeled)


def prove_local(
    trs: Trs,
    a: FiniteAlgebra,
    coeff_bound: int = 3,
    lpo: bool = True,
    mirror_srs: bool = False,
    max_rules: int = 300,
    export_path: str | None = None,
) -> ProofTrace:
    """Local termination on the language of ``a`` via labeling and a global proof."""
    trace = ProofTrace("local", {"system": write_trs(trs), "algebra": write_algebra(a)})
    prep = _prepare_local(trs, a)
    step = ProofStep("transform", data={"collapsing_eliminated": prep.collapsing,
                                         "restricted_to_core": prep.renumbered,
                                         "core_size": prep.algebra.size})
    trace.steps.append(step)
    if not prep.report.ok:
        step.ok = False
        step.messages = [str(c) for c in prep.report.counterexamples]
        trace.notes.append("the algebra is not a partial model")
        return trace
    labeled = prep.labeled
    step.data["labeled_rules"] = len(labeled)
    sub = prove_global(labeled, coeff_bound, lpo, mirror_srs, max_rules)
    step.data["subproof"] = sub.to_dict()
    if sub.outcome in ("proved", "disproved"):
        trace.outcome = sub.outcome
        return trace
    trace.outcome = "exported"
    if export_path:
        with open(export_path, "w") as fh:
            fh.write(write_trs(labeled))
        trace.export_path = export_path
    trace.notes.append(f"labeled system with {len(labeled)} rules left to an external prover")
    return trace


def _replay_local(trace: ProofTrace) -> tuple[str, list[str]]:
    trs = parse_trs(trace.inputs["system"])
    a = parse_algebra(trace.inputs["algebra"], trs.signature)
    prep = _prepare_local(trs, a)
    if not prep.report.ok:
        return "unknown", ["the algebra is not a partial model"]
    sub = trace.steps[0].data.get("subproof") if trace.steps else None
    if sub is None:
        return "unknown", ["no subproof recorded"]
    if sub["inputs"]["system"] != write_trs(prep.labeled):
        return "unknown", ["recorded labeled system differs from the recomputed one"]
    outcome, problems = _replay_global(ProofTrace.from_dict(sub))
    if outcome == "unknown" and trace.outcome == "exported":
        return "exported", problems
    return outcome, problems


# ---------------------------------------------------------------- stepwise scripts


@dataclass
class ScriptStep:
    kind: str  # stepwise, quasicomb, qremove
    removed: list[int]
    algebra: FiniteAlgebra | None = None
    ge: CarrierRelation | None = None
    strict: CarrierRelation | None = None
    leadsto: CarrierRelation | None = None
    interpretation: LinearInterpretation | None = None
    leadsto_total: bool = False
    line: int = 0


@dataclass
class Script:
    weak: list[int] = field(default_factory=list)
    seed_terms: list[Term] = field(default_factory=list)
    seed_automaton: FiniteAlgebra | None = None
    accepting: tuple[int, ...] = ()
    steps: list[ScriptStep] = field(default_factory=list)


STEP_KINDS = ("stepwise", "quasicomb", "qremove")


def parse_script(text: str, trs: Trs) -> Script:
    """Read a proof script; see the README for the format."""
    script = Script()
    for item in parse_sexprs(text):
        if not isinstance(item, list) or not item or isinstance(item[0], list):
            raise ParseError("expected a parenthesised declaration", *_pos(item))
        head = item[0]
        if head == "WEAK":
            script.weak.extend(_index(x, trs) for x in item[1:])
        elif head == "SEED":
            if len(item) != 2:
                raise ParseError("SEED expects one quoted term", head.line, head.col)
            t = parse_term(str(item[1]), (), trs.signature)
            script.seed_terms.append(t)
        elif head == "SEEDS":
            f = parse_algebra_items(item[1:], trs.signature)
            if f.accepting is None:
                raise ParseError("SEEDS needs an ACCEPT declaration", head.line, head.col)
            script.seed_automaton, script.accepting = f.algebra, f.accepting
        elif head == "STEP":
            script.steps.append(_parse_step(item, trs))
        else:
            raise ParseError(f"unknown declaration {head}", head.line, head.col)
    return script


def _pos(x) -> tuple[int, int]:
    while isinstance(x, list) and x:
        x = x[0]
    return (getattr(x, "line", 0), getattr(x, "col", 0))


def _index(x, trs: Trs) -> int:
    if isinstance(x, list) or not str(x).isdigit():
        raise ParseError("expected a rule index", *_pos(x))
    i = int(x)
    if i >= len(trs):
        raise ParseError(f"rule index {i} out of range (0..{len(trs) - 1})", *_pos(x))
    return i


def _parse_step(item: list, trs: Trs) -> ScriptStep:
    head = item[0]
    if len(item) < 2 or isinstance(item[1], list) or item[1] not in STEP_KINDS:
        raise ParseError(f"STEP kind must be one of {', '.join(STEP_KINDS)}", head.line, head.col)
    step = ScriptStep(str(item[1]), [], line=head.line)
    for part in item[2:]:
        if not isinstance(part, list) or not part or isinstance(part[0], list):
            raise ParseError("expected a parenthesised step component", *_pos(part))
        tag = part[0]
        if tag == "REMOVE":
            step.removed.extend(_index(x, trs) for x in part[1:])
        elif tag == "MODEL":
            f = parse_algebra_items(part[1:], trs.signature)
            step.algebra, step.ge, step.strict, step.leadsto = f.algebra, f.ge, f.strict, f.leadsto
            if f.polys is not None:
                step.interpretation = f.polys
        elif tag == "INTERPRETATION":
            f = parse_algebra_items(part[1:])
            step.interpretation = f.polys or LinearInterpretation()
        elif tag == "LEADSTO":
            if len(part) != 2 or part[1] != "total":
                raise ParseError("only (LEADSTO total) is allowed outside a MODEL", tag.line, tag.col)
            step.leadsto_total = True
        else:
            raise ParseError(f"unknown step component {tag}", tag.line, tag.col)
    if not step.removed:
        raise ParseError("a step must REMOVE at least one rule", head.line, head.col)
    if step.kind in ("quasicomb", "qremove") and step.algebra is None:
        raise ParseError(f"{step.kind} needs a MODEL", head.line, head.col)
    if step.kind == "quasicomb" and step.interpretation is None:
        raise ParseError("quasicomb needs an INTERPRETATION", head.line, head.col)
    if step.kind == "stepwise" and step.algebra is None and step.interpretation is None:
        raise ParseError("stepwise needs a MODEL or an INTERPRETATION", head.line, head.col)
    return step


def _report_lines(report: ModelReport, what: str) -> list[str]:
    return [f"{what}: {c}" for c in report.counterexamples]


def _seeds_defined(script: Script, a: FiniteAlgebra) -> list[str]:
    out = []
    for t in script.seed_terms:
        if interpret(a, t) is None:
            out.append(f"seed {render(t)} is undefined")
    if script.seed_automaton is not None:
        out.extend(_report_lines(seeds_included(script.seed_automaton, script.accepting, a), "seeds"))
    return out


def _seeds_defined_linear(script: Script, interp: LinearInterpretation) -> list[str]:
    def undefined(f):
        return f not in interp or interp[f] is None

    out = []
    for t in script.seed_terms:
        if any(undefined(u.symbol) for u in _apps(t)):
            out.append(f"seed {render(t)} is undefined")
    auto = script.seed_automaton
    if auto is not None:
        reach: set[int] = set()
        changed = True
        while changed:
            changed = False
            for f, args, v in auto.defined_entries():
                if v not in reach and all(x in reach for x in args):
                    reach.add(v)
                    changed = True
        useful = set(script.accepting) & reach
        changed = True
        while changed:
            changed = False
            for f, args, v in auto.defined_entries():
                if v in useful and all(x in reach for x in args):
                    for x in args:
                        if x not in useful:
                            useful.add(x)
                            changed = True
        for f, args, v in auto.defined_entries():
            if v in useful and all(x in useful for x in args) and undefined(f):
                out.append(f"seed language uses undefined symbol {f}")
                break
    return out


def _sub(trs: Trs, idx: Iterable[int]) -> Trs:
    return trs.with_rules(trs.rules[i] for i in sorted(idx))


def _labeled_checks(a, interp, strict_trs, weak_trs) -> list[str]:
    out = []
    for trs_part, strict in ((strict_trs, True), (weak_trs, False)):
        for r in label_trs(a, trs_part, allow_collapsing=True).rules:
            try:
                ok = check_rule(interp, r, strict)
            except MissingInterpretation as e:
                out.append(f"no interpretation for labeled symbol {e.args[0]}")
                continue
            if not ok:
                out.append(f"labeled rule {r} is not {'strictly' if strict else 'weakly'} decreasing")
    return out


def _check_step(step: ScriptStep, trs: Trs, script: Script, remaining: list[int],
                removed: list[int]) -> tuple[list[str], dict]:
    """Failures of one step (empty if it is valid) and data recorded in the trace."""
    weak = script.weak
    live = sorted(set(remaining) | set(removed) | set(weak))
    strict_set = sorted(step.removed)
    rest = sorted((set(remaining) - set(strict_set)) | set(weak))
    msgs: list[str] = []
    data: dict = {"strict": strict_set}
    for i in strict_set:
        if i in weak:
            msgs.append(f"rule {i} is a weak rule and cannot be removed")
        elif i not in remaining:
            msgs.append(f"rule {i} is not among the remaining rules")
    if msgs:
        return msgs, data
    a = step.algebra

    if step.kind == "qremove":
        ge = (step.ge or CarrierRelation.identity(a.size)).reflexive_closure()
        msgs += _report_lines(check_closed_monotone(a, ge), "monotonicity")
        msgs += _report_lines(check_relational_model(a, ge, _sub(trs, live)), "model")
        msgs += _seeds_defined(script, a)
        for i in strict_set:
            if defined_assignments(a, trs.rules[i].lhs):
                msgs.append(f"left-hand side of rule {i} is defined for some assignment")
        data["algebra"] = write_algebra(a, ge)
        return msgs, data

    if step.kind == "quasicomb":
        ge = (step.ge or CarrierRelation.identity(a.size)).reflexive_closure()
        interp = step.interpretation
        msgs += _report_lines(check_closed_monotone(a, ge), "monotonicity")
        msgs += _report_lines(check_relational_model(a, ge, _sub(trs, live)), "model")
        msgs += _seeds_defined(script, a)
        msgs += _labeled_checks(a, interp, _sub(trs, strict_set), _sub(trs, rest))
        mu = nf_replacement_map(a, _sub(trs, sorted(set(remaining) | set(weak))))
        shown = LinearInterpretation({f: form for f, form in interp.items() if f in mu})
        msgs += check_mu_monotone(shown, mu)
        msgs += check_label_compat(interp, [p for p in ge.pairs() if p[0] != p[1]])
        data["algebra"] = write_algebra(a, ge)
        data["interpretation"] = _forms_to_json(interp)
        data["axioms"] = "B = naturals with > and >=; relative well-foundedness and weak monotonicity hold"
        return msgs, data

    # stepwise
    if a is not None:
        size = a.size
        succ = step.strict or CarrierRelation.empty(size)
        ge = (step.ge or CarrierRelation.empty(size)).reflexive_closure()
        leads = step.leadsto or CarrierRelation.empty(size)
        if removed and step.leadsto is None:
            msgs.append("previously removed rules need a LEADSTO relation")
        for rel, name in ((succ, "strict"), (ge, "weak"), (leads, "leadsto")):
            msgs += _report_lines(check_closed_monotone(a, rel), f"monotonicity ({name})")
        if not check_relative_wf(succ, ge):
            msgs.append("strict relation is not well-founded relative to the weak one")
        msgs += _report_lines(check_relational_model(a, succ, _sub(trs, strict_set)), "strict model")
        msgs += _report_lines(check_relational_model(a, ge, _sub(trs, rest)), "weak model")
        msgs += _report_lines(check_relational_model(a, leads, _sub(trs, removed)), "leadsto model")
        msgs += _seeds_defined(script, a)
        data["algebra"] = write_algebra(a, ge, succ, leadsto=leads)
        return msgs, data
    interp = step.interpretation
    if removed and not step.leadsto_total:
        msgs.append("previously removed rules need (LEADSTO total)")
    msgs += check_mu_monotone(interp)
    for i in strict_set + rest:
        try:
            if not check_rule(interp, trs.rules[i], strict=i in strict_set):
                msgs.append(f"rule {i} is not {'strictly' if i in strict_set else 'weakly'} decreasing")
        except MissingInterpretation as e:
            msgs.append(f"no interpretation for symbol {e.args[0]}")
    for i in removed:
        r = trs.rules[i]
        try:
            if eval_symbolic(interp, r.lhs) is not None and eval_symbolic(interp, r.rhs) is None:
                msgs.append(f"removed rule {i} does not preserve definedness")
        except MissingInterpretation as e:
            msgs.append(f"no interpretation for symbol {e.args[0]}")
    msgs += _seeds_defined_linear(script, interp)
    data["interpretation"] = _forms_to_json(interp)
    data["axioms"] = "carrier = naturals with > and >=; leadsto is the total relation"
    return msgs, data


def check_script(trs: Trs, script: Script, script_text: str = "") -> ProofTrace:
    """Check every step of ``script`` against ``trs`` (weak rules as declared in the script)."""
    trace = ProofTrace("relative", {"system": write_trs(trs), "script": script_text})
    weak = set(script.weak)
    remaining = [i for i in range(len(trs)) if i not in weak]
    removed: list[int] = []
    all_ok = True
    for step in script.steps:
        msgs, data = _check_step(step, trs, script, remaining, removed)
        ok = not msgs
        trace.steps.append(ProofStep(step.kind, sorted(step.removed), data, ok, msgs))
        all_ok = all_ok and ok
        # later steps are checked against the script's plan even after a failure,
        # so each failure is reported by the step that causes it
        remaining = [i for i in remaining if i not in step.removed]
        if step.kind != "qremove":
            removed = sorted(set(removed) | set(step.removed))
    if all_ok and not remaining:
        trace.outcome = "proved"
    elif all_ok:
        trace.notes.append(f"rules {remaining} remain")
    return trace


def check_stepwise_script(r: Trs, s: Trs, script: Script, script_text: str = "") -> ProofTrace:
    """Relative termination of ``r`` over ``s``; rule indices refer to ``r`` followed by ``s``."""
    combined = Trs.from_rules(list(r.rules) + list(s.rules),
                              list(r.signature.items()) + list(s.signature.items()))
    weak = list(range(len(r), len(r) + len(s)))
    merged = Script(sorted(set(script.weak) | set(weak)), script.seed_terms, script.seed_automaton,
                    script.accepting, script.steps)
    return check_script(combined, merged, script_text)


def _replay_script(trace: ProofTrace) -> tuple[str, list[str]]:
    trs = parse_trs(trace.inputs["system"])
    again = check_script(trs, parse_script(trace.inputs["script"], trs), trace.inputs["script"])
    problems = [m for s in again.steps for m in s.messages]
    return again.outcome, problems


# ---------------------------------------------------------------- replay


def replay(trace: ProofTrace) -> tuple[str, list[str]]:
    """Re-check a trace from its recorded inputs; returns the outcome and any problems."""
    if trace.goal == "global":
        return _replay_global(trace)
    if trace.goal == "local":
        return _replay_local(trace)
    if trace.goal == "relative":
        return _replay_script(trace)
    if trace.goal == "rfc":
        from .rfc import replay_rfc

        return replay_rfc(trace)
    return "unknown", [f"unknown goal {trace.goal}"]


__all__ = [
    "Loop",
    "OUTCOMES",
    "ProofStep",
    "ProofTrace",
    "Script",
    "ScriptStep",
    "check_loop",
    "check_script",
    "check_stepwise_script",
    "find_loop",
    "lpo_gt",
    "parse_script",
    "prove_global",
    "prove_local",
    "prove_lpo",
    "replay",
]
