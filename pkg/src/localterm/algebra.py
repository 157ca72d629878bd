"""Finite partial algebras and the model checks built on them.

The carrier of a finite algebra is ``{0, ..., size-1}``; each symbol is
interpreted by a partial table from argument tuples to elements. Evaluation is
strict: a term is undefined as soon as one of its subterms is.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .terms import App, Signature, Term, Trs, Var, preorder, render, variables


class FiniteAlgebra:
    def __init__(
        self,
        signature: Signature,
        size: int,
        tables: Mapping[str, Mapping[tuple[int, ...], int]] | None = None,
    ):
        if size < 0:
            raise ValueError("carrier size must be non-negative")
        self.signature = signature
        self.size = size
        self.tables: dict[str, dict[tuple[int, ...], int]] = {f: {} for f in signature}
        for f, table in (tables or {}).items():
            for args, v in table.items():
                self.set(f, tuple(args), v)

    def set(self, f: str, args: tuple[int, ...], value: int) -> None:
        if f not in self.signature:
            raise KeyError(f"unknown symbol {f!r}")
        if len(args) != self.signature.arity(f):
            raise ValueError(f"{f} expects {self.signature.arity(f)} arguments, got {len(args)}")
        for a in (*args, value):
            if not 0 <= a < self.size:
                raise ValueError(f"element {a} outside carrier of size {self.size}")
        self.tables[f][tuple(args)] = value

    def apply(self, f: str, args: tuple[int, ...]) -> int | None:
        return self.tables[f].get(args)

    def defined_entries(self) -> Iterator[tuple[str, tuple[int, ...], int]]:
        for f in self.signature:
            for args in sorted(self.tables[f]):
                yield f, args, self.tables[f][args]

    def num_entries(self) -> int:
        return sum(len(t) for t in self.tables.values())

    def copy(self) -> "FiniteAlgebra":
        return FiniteAlgebra(self.signature.copy(), self.size, self.tables)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.size == other.size
            and self.signature == other.signature
            and self.tables == other.tables
        )

    def __repr__(self):
        return f"FiniteAlgebra(size={self.size}, entries={self.num_entries()})"


def interpret(a: FiniteAlgebra, t: Term, alpha: Mapping[str, int] | None = None) -> int | None:
    """Value of ``t`` under ``alpha``; None if undefined or a variable is unassigned."""
    if isinstance(t, Var):
        return None if alpha is None else alpha.get(t.name)
    vals = []
    for s in t.args:
        v = interpret(a, s, alpha)
        if v is None:
            return None
        vals.append(v)
    return a.tables[t.symbol].get(tuple(vals))


def _defined_values(a: FiniteAlgebra, t: Term, alpha: dict[str, int]) -> Iterator[tuple[int, dict[str, int]]]:
    """All (value, extension of alpha) with ``t`` defined, binding unbound variables."""
    if isinstance(t, Var):
        if t.name in alpha:
            yield alpha[t.name], alpha
        else:
            for v in range(a.size):
                yield v, {**alpha, t.name: v}
        return
    table = a.tables[t.symbol]
    if not t.args:
        v = table.get(())
        if v is not None:
            yield v, alpha
        return

    def rec(i: int, al: dict[str, int], vals: tuple[int, ...]):
        if i == len(t.args):
            v = table.get(vals)
            if v is not None:
                yield v, al
            return
        for v, al2 in _defined_values(a, t.args[i], al):
            yield from rec(i + 1, al2, vals + (v,))

    yield from rec(0, alpha, ())


def defined_assignments(a: FiniteAlgebra, t: Term) -> list[tuple[dict[str, int], int]]:
    """Assignments of the variables of ``t`` making it defined, in canonical order.

    Canonical order is lexicographic on the values of the variables taken in
    order of first occurrence.
    """
    vs = variables(t)
    found = [(tuple(al[x] for x in vs), v) for v, al in _defined_values(a, t, {})]
    found.sort()
    return [(dict(zip(vs, key)), v) for key, v in found]


def all_assignments(names: list[str], size: int) -> Iterator[dict[str, int]]:
    for vals in itertools.product(range(size), repeat=len(names)):
        yield dict(zip(names, vals))


# ---------------------------------------------------------------- reports


@dataclass
class Counterexample:
    kind: str
    rule: int | None = None
    assignment: dict[str, int] | None = None
    lhs: int | None = None
    rhs: int | None = None
    detail: str = ""

    def __str__(self):
        parts = [self.kind]
        if self.rule is not None:
            parts.append(f"rule {self.rule}")
        if self.assignment is not None:
            parts.append("alpha=" + ",".join(f"{k}:{v}" for k, v in self.assignment.items()))
        if self.lhs is not None or self.kind in ("model", "relational-model"):
            parts.append(f"lhs={_show(self.lhs)} rhs={_show(self.rhs)}")
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


def _show(v):
    return "undefined" if v is None else str(v)


@dataclass
class ModelReport:
    ok: bool
    counterexamples: list[Counterexample] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "ok"
        head = str(self.counterexamples[0]) if self.counterexamples else "failed"
        more = len(self.counterexamples) - 1
        return head + (f" (+{more} more)" if more > 0 else "")


def _report(cex: list[Counterexample]) -> ModelReport:
    return ModelReport(not cex, cex)


# ---------------------------------------------------------------- relations


class CarrierRelation:
    """A binary relation on ``{0, ..., size-1}`` stored as a boolean matrix."""

    def __init__(self, size: int, pairs: Iterable[tuple[int, int]] = ()):
        self.size = size
        self.matrix = np.zeros((size, size), dtype=bool)
        for a, b in pairs:
            self.add(a, b)

    def add(self, a: int, b: int) -> None:
        if not (0 <= a < self.size and 0 <= b < self.size):
            raise ValueError(f"pair ({a}, {b}) outside carrier of size {self.size}")
        self.matrix[a, b] = True

    @classmethod
    def identity(cls, size: int) -> "CarrierRelation":
        return cls(size, ((i, i) for i in range(size)))

    @classmethod
    def total(cls, size: int) -> "CarrierRelation":
        r = cls(size)
        r.matrix[:] = True
        return r

    @classmethod
    def empty(cls, size: int) -> "CarrierRelation":
        return cls(size)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return bool(self.matrix[a, b])

    def successors(self, a: int) -> list[int]:
        return [int(b) for b in np.flatnonzero(self.matrix[a])]

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self.matrix))]

    def union(self, other: "CarrierRelation") -> "CarrierRelation":
        r = CarrierRelation(self.size)
        r.matrix = self.matrix | other.matrix
        return r

    def reflexive_closure(self) -> "CarrierRelation":
        r = CarrierRelation(self.size)
        r.matrix = self.matrix | np.eye(self.size, dtype=bool)
        return r

    def __eq__(self, other):
        return (
            isinstance(other, CarrierRelation)
            and self.size == other.size
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    def __repr__(self):
        return f"CarrierRelation({self.size}, {self.pairs()})"


# ---------------------------------------------------------------- model checks


def check_partial_model(a: FiniteAlgebra, trs: Trs, limit: int = 20) -> ModelReport:
    """Whenever a left-hand side is defined the right-hand side has the same value."""
    cex: list[Counterexample] = []
    for i, r in enumerate(trs.rules):
        for alpha, lv in defined_assignments(a, r.lhs):
            rv = interpret(a, r.rhs, alpha)
            if rv != lv:
                cex.append(Counterexample("model", i, alpha, lv, rv))
                if len(cex) >= limit:
                    return _report(cex)
    return _report(cex)


def check_relational_model(
    a: FiniteAlgebra, rel: CarrierRelation, trs: Trs, limit: int = 20
) -> ModelReport:
    """Whenever a left-hand side is defined, lhs rel rhs holds (rhs defined)."""
    cex: list[Counterexample] = []
    for i, r in enumerate(trs.rules):
        for alpha, lv in defined_assignments(a, r.lhs):
            rv = interpret(a, r.rhs, alpha)
            if rv is None or (lv, rv) not in rel:
                cex.append(Counterexample("relational-model", i, alpha, lv, rv))
                if len(cex) >= limit:
                    return _report(cex)
    return _report(cex)


def check_closed_monotone(
    a: FiniteAlgebra,
    rel: CarrierRelation,
    mu: Mapping[str, Iterable[int]] | None = None,
    limit: int = 20,
) -> ModelReport:
    """Every interpretation is closed and monotone w.r.t. ``rel``.

    If ``mu`` is given, only the listed (1-based) argument positions of each
    symbol are checked.
    """
    cex: list[Counterexample] = []
    for f in a.signature:
        k = a.signature.arity(f)
        table = a.tables[f]
        allowed = range(1, k + 1) if mu is None else sorted(set(mu.get(f, ())))
        for args in sorted(table):
            v = table[args]
            for pos in allowed:
                x = args[pos - 1]
                for y in rel.successors(x):
                    args2 = args[: pos - 1] + (y,) + args[pos:]
                    w = table.get(args2)
                    if w is None:
                        cex.append(Counterexample(
                            "closed", detail=f"{f}{args} defined, {f}{args2} undefined ({x} -> {y} at {pos})"))
                    elif (v, w) not in rel:
                        cex.append(Counterexample(
                            "monotone", detail=f"{f}{args}={v}, {f}{args2}={w} ({x} -> {y} at {pos})"))
                    if len(cex) >= limit:
                        return _report(cex)
    return _report(cex)


def check_relative_wf(strict: CarrierRelation, weak: CarrierRelation) -> bool:
    """No infinite chain of strict and weak steps with infinitely many strict ones.

    On a finite carrier this fails exactly when a strict edge lies inside a
    strongly connected component of the union of both relations.
    """
    if strict.size != weak.size:
        raise ValueError("relations over different carriers")
    union = strict.matrix | weak.matrix
    if strict.size == 0:
        return True
    _, comp = connected_components(csr_matrix(union), directed=True, connection="strong")
    src, dst = np.nonzero(strict.matrix)
    return not bool(np.any(comp[src] == comp[dst]))


# ---------------------------------------------------------------- core


def core(a: FiniteAlgebra) -> list[int]:
    """Elements that are values of ground terms (least fixpoint)."""
    reached: set[int] = set()
    changed = True
    while changed:
        changed = False
        for f in a.signature:
            for args, v in a.tables[f].items():
                if v not in reached and all(x in reached for x in args):
                    reached.add(v)
                    changed = True
    return sorted(reached)


def restrict_to_core(a: FiniteAlgebra) -> tuple[FiniteAlgebra, dict[int, int]]:
    """Restrict to the core, renumbering the surviving elements in ascending order."""
    keep = core(a)
    ren = {old: new for new, old in enumerate(keep)}
    b = FiniteAlgebra(a.signature.copy(), len(keep))
    for f in a.signature:
        for args, v in a.tables[f].items():
            if v in ren and all(x in ren for x in args):
                b.tables[f][tuple(ren[x] for x in args)] = ren[v]
    return b, ren


def is_core(a: FiniteAlgebra) -> bool:
    return len(core(a)) == a.size


# ---------------------------------------------------------------- normal-form states


def nf_states(a: FiniteAlgebra, trs: Trs) -> frozenset[int]:
    """Core elements all of whose ground terms are normal forms (greatest fixpoint)."""
    c = set(core(a))
    bad: set[int] = set()
    for r in trs.rules:
        for alpha, lv in defined_assignments(a, r.lhs):
            if all(v in c for v in alpha.values()):
                bad.add(lv)
    changed = True
    while changed:
        changed = False
        for f in a.signature:
            for args, v in a.tables[f].items():
                if v not in bad and all(x in c for x in args) and any(x in bad for x in args):
                    bad.add(v)
                    changed = True
    return frozenset(c - bad)


# ---------------------------------------------------------------- undefined implies redex


class RedexAutomaton:
    """Deterministic bottom-up automaton for 'contains a redex' (left-linear rules).

    A state is either ``REDEX`` or the set of non-variable subpatterns of the
    left-hand sides that the term matches.
    """

    REDEX = "redex"

    def __init__(self, trs: Trs):
        if not trs.is_left_linear():
            raise ValueError("redex automaton needs a left-linear TRS")
        pats: dict[Term, int] = {}
        for r in trs.rules:
            for u in preorder(r.lhs):
                if isinstance(u, App) and u not in pats:
                    pats[u] = len(pats)
        self.patterns = list(pats)
        self.index = pats
        self.lhs_ids = frozenset(pats[r.lhs] for r in trs.rules)
        self.by_symbol: dict[str, list[int]] = {}
        for p, i in pats.items():
            self.by_symbol.setdefault(p.symbol, []).append(i)

    def step(self, f: str, states: tuple) -> Any:
        if any(q == self.REDEX for q in states):
            return self.REDEX
        matched = []
        for i in self.by_symbol.get(f, ()):
            p = self.patterns[i]
            if all(isinstance(sp, Var) or self.index[sp] in q for sp, q in zip(p.args, states)):
                matched.append(i)
        if self.lhs_ids.intersection(matched):
            return self.REDEX
        return frozenset(matched)


def check_undefined_implies_redex(a: FiniteAlgebra, trs: Trs) -> ModelReport:
    """Every ground term with undefined value contains a redex.

    Builds the product of the algebra completed with a sink (None) and the
    redex automaton, and looks for a reachable pair (sink, no redex). The
    counterexample carries a witness term.
    """
    ra = RedexAutomaton(trs)
    sig = a.signature
    witness: dict[tuple, Term] = {}
    frontier = True
    while frontier:
        frontier = False
        states = list(witness)
        for f in sig:
            k = sig.arity(f)
            for combo in itertools.product(states, repeat=k):
                vals = tuple(s[0] for s in combo)
                v = None if any(x is None for x in vals) else a.tables[f].get(vals)
                q = ra.step(f, tuple(s[1] for s in combo))
                key = (v, q)
                if key not in witness:
                    witness[key] = App(f, [witness[s] for s in combo])
                    frontier = True
                    if v is None and q != RedexAutomaton.REDEX:
                        return ModelReport(False, [Counterexample(
                            "undefined-normal-form", detail=f"term {render(witness[key])} is undefined and contains no redex")])
    return ModelReport(True)


# ---------------------------------------------------------------- languages


def seeds_included(
    seeds: FiniteAlgebra, accepting: Iterable[int], a: FiniteAlgebra
) -> ModelReport:
    """Every ground term accepted by ``seeds`` is defined in ``a``."""
    acc = set(accepting)
    sig = seeds.signature
    witness: dict[tuple, Term] = {}
    frontier = True
    while frontier:
        frontier = False
        states = list(witness)
        for f in sig:
            k = sig.arity(f)
            for combo in itertools.product(states, repeat=k):
                sv = seeds.tables[f].get(tuple(s[0] for s in combo))
                if sv is None:
                    continue
                avals = tuple(s[1] for s in combo)
                if f in a.signature and not any(x is None for x in avals):
                    av = a.tables[f].get(avals)
                else:
                    av = None
                key = (sv, av)
                if key not in witness:
                    witness[key] = App(f, [witness[s] for s in combo])
                    frontier = True
                    if av is None and sv in acc:
                        return ModelReport(False, [Counterexample(
                            "seed", detail=f"seed term {render(witness[key])} is undefined")])
    return ModelReport(True)


# ---------------------------------------------------------------- isomorphism


def canonical_numbering(a: FiniteAlgebra) -> list[int]:
    """Elements in the order they are generated from the constants.

    Repeatedly number the result of the least defined entry whose arguments
    are already numbered and whose result is not; entries are ordered by
    (largest argument number, symbol index, argument numbers). The order
    depends only on the structure of the algebra.
    """
    sig = a.signature
    number: dict[int, int] = {}
    order: list[int] = []
    heap: list = []
    pending: dict[str, list] = {f: sorted(a.tables[f].items()) for f in sig}
    sym_index = {f: i for i, f in enumerate(sig)}

    def push_ready():
        for f in sig:
            rest = []
            for args, v in pending[f]:
                if all(x in number for x in args):
                    nums = tuple(number[x] for x in args)
                    heapq.heappush(heap, (max(nums, default=-1), sym_index[f], nums, v))
                else:
                    rest.append((args, v))
            pending[f] = rest

    push_ready()
    while heap:
        _, _, _, v = heapq.heappop(heap)
        if v in number:
            continue
        number[v] = len(order)
        order.append(v)
        push_ready()
    return order


def models_isomorphic(a: FiniteAlgebra, b: FiniteAlgebra) -> dict[int, int] | None:
    """An isomorphism between two core algebras as a map a-element -> b-element, or None."""
    if a.size != b.size or a.signature.items() != b.signature.items():
        return None
    oa, ob = canonical_numbering(a), canonical_numbering(b)
    if len(oa) != a.size or len(ob) != b.size:
        return None
    iso = dict(zip(oa, ob))
    for f in a.signature:
        ta, tb = a.tables[f], b.tables[f]
        if len(ta) != len(tb):
            return None
        for args, v in ta.items():
            if tb.get(tuple(iso[x] for x in args)) != iso[v]:
                return None
    return iso


def accepts(a: FiniteAlgebra, t: Term) -> bool:
    return interpret(a, t) is not None
