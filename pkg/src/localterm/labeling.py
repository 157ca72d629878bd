"""Semantic labeling of terms and rules by a finite partial algebra.

Every symbol occurrence ``f(t1..tn)`` is labeled with the tuple of argument
values; rule instances whose left-hand side is undefined are dropped. Labeled
symbols are written ``f^a1_a2_..``; nullary symbols keep their name.
"""
from __future__ import annotations

from typing import Mapping

from .algebra import FiniteAlgebra, defined_assignments, interpret, nf_states
from .terms import App, Rule, Signature, Term, Trs, Var


def label_symbol(f: str, label: tuple[int, ...]) -> str:
    if not label:
        return f
    return f + "^" + "_".join(str(a) for a in label)


def split_label(name: str) -> tuple[str, tuple[int, ...]]:
    """Inverse of `label_symbol`; unlabeled names give an empty label."""
    if "^" not in name:
        return name, ()
    base, _, rest = name.rpartition("^")
    return base, tuple(int(x) for x in rest.split("_"))


def labeled_signature(a: FiniteAlgebra) -> Signature:
    """All ``f^lambda`` with ``[f](lambda)`` defined."""
    sig = Signature()
    for f, args, _ in a.defined_entries():
        sig.add(label_symbol(f, args), len(args))
    return sig


def label_term(a: FiniteAlgebra, t: Term, alpha: Mapping[str, int] | None = None) -> Term:
    """Label ``t`` under ``alpha``; every proper subterm must be defined."""
    if isinstance(t, Var):
        return t
    vals = []
    for s in t.args:
        v = interpret(a, s, alpha)
        if v is None:
            raise ValueError(f"subterm {s} is undefined, cannot label")
        vals.append(v)
    return App(label_symbol(t.symbol, tuple(vals)), [label_term(a, s, alpha) for s in t.args])


def label_trs(a: FiniteAlgebra, trs: Trs, allow_collapsing: bool = False) -> Trs:
    """Labeled rules ordered by rule index, then assignments in canonical order."""
    if trs.is_collapsing() and not allow_collapsing:
        raise ValueError("labeling needs a non-collapsing TRS; eliminate collapsing rules first")
    rules: list[Rule] = []
    for r in trs.rules:
        for alpha, _ in defined_assignments(a, r.lhs):
            if interpret(a, r.rhs, alpha) is None:
                raise ValueError(f"right-hand side of {r} undefined under {alpha}; not a model")
            rules.append(Rule(label_term(a, r.lhs, alpha), label_term(a, r.rhs, alpha)))
    return Trs.from_rules(rules, labeled_signature(a).items())


def nf_replacement_map(a: FiniteAlgebra, trs: Trs) -> dict[str, frozenset[int]]:
    """For every labeled symbol, the argument positions whose label is not a normal-form state."""
    nf = nf_states(a, trs)
    mu = {}
    for f, args, _ in a.defined_entries():
        mu[label_symbol(f, args)] = frozenset(i for i, x in enumerate(args, 1) if x not in nf)
    return mu
