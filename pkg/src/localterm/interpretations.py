"""Linear polynomial interpretations over the natural numbers.

A symbol of arity k is interpreted by ``c0 + c1*x1 + ... + ck*xk`` with
natural coefficients, or left undefined. Comparisons between linear
polynomials use absolute positiveness: ``p >= q`` for all arguments iff every
coefficient of ``p`` is at least the one of ``q``; strictness additionally
needs a strictly larger constant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from .terms import Rule, Term, Trs, Var, variables

Form = tuple[int, tuple[int, ...]]  # (c0, (c1, ..., ck))


class MissingInterpretation(KeyError):
    pass


class LinearInterpretation:
    """Symbol name -> linear form, or None for an undefined symbol."""

    def __init__(self, forms: Mapping[str, Form | None] | None = None):
        self.forms: dict[str, Form | None] = {}
        for name, form in (forms or {}).items():
            self.forms[name] = None if form is None else (int(form[0]), tuple(int(c) for c in form[1]))

    def __getitem__(self, name: str) -> Form | None:
        try:
            return self.forms[name]
        except KeyError:
            raise MissingInterpretation(name) from None

    def __contains__(self, name) -> bool:
        return name in self.forms

    def items(self):
        return self.forms.items()

    def with_form(self, name: str, form: Form | None) -> "LinearInterpretation":
        out = LinearInterpretation(self.forms)
        out.forms[name] = form
        return out

    def __eq__(self, other):
        return isinstance(other, LinearInterpretation) and self.forms == other.forms

    def __repr__(self):
        return f"LinearInterpretation({self.forms})"

    def describe(self, name: str) -> str:
        form = self[name]
        if form is None:
            return "undefined"
        c0, cs = form
        parts = []
        for i, c in enumerate(cs, 1):
            if c:
                parts.append(f"{c if c != 1 else ''}x{i}")
        if c0 or not parts:
            parts.append(str(c0))
        return " + ".join(parts)


@dataclass(frozen=True)
class LinearPoly:
    """``const + sum(coeff * var)``; zero coefficients are dropped."""

    const: int
    coeffs: tuple[tuple[str, int], ...] = ()

    @classmethod
    def make(cls, const: int, coeffs: Mapping[str, int]) -> "LinearPoly":
        return cls(const, tuple((v, c) for v, c in coeffs.items() if c))

    def coeff(self, var: str) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def __str__(self):
        parts = [f"{c}*{v}" if c != 1 else v for v, c in self.coeffs]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


def eval_symbolic(i: LinearInterpretation, t: Term) -> LinearPoly | None:
    """The linear polynomial of ``t`` over its variables, None if undefined."""
    res = _eval(i, t)
    if res is None:
        return None
    const, coeffs = res
    order = variables(t)
    return LinearPoly.make(const, {v: coeffs.get(v, 0) for v in order})


def _eval(i: LinearInterpretation, t: Term):
    if isinstance(t, Var):
        return 0, {t.name: 1}
    form = i[t.symbol]
    if form is None:
        return None
    c0, cs = form
    if len(cs) != len(t.args):
        raise ValueError(f"form for {t.symbol} has {len(cs)} coefficients, arity is {len(t.args)}")
    const, coeffs = c0, {}
    for c, arg in zip(cs, t.args):
        sub = _eval(i, arg)
        if sub is None:
            return None
        if c:
            const += c * sub[0]
            for v, k in sub[1].items():
                coeffs[v] = coeffs.get(v, 0) + c * k
    return const, coeffs


def poly_ge(p: LinearPoly, q: LinearPoly, strict: bool = False) -> bool:
    """``p >= q`` (or ``p > q``) for all natural arguments, by absolute positiveness."""
    names = {v for v, _ in p.coeffs} | {v for v, _ in q.coeffs}
    if any(p.coeff(v) < q.coeff(v) for v in names):
        return False
    return p.const > q.const if strict else p.const >= q.const


def check_rule(i: LinearInterpretation, rule: Rule, strict: bool) -> bool:
    """Decrease of one rule; vacuously true when the left-hand side is undefined."""
    lp = eval_symbolic(i, rule.lhs)
    if lp is None:
        return True
    rp = eval_symbolic(i, rule.rhs)
    if rp is None:
        return False
    # variables of the rhs are variables of the lhs, so compare over the lhs order
    return poly_ge(lp, rp, strict)


def check_mu_monotone(i: LinearInterpretation, mu: Mapping[str, Iterable[int]] | None = None) -> list[str]:
    """Violations of strict monotonicity (coefficient >= 1) in the replacement-map positions."""
    bad = []
    for name, form in i.items():
        if form is None:
            continue
        positions = range(1, len(form[1]) + 1) if mu is None else mu.get(name, ())
        for p in sorted(positions):
            if form[1][p - 1] < 1:
                bad.append(f"{name}: coefficient of argument {p} is 0")
    return bad


def check_label_compat(i: LinearInterpretation, ge_pairs: Iterable[tuple[int, int]]) -> list[str]:
    """``f^(..a..) >= f^(..a'..)`` coefficient-wise whenever a >= a' (both symbols interpreted)."""
    from .labeling import label_symbol, split_label

    succ: dict[int, set[int]] = {}
    for a, b in ge_pairs:
        if a != b:
            succ.setdefault(a, set()).add(b)
    bad = []
    for name, form in i.items():
        if form is None:
            continue
        base, lab = split_label(name)
        for j, a in enumerate(lab):
            for b in sorted(succ.get(a, ())):
                other = label_symbol(base, lab[:j] + (b,) + lab[j + 1:])
                if other not in i or i[other] is None:
                    continue
                c0, cs = form
                d0, ds = i[other]
                if c0 < d0 or any(x < y for x, y in zip(cs, ds)):
                    bad.append(f"{name} does not dominate {other}")
    return bad


# ---------------------------------------------------------------- search


def _compile(t: Term, var_index: dict[str, int], width: int) -> Callable:
    """A function forms -> coefficient vector [c0, c_x1, ...] for ``t``."""
    if isinstance(t, Var):
        k = var_index[t.name]

        def leaf(forms):
            v = [0] * width
            v[k + 1] = 1
            return v

        return leaf
    subs = [_compile(a, var_index, width) for a in t.args]
    f = t.symbol

    def node(forms):
        c0, cs = forms[f]
        out = [0] * width
        out[0] = c0
        for c, sub in zip(cs, subs):
            if c:
                vec = sub(forms)
                for j in range(width):
                    if vec[j]:
                        out[j] += c * vec[j]
        return out

    return node


class _CompiledRule:
    def __init__(self, rule: Rule):
        vs = variables(rule.lhs)
        idx = {v: k for k, v in enumerate(vs)}
        width = len(vs) + 1
        self.lhs = _compile(rule.lhs, idx, width)
        self.rhs = _compile(rule.rhs, idx, width)
        syms: dict[str, None] = {}
        for side in (rule.lhs, rule.rhs):
            for s in _symbols(side):
                syms.setdefault(s)
        self.symbols = list(syms)

    def decrease(self, forms) -> int:
        """2 strict, 1 weak, 0 neither."""
        lv, rv = self.lhs(forms), self.rhs(forms)
        for a, b in zip(lv[1:], rv[1:]):
            if a < b:
                return 0
        if lv[0] > rv[0]:
            return 2
        return 1 if lv[0] == rv[0] else 0


def _symbols(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        return
    yield t.symbol
    for a in t.args:
        yield from _symbols(a)


def candidate_forms(arity: int, bound: int, monotone: Iterable[int] = ()) -> list[Form]:
    """All forms with coefficients in 0..bound (>= 1 at monotone positions), simplest first."""
    mono = set(monotone)
    ranges = [range(1 if p in mono else 0, bound + 1) for p in range(1, arity + 1)]
    forms = [(c0, cs) for c0 in range(bound + 1) for cs in itertools.product(*ranges)]
    forms.sort(key=lambda f: (f[0] + sum(abs(c - 1) for c in f[1]), f))
    return forms


def search_linear(
    trs: Trs,
    strict_target: Iterable[int],
    coeff_bound: int = 3,
    mu: Mapping[str, Iterable[int]] | None = None,
    ge_pairs: Iterable[tuple[int, int]] | None = None,
    max_nodes: int = 2_000_000,
) -> LinearInterpretation | None:
    """Bounded backtracking search for a linear interpretation.

    All rules must decrease weakly and the rules in ``strict_target`` strictly.
    Positions in ``mu`` (all positions if None) get coefficients >= 1. With
    ``ge_pairs`` the labeled forms must also be compatible with that order.
    Coefficient bounds are tried in increasing order up to ``coeff_bound``.
    """
    targets = set(strict_target)
    rules = [_CompiledRule(r) for r in trs.rules]
    arity = {}
    for r in trs.rules:
        for side in (r.lhs, r.rhs):
            _arities(side, arity)
    # symbols: those in rules first, ordered so that rules become checkable early
    order: list[str] = []
    for k in sorted(range(len(rules)), key=lambda k: (k not in targets, len(rules[k].symbols), k)):
        for s in rules[k].symbols:
            if s not in order:
                order.append(s)
    pos = {s: n for n, s in enumerate(order)}
    ready: list[list[int]] = [[] for _ in order]
    for k, cr in enumerate(rules):
        last = max((pos[s] for s in cr.symbols), default=-1)
        if last < 0:
            continue
        ready[last].append(k)
    compat = _compat_checks(order, ge_pairs) if ge_pairs is not None else [[] for _ in order]
    budget = [max_nodes]

    for bound in range(1, coeff_bound + 1):
        cands = [
            candidate_forms(arity[s], bound, range(1, arity[s] + 1) if mu is None else mu.get(s, ()))
            for s in order
        ]
        forms: dict[str, Form] = {}

        def go(n: int) -> bool:
            if n == len(order):
                return True
            s = order[n]
            for form in cands[n]:
                budget[0] -= 1
                if budget[0] < 0:
                    return False
                forms[s] = form
                if all(_dominates(forms[a], forms[b]) for a, b in compat[n]) and all(
                    rules[k].decrease(forms) >= (2 if k in targets else 1) for k in ready[n]
                ):
                    if go(n + 1):
                        return True
            del forms[s]
            return False

        if go(0):
            return LinearInterpretation(dict(forms))
        if budget[0] < 0:
            return None
    return None


def _arities(t: Term, out: dict[str, int]) -> None:
    if isinstance(t, Var):
        return
    out[t.symbol] = len(t.args)
    for a in t.args:
        _arities(a, out)


def _dominates(f: Form, g: Form) -> bool:
    return f[0] >= g[0] and all(x >= y for x, y in zip(f[1], g[1]))


def _compat_checks(order: list[str], ge_pairs) -> list[list[tuple[str, str]]]:
    from .labeling import label_symbol, split_label

    succ: dict[int, set[int]] = {}
    for a, b in ge_pairs:
        if a != b:
            succ.setdefault(a, set()).add(b)
    pos = {s: n for n, s in enumerate(order)}
    checks: list[list[tuple[str, str]]] = [[] for _ in order]
    for s in order:
        base, lab = split_label(s)
        for j, a in enumerate(lab):
            for b in succ.get(a, ()):
                other = label_symbol(base, lab[:j] + (b,) + lab[j + 1:])
                if other in pos:
                    checks[max(pos[s], pos[other])].append((s, other))
    return checks


def strict_rules(i: LinearInterpretation, trs: Trs) -> list[int]:
    return [k for k, r in enumerate(trs.rules) if check_rule(i, r, strict=True)]
