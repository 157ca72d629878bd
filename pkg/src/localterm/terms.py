"""First-order terms, rules and rewriting.

Terms are immutable trees of `Var` and `App` nodes. Function symbols are plain
strings; a signature fixes their arities and a canonical order. Positions are
tuples of 1-based argument indices, the root being ``()``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Literal, Mapping, Sequence

Position = tuple[int, ...]
Strategy = Literal["lo", "li"]
STRATEGIES = ("lo", "li")


class Term:
    __slots__ = ()

    def is_var(self) -> bool:
        return isinstance(self, Var)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("symbol", "args", "_hash")

    def __init__(self, symbol: str, args: Sequence[Term] = ()):
        self.symbol = symbol
        self.args = tuple(args)
        self._hash = hash((symbol, self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.symbol == other.symbol
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App<{render(self)}>"

    def __str__(self):
        return render(self)


def app(symbol: str, *args: Term) -> App:
    return App(symbol, args)


def render(t: Term) -> str:
    """Render a term in TPDB syntax; constants print without parentheses."""
    parts: list[str] = []

    def go(u: Term) -> None:
        if isinstance(u, Var):
            parts.append(u.name)
            return
        parts.append(u.symbol)
        if u.args:
            parts.append("(")
            for i, a in enumerate(u.args):
                if i:
                    parts.append(",")
                go(a)
            parts.append(")")

    go(t)
    return "".join(parts)


# ---------------------------------------------------------------- signatures


class SignatureError(ValueError):
    pass


class Signature:
    """Ordered map from symbol names to arities; the order is canonical."""

    __slots__ = ("_arity", "_order")

    def __init__(self, items: Iterable[tuple[str, int]] = ()):
        self._arity: dict[str, int] = {}
        self._order: list[str] = []
        for name, k in items:
            self.add(name, k)

    def add(self, name: str, arity: int) -> None:
        if not name:
            raise SignatureError("symbol names must be non-empty")
        if arity < 0:
            raise SignatureError(f"negative arity for {name!r}")
        if name in self._arity:
            if self._arity[name] != arity:
                raise SignatureError(
                    f"symbol {name!r} used with arity {arity} and {self._arity[name]}"
                )
            return
        self._arity[name] = arity
        self._order.append(name)

    def arity(self, name: str) -> int:
        return self._arity[name]

    def index(self, name: str) -> int:
        return self._order.index(name)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self._order)

    def items(self) -> list[tuple[str, int]]:
        return [(s, self._arity[s]) for s in self._order]

    def constants(self) -> list[str]:
        return [s for s in self._order if self._arity[s] == 0]

    def copy(self) -> "Signature":
        return Signature(self.items())

    def __contains__(self, name) -> bool:
        return name in self._arity

    def __iter__(self):
        return iter(self._order)

    def __len__(self):
        return len(self._order)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.items() == other.items()

    def __repr__(self):
        inner = ", ".join(f"{s}/{k}" for s, k in self.items())
        return f"Signature({inner})"


def collect_symbols(t: Term, sig: Signature) -> None:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            sig.add(u.symbol, len(u.args))
            stack.extend(reversed(u.args))


# ---------------------------------------------------------------- term utilities


def variables(t: Term) -> list[str]:
    """Variable names in order of first (left-to-right) occurrence."""
    seen: dict[str, None] = {}
    for u in preorder(t):
        if isinstance(u, Var):
            seen.setdefault(u.name)
    return list(seen)


def preorder(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.extend(reversed(u.args))


def is_ground(t: Term) -> bool:
    return all(not isinstance(u, Var) for u in preorder(t))


def size(t: Term) -> int:
    return sum(1 for _ in preorder(t))


def height(t: Term) -> int:
    """Height of a term; variables and constants have height 0."""
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(height(a) for a in t.args)


def positions(t: Term) -> list[Position]:
    """All positions in pre-order (outermost-leftmost first)."""
    out: list[Position] = []
    stack: list[tuple[Term, Position]] = [(t, ())]
    while stack:
        u, p = stack.pop()
        out.append(p)
        if isinstance(u, App):
            for i in range(len(u.args), 0, -1):
                stack.append((u.args[i - 1], p + (i,)))
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise IndexError(f"invalid position {p}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    if not isinstance(t, App) or not 1 <= p[0] <= len(t.args):
        raise IndexError(f"invalid position {p}")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], s)
    return App(t.symbol, args)


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.symbol, [substitute(a, sigma) for a in t.args])


def match(pattern: Term, t: Term, sigma: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Syntactic matching; non-linear patterns require equal instances."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = u
            elif bound != u:
                return None
            continue
        if not isinstance(u, App) or u.symbol != p.symbol or len(u.args) != len(p.args):
            return None
        stack.extend(zip(p.args, u.args))
    return sigma


def is_linear(t: Term) -> bool:
    names = [u.name for u in preorder(t) if isinstance(u, Var)]
    return len(names) == len(set(names))


# ---------------------------------------------------------------- rules


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise RuleError(f"left-hand side of {self} is a variable")
        missing = set(variables(self.rhs)) - set(variables(self.lhs))
        if missing:
            raise RuleError(
                f"rule {self} has right-hand side variables {sorted(missing)} not in the left-hand side"
            )

    def is_collapsing(self) -> bool:
        return isinstance(self.rhs, Var)

    def __str__(self):
        return f"{render(self.lhs)} -> {render(self.rhs)}"


@dataclass(frozen=True)
class Trs:
    rules: tuple[Rule, ...]
    signature: Signature = field(compare=False)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], extra: Iterable[tuple[str, int]] = ()) -> "Trs":
        rules = tuple(rules)
        sig = Signature()
        for r in rules:
            collect_symbols(r.lhs, sig)
            collect_symbols(r.rhs, sig)
        for name, k in extra:
            sig.add(name, k)
        return cls(rules, sig)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def is_left_linear(self) -> bool:
        return all(is_linear(r.lhs) for r in self.rules)

    def is_collapsing(self) -> bool:
        return any(r.is_collapsing() for r in self.rules)

    def with_rules(self, rules: Iterable[Rule]) -> "Trs":
        """Same signature, different rules."""
        return Trs(tuple(rules), self.signature.copy())


# ---------------------------------------------------------------- rewriting


def _redexes_at(trs: Trs, t: Term) -> Iterator[tuple[int, Term]]:
    if not isinstance(t, App):
        return
    for i, r in enumerate(trs.rules):
        sigma = match(r.lhs, t)
        if sigma is not None:
            yield i, substitute(r.rhs, sigma)


def one_step_successors(trs: Trs, t: Term) -> list[tuple[int, Position, Term]]:
    """All one-step reducts, ordered by position (pre-order) then rule index."""
    out = []
    for p in positions(t):
        u = subterm_at(t, p)
        for i, res in _redexes_at(trs, u):
            out.append((i, p, replace_at(t, p, res)))
    return out


def is_redex(trs: Trs, t: Term) -> bool:
    return any(True for _ in _redexes_at(trs, t))


def is_normal_form(trs: Trs, t: Term) -> bool:
    return not any(is_redex(trs, u) for u in preorder(t))


def _find_lo(trs: Trs, t: Term, p: Position):
    for i, res in _redexes_at(trs, t):
        return i, p, res
    if isinstance(t, App):
        for k, a in enumerate(t.args, 1):
            hit = _find_lo(trs, a, p + (k,))
            if hit is not None:
                return hit
    return None


def _find_li(trs: Trs, t: Term, p: Position):
    if isinstance(t, App):
        for k, a in enumerate(t.args, 1):
            hit = _find_li(trs, a, p + (k,))
            if hit is not None:
                return hit
    for i, res in _redexes_at(trs, t):
        return i, p, res
    return None


def strategy_step(trs: Trs, t: Term, strategy: Strategy = "lo"):
    """One step of the strategy: ``(rule index, position, reduct)`` or None."""
    if strategy == "lo":
        hit = _find_lo(trs, t, ())
    elif strategy == "li":
        hit = _find_li(trs, t, ())
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if hit is None:
        return None
    i, p, res = hit
    return i, p, replace_at(t, p, res)


@dataclass(frozen=True)
class ReduceResult:
    final: Term
    steps: int
    reached_nf: bool


def reduce(trs: Trs, t: Term, strategy: Strategy = "lo", d: int = 100) -> ReduceResult:
    """Apply at most ``d`` strategy steps."""
    if d < 0:
        raise ValueError("step bound must be non-negative")
    steps = 0
    while True:
        nxt = strategy_step(trs, t, strategy)
        if nxt is None:
            return ReduceResult(t, steps, True)
        if steps == d:
            return ReduceResult(t, steps, False)
        t = nxt[2]
        steps += 1


def family_bounded(
    trs: Trs, terms: Iterable[Term], d: int, max_terms: int = 100_000
) -> tuple[set[Term], bool]:
    """All reducts reachable in at most ``d`` steps; flag is True if truncated."""
    seen: set[Term] = set()
    queue: deque[tuple[Term, int]] = deque()
    for t in terms:
        if t not in seen:
            if len(seen) >= max_terms:
                return seen, True
            seen.add(t)
            queue.append((t, 0))
    while queue:
        t, k = queue.popleft()
        if k == d:
            continue
        for _, _, s in one_step_successors(trs, t):
            if s not in seen:
                if len(seen) >= max_terms:
                    return seen, True
                seen.add(s)
                queue.append((s, k + 1))
    return seen, False


# ---------------------------------------------------------------- transformations


def fresh_names(avoid: Iterable[str], n: int, prefix: str = "x") -> list[str]:
    avoid = set(avoid)
    out, k = [], 1
    while len(out) < n:
        name = f"{prefix}{k}"
        if name not in avoid:
            out.append(name)
        k += 1
    return out


def eliminate_collapsing(trs: Trs) -> Trs:
    """Replace each collapsing rule l -> x by its instances x := f(x1..xn)."""
    out: list[Rule] = []
    for r in trs.rules:
        if not r.is_collapsing():
            out.append(r)
            continue
        x = r.rhs.name
        for f, k in trs.signature.items():
            xs = fresh_names(variables(r.lhs), k)
            inst = App(f, [Var(v) for v in xs])
            out.append(Rule(substitute(r.lhs, {x: inst}), inst))
    return Trs(tuple(out), trs.signature.copy())


# ---------------------------------------------------------------- string rewriting view


def term_to_word(t: Term) -> tuple[list[str], Term]:
    """Split a unary spine a_n(...a_1(base)...) into ([a_1..a_n], base)."""
    word: list[str] = []
    while isinstance(t, App) and len(t.args) == 1:
        word.append(t.symbol)
        t = t.args[0]
    word.reverse()
    return word, t


def word_to_term(word: Sequence[str], base: Term) -> Term:
    """The word a_1..a_n becomes a_n(...a_1(base)...): rightmost letter on top."""
    t = base
    for a in word:
        t = App(a, (t,))
    return t


def is_srs(trs: Trs) -> bool:
    for r in trs.rules:
        for side in (r.lhs, r.rhs):
            _, base = term_to_word(side)
            if not isinstance(base, Var):
                return False
    return True


def mirror(trs: Trs) -> Trs:
    """Reverse both sides of every rule of a string rewriting system."""
    if not is_srs(trs):
        raise ValueError("mirroring needs a string rewriting system")
    out = []
    for r in trs.rules:
        lw, lb = term_to_word(r.lhs)
        rw, rb = term_to_word(r.rhs)
        out.append(Rule(word_to_term(lw[::-1], lb), word_to_term(rw[::-1], rb)))
    return Trs(tuple(out), trs.signature.copy())


def map_symbols(t: Term, f: Callable[[App], str]) -> Term:
    if isinstance(t, Var):
        return t
    return App(f(t), [map_symbols(a, f) for a in t.args])
