"""Finding a partial model whose language is the normalising terms.

The refinement builds representatives of the congruence classes of normalising
ground terms: starting with no representatives, it repeatedly adds the least
candidate ``f(s1..sn)`` (the ``si`` being representatives) that is guessed to
normalise and behaves differently from every representative in all
enumerated contexts. The representatives become the carrier; each candidate
maps to the representative with the same behaviour, or is undefined if it is
guessed not to normalise.

Guessing uses a bounded reduction: a term counts as normalising if the chosen
strategy reaches a normal form in fewer than ``d`` steps.
"""
from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal

from .algebra import (
    FiniteAlgebra,
    interpret,
    check_partial_model,
    check_undefined_implies_redex,
    models_isomorphic,
)
from .engine import LINormalizer
from .terms import App, Signature, Strategy, Term, Trs, height, reduce

ContextMode = Literal["height", "fillers"]
HOLE = "□"


@dataclass(frozen=True)
class DiscoveryParams:
    c: int = 3
    d: int = 100
    strategy: Strategy = "lo"
    max_states: int = 64
    contexts: ContextMode = "height"
    probe_size: int = 13

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("context bound c must be >= 0")
        if self.probe_size < 0:
            raise ValueError("probe_size must be >= 0")
        if self.d < 1:
            raise ValueError("step bound d must be >= 1")
        if self.strategy not in ("lo", "li"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.contexts not in ("height", "fillers"):
            raise ValueError(f"unknown context mode {self.contexts!r}")


@dataclass
class DiscoveryResult:
    algebra: FiniteAlgebra | None
    representatives: list[Term]
    params: DiscoveryParams
    status: str  # "validated", "unvalidated", "max-states", "empty-language"
    validated: dict[str, bool] = field(default_factory=dict)
    history: list[tuple[DiscoveryParams, str]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "validated"


# ---------------------------------------------------------------- guesses


def guess_normalizing(trs: Trs, t: Term, d: int, strategy: Strategy = "lo") -> bool:
    """True iff the strategy reaches a normal form in fewer than ``d`` steps."""
    r = reduce(trs, t, strategy, d)
    return r.reached_nf and r.steps < d


class _Guesser:
    """Cached normalisation guesses for ground terms."""

    def __init__(self, trs: Trs, d: int, strategy: Strategy):
        self.trs, self.d, self.strategy = trs, d, strategy
        self.engine = LINormalizer(trs, d - 1) if strategy == "li" else None
        self.cache: dict[Term, bool] = {}

    def __call__(self, t: Term) -> bool:
        if self.engine is not None:
            return self.engine.normalize(self.engine.node(t)) is not None
        v = self.cache.get(t)
        if v is None:
            v = self.cache[t] = guess_normalizing(self.trs, t, self.d, self.strategy)
        return v


# ---------------------------------------------------------------- contexts


@dataclass(frozen=True)
class Context:
    """A ground context; ``layers`` go from the hole outwards.

    Each layer is ``(symbol, hole position, other arguments)``.
    """

    layers: tuple[tuple[str, int, tuple[Term, ...]], ...] = ()

    def plug(self, t: Term) -> Term:
        for f, p, others in self.layers:
            args = list(others)
            args.insert(p - 1, t)
            t = App(f, args)
        return t

    @property
    def hole_depth(self) -> int:
        return len(self.layers)

    def __str__(self):
        return str(self.plug(App(HOLE)))


def behavior_distinct(
    trs: Trs, s: Term, t: Term, contexts: Iterable[Context], strategy: Strategy = "lo", d: int = 100
) -> bool:
    """Some context separates ``s`` and ``t``: one plugged term normalises, the other does not."""
    if s == t:
        return False
    return any(
        guess_normalizing(trs, ctx.plug(s), d, strategy) != guess_normalizing(trs, ctx.plug(t), d, strategy)
        for ctx in contexts
    )


def ground_terms_by_height(sig: Signature, h: int) -> list[list[Term]]:
    """``out[k]`` lists the ground terms of height exactly k, for k <= h."""
    out: list[list[Term]] = [[App(f) for f in sig.constants()]]
    upto: list[Term] = list(out[0])
    for k in range(1, h + 1):
        level = []
        for f, n in sig.items():
            if n == 0:
                continue
            for args in itertools.product(upto, repeat=n):
                if any(height(a) == k - 1 for a in args):
                    level.append(App(f, args))
        out.append(level)
        upto = upto + level
    return out


def _layers(sig: Signature, fillers: list[Term]) -> list[tuple[str, int, tuple[Term, ...]]]:
    out = []
    for f, n in sig.items():
        for p in range(1, n + 1):
            for others in itertools.product(fillers, repeat=n - 1):
                out.append((f, p, tuple(others)))
    return out


def enumerate_contexts(sig: Signature, fillers: Iterable[Term], c: int) -> list[Context]:
    """Contexts with hole depth <= c whose other arguments are taken from ``fillers``.

    Ordered by hole depth, then layer by layer from the root (symbol order,
    hole position, filler order).
    """
    fillers = list(fillers)
    layers = _layers(sig, fillers)
    out = [Context()]
    level = [()]
    for _ in range(c):
        # extend outwards: new layer goes on top
        level = [inner + (layer,) for layer in layers for inner in level]
        level.sort(key=lambda ls: [layers.index(l) for l in reversed(ls)])
        out.extend(Context(ls) for ls in level)
    return out


def ground_contexts(sig: Signature, c: int) -> list[Context]:
    """All ground contexts of height <= c (the hole counts as height 0)."""
    by_h = ground_terms_by_height(sig, max(c - 1, 0))
    hs = {t: k for k, ts in enumerate(by_h) for t in ts}
    fillers = [t for ts in by_h for t in ts]
    all_layers = _layers(sig, fillers)
    layer_h = [max((hs[t] for t in l[2]), default=-1) for l in all_layers]
    out = []
    for depth in range(c + 1):
        # layer i (1 = innermost) sits at level depth - i; its arguments at
        # level depth - i + 1, so their height is at most c - depth + i - 1
        def build(i, acc):
            if i > depth:
                out.append(Context(tuple(acc)))
                return
            for k, l in enumerate(all_layers):
                if layer_h[k] <= c - depth + i - 1:
                    acc.append(l)
                    build(i + 1, acc)
                    acc.pop()

        start = len(out)
        build(1, [])
        index = {id(l): k for k, l in enumerate(all_layers)}
        out[start:] = sorted(out[start:], key=lambda ctx: [index[id(l)] for l in reversed(ctx.layers)])
    return out


class _ContextTrie:
    """Contexts sharing inner layers share trie nodes (built from the hole outwards)."""

    def __init__(self, contexts: list[Context]):
        self.size = len(contexts)
        self.root: dict = {"id": None, "kids": {}}
        for cid, ctx in enumerate(contexts):
            node = self.root
            for layer in ctx.layers:
                node = node["kids"].setdefault(layer, {"id": None, "kids": {}})
            node["id"] = cid


# ---------------------------------------------------------------- behaviour


class _Behaviour:
    """Computes the set of contexts in which a term is guessed to normalise."""

    max_nodes = 2_000_000

    def __init__(self, guesser: _Guesser, contexts: list[Context]):
        self.guesser = guesser
        self.contexts = contexts
        self.trie = _ContextTrie(contexts)
        eng = guesser.engine
        if eng is not None:
            self._layer_nodes = {}
            for ctx in contexts:
                for f, p, others in ctx.layers:
                    key = (f, p, others)
                    if key not in self._layer_nodes:
                        self._layer_nodes[key] = (eng._sym(f), p, tuple(eng.node(o) for o in others))
            eng.checkpoint()

    def signature(self, t: Term) -> bytes:
        out = bytearray(self.trie.size)
        eng = self.guesser.engine
        if eng is None:
            for cid, ctx in enumerate(self.contexts):
                if self.guesser(ctx.plug(t)):
                    out[cid] = 1
            return bytes(out)
        # leftmost-innermost: C[t] needs at least the steps of t, so a
        # non-normalising inner term prunes every context around it
        stack = [(self.trie.root, eng.node(t))]
        mk, norm, layer_nodes = eng.mk, eng.normalize, self._layer_nodes
        while stack:
            node, n = stack.pop()
            if norm(n) is None:
                continue
            if node["id"] is not None:
                out[node["id"]] = 1
            for layer, child in node["kids"].items():
                sym, p, others = layer_nodes[layer]
                kids = others[: p - 1] + (n,) + others[p - 1:]
                stack.append((child, mk(sym, kids)))
        if len(eng.nodes) > self.max_nodes:
            eng.truncate()
        return bytes(out)


# ---------------------------------------------------------------- refinement


def _term_key(t: Term, sig_index: dict[str, int], cache: dict) -> tuple:
    k = cache.get(t)
    if k is None:
        k = cache[t] = (height(t), sig_index[t.symbol], tuple(_term_key(a, sig_index, cache) for a in t.args))
    return k


def _refine_height(trs: Trs, params: DiscoveryParams, guesser: _Guesser):
    sig = trs.signature
    behaviour = _Behaviour(guesser, ground_contexts(sig, params.c))
    sig_index = {f: i for i, f in enumerate(sig)}
    keys: dict = {}
    reps: list[Term] = []
    rep_of: dict[bytes, int] = {}
    entries: dict[tuple[str, tuple[int, ...]], int | None] = {}
    heap: list = []
    counter = itertools.count()

    def push(f: str, idx: tuple[int, ...]):
        t = App(f, [reps[i] for i in idx])
        heapq.heappush(heap, (_term_key(t, sig_index, keys), next(counter), f, idx, t))

    for f in sig.constants():
        push(f, ())
    while heap:
        _, _, f, idx, t = heapq.heappop(heap)
        if not guesser(t):
            entries[(f, idx)] = None
            continue
        b = behaviour.signature(t)
        j = rep_of.get(b)
        if j is not None:
            entries[(f, idx)] = j
            continue
        if len(reps) >= params.max_states:
            return reps, None
        new = len(reps)
        reps.append(t)
        rep_of[b] = new
        entries[(f, idx)] = new
        for g, n in sig.items():
            for combo in itertools.product(range(new + 1), repeat=n):
                if new in combo:
                    push(g, combo)
    return reps, entries


def _refine_fillers(trs: Trs, params: DiscoveryParams, guesser: _Guesser):
    sig = trs.signature
    sig_index = {f: i for i, f in enumerate(sig)}
    keys: dict = {}
    small = [t for ts in ground_terms_by_height(sig, 1) for t in ts]
    reps: list[Term] = []
    while True:
        fillers = list(dict.fromkeys(reps + small))
        behaviour = _Behaviour(guesser, enumerate_contexts(sig, fillers, params.c))
        rep_sigs = {behaviour.signature(r): i for i, r in enumerate(reps)}
        cands = []
        for f, n in sig.items():
            for idx in itertools.product(range(len(reps)), repeat=n):
                t = App(f, [reps[i] for i in idx])
                cands.append((_term_key(t, sig_index, keys), f, idx, t))
        cands.sort(key=lambda c: c[0])
        entries: dict = {}
        added = False
        for _, f, idx, t in cands:
            if not guesser(t):
                entries[(f, idx)] = None
                continue
            b = behaviour.signature(t)
            if b in rep_sigs:
                entries[(f, idx)] = rep_sigs[b]
                continue
            if len(reps) >= params.max_states:
                return reps, None
            reps.append(t)
            added = True
            break
        if not added:
            return reps, entries


def _assemble(sig: Signature, n: int, entries) -> FiniteAlgebra:
    a = FiniteAlgebra(sig.copy(), n)
    for (f, idx), v in entries.items():
        if v is not None:
            a.set(f, idx, v)
    return a


def ground_terms_by_size(sig: Signature, max_size: int, limit: int = 20000) -> list[Term]:
    """Ground terms with at most ``max_size`` symbols, smallest first, at most ``limit`` of them."""
    by_size: list[list[Term]] = [[] for _ in range(max_size + 1)]
    out: list[Term] = []
    for n in range(1, max_size + 1):
        for f, k in sig.items():
            if k == 0:
                if n == 1:
                    by_size[1].append(App(f))
                continue
            for split in _compositions(n - 1, k):
                for args in itertools.product(*(by_size[m] for m in split)):
                    by_size[n].append(App(f, args))
                    if len(out) + len(by_size[n]) >= limit:
                        return out + by_size[n]
        out.extend(by_size[n])
    return out


def _compositions(n: int, k: int):
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def probe(a: FiniteAlgebra, trs: Trs, guess, max_size: int, limit: int = 20000) -> list[Term]:
    """Small ground terms on which definedness in ``a`` disagrees with ``guess``."""
    return [t for t in ground_terms_by_size(trs.signature, max_size, limit)
            if (interpret(a, t) is not None) != guess(t)]


def validate(a: FiniteAlgebra, trs: Trs, guess=None, probe_size: int = 0) -> dict[str, bool]:
    """Structural checks, plus a probe of small terms when ``guess`` is given."""
    out = {"partial_model": check_partial_model(a, trs).ok}
    if trs.is_left_linear():
        out["nf_coverage"] = check_undefined_implies_redex(a, trs).ok
    else:
        out["nf_coverage"] = False
    if guess is not None and probe_size > 0:
        out["probe"] = not probe(a, trs, guess, probe_size)
    return out


def discover(trs: Trs, params: DiscoveryParams = DiscoveryParams()) -> DiscoveryResult:
    """One run of the refinement followed by validation."""
    t0 = time.perf_counter()
    guesser = _Guesser(trs, params.d, params.strategy)
    refine = _refine_height if params.contexts == "height" else _refine_fillers
    reps, entries = refine(trs, params, guesser)
    if entries is None:
        return DiscoveryResult(None, reps, params, "max-states", {}, [(params, "max-states")],
                               time.perf_counter() - t0)
    a = _assemble(trs.signature, len(reps), entries)
    checks = validate(a, trs, guesser, params.probe_size)
    if not reps:
        status = "empty-language"
    else:
        status = "validated" if all(checks.values()) else "unvalidated"
    return DiscoveryResult(a, reps, params, status, checks, [(params, status)], time.perf_counter() - t0)


def escalate(params: DiscoveryParams, round_no: int) -> DiscoveryParams:
    """Odd rounds double d, even rounds increment c."""
    if round_no % 2 == 1:
        return replace(params, d=params.d * 2)
    return replace(params, c=params.c + 1)


def discover_with_escalation(
    trs: Trs, params: DiscoveryParams = DiscoveryParams(), max_rounds: int = 6
) -> DiscoveryResult:
    """Repeat `discover`, escalating (c, d) after each failed validation."""
    history = []
    t0 = time.perf_counter()
    result = None
    for k in range(max_rounds + 1):
        result = discover(trs, params)
        history.extend(result.history)
        if result.ok:
            break
        params = escalate(params, k + 1)
    result.history = history
    result.seconds = time.perf_counter() - t0
    return result


__all__ = [
    "Context",
    "DiscoveryParams",
    "behavior_distinct",
    "DiscoveryResult",
    "discover",
    "discover_with_escalation",
    "enumerate_contexts",
    "ground_contexts",
    "ground_terms_by_size",
    "guess_normalizing",
    "probe",
    "models_isomorphic",
    "validate",
]
