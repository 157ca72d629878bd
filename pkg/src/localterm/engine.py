"""Memoised leftmost-innermost normalisation of ground terms.

Ground terms are hash-consed into integer node ids. Under leftmost-innermost
rewriting the number of steps of ``f(t1..tn)`` is the sum of the steps of the
arguments plus the steps taken from the root once the arguments are normal,
so step counts can be cached per node. Counts above the budget are reported
as ``None``; since a term needs at least as many steps as any of its
subterms, ``None`` propagates upwards. Nested calls share one budget, so the
total work of a query is bounded by it.
"""
from __future__ import annotations

import sys

from .terms import App, Term, Trs, Var

_Pattern = tuple  # ("v", name) | ("f", symbol id, children)


class LINormalizer:
    def __init__(self, trs: Trs, limit: int):
        self.limit = limit
        self.sym_names: list[str] = []
        self.sym_ids: dict[str, int] = {}
        for s in trs.signature:
            self._sym(s)
        self.nodes: list[tuple[int, tuple[int, ...]]] = []
        self.table: dict[tuple[int, tuple[int, ...]], int] = {}
        self.mk = self._make_mk()
        self.ok: dict[int, tuple[int, int]] = {}
        self.fail: dict[int, int] = {}
        self.rules_by_root: dict[int, list[tuple[_Pattern, _Pattern]]] = {}
        for r in trs.rules:
            lhs = self._compile(r.lhs)
            rhs = self._compile(r.rhs)
            self.rules_by_root.setdefault(lhs[1], []).append((lhs, rhs))
        self._compile_root_steps()
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    def _sym(self, name: str) -> int:
        i = self.sym_ids.get(name)
        if i is None:
            i = self.sym_ids[name] = len(self.sym_names)
            self.sym_names.append(name)
        return i

    def _compile(self, t: Term) -> _Pattern:
        if isinstance(t, Var):
            return ("v", t.name)
        return ("f", self._sym(t.symbol), tuple(self._compile(a) for a in t.args))

    def _make_mk(self):
        table, nodes = self.table, self.nodes
        get, push = table.get, nodes.append

        def mk(sym: int, kids: tuple[int, ...]) -> int:
            key = (sym, kids)
            n = get(key)
            if n is None:
                n = table[key] = len(nodes)
                push(key)
            return n

        return mk

    def mk_named(self, name: str, kids: tuple[int, ...]) -> int:
        return self.mk(self._sym(name), kids)

    def node(self, t: Term) -> int:
        if isinstance(t, Var):
            raise ValueError("only ground terms can be normalised")
        return self.mk(self._sym(t.symbol), tuple(self.node(a) for a in t.args))

    def term(self, n: int) -> Term:
        sym, kids = self.nodes[n]
        return App(self.sym_names[sym], [self.term(k) for k in kids])

    def _compile_root_steps(self) -> None:
        """Generate one Python function per root symbol trying its rules in order."""
        self.root_steps: dict[int, object] = {}
        env = {"nodes": self.nodes, "mk": self.mk}
        for sym, rules in self.rules_by_root.items():
            lines = ["def step(n):"]
            for k, (lhs, rhs) in enumerate(rules):
                body: list[str] = []
                bound: dict[str, str] = {}
                counter = [0]
                self._gen_match(lhs, "n", body, bound, counter, top=True)
                body.append(f"return {self._gen_build(rhs, bound)}")
                lines.append(f"    def r{k}():")
                lines.extend("        " + b for b in body)
                lines.append(f"    m = r{k}()")
                lines.append("    if m is not None:")
                lines.append("        return m")
            lines.append("    return None")
            scope = dict(env)
            exec("\n".join(lines), scope)
            self.root_steps[sym] = scope["step"]

    def _gen_match(self, pat, var: str, body: list[str], bound: dict[str, str], counter, top=False) -> None:
        if pat[0] == "v":
            if pat[1] in bound:
                body.append(f"if {var} != {bound[pat[1]]}: return None")
            else:
                bound[pat[1]] = var
            return
        counter[0] += 1
        k = counter[0]
        body.append(f"s{k}, k{k} = nodes[{var}]")
        if not top:
            body.append(f"if s{k} != {pat[1]}: return None")
        for j, sub in enumerate(pat[2]):
            if sub[0] == "v" and sub[1] not in bound:
                bound[sub[1]] = f"k{k}[{j}]"
            else:
                counter[0] += 1
                child = f"c{counter[0]}"
                body.append(f"{child} = k{k}[{j}]")
                self._gen_match(sub, child, body, bound, counter)

    def _gen_build(self, pat, bound: dict[str, str]) -> str:
        if pat[0] == "v":
            return bound[pat[1]]
        kids = ", ".join(self._gen_build(p, bound) for p in pat[2])
        return f"mk({pat[1]}, ({kids}{',' if len(pat[2]) == 1 else ''}))"

    def _root_step(self, n: int) -> int | None:
        step = self.root_steps.get(self.nodes[n][0])
        return None if step is None else step(n)

    def normalize(self, n: int, budget: int | None = None) -> tuple[int, int] | None:
        """``(normal form, steps)`` or None if more than ``budget`` steps are needed.

        ``budget`` defaults to ``limit``. Successes are cached exactly; failures
        are cached as the largest budget known to be exceeded.
        """
        if budget is None:
            budget = self.limit
        ok = self.ok
        root_steps = self.root_steps
        hit = ok.get(n)
        if hit is not None:
            return hit if hit[1] <= budget else None
        if self.fail.get(n, -1) >= budget:
            return None
        total = 0
        cur = n
        visited: list[tuple[int, int]] = []
        while True:
            sym, kids = self.nodes[cur]
            new_kids = []
            for k in kids:
                r = ok.get(k)
                if r is None or r[1] > budget - total:
                    r = self.normalize(k, budget - total)
                if r is None:
                    return self._failed(n, budget)
                new_kids.append(r[0])
                total += r[1]
            cur = self.mk(sym, tuple(new_kids))
            visited.append((cur, total))
            step = root_steps.get(sym)
            nxt = None if step is None else step(cur)
            if nxt is None:
                break
            total += 1
            if total > budget:
                return self._failed(n, budget)
            cur = nxt
            visited.append((cur, total))
        result = (cur, total)
        ok[n] = result
        for m, at in visited:
            if m not in ok:
                ok[m] = (cur, total - at)
        return result

    def _failed(self, n: int, budget: int) -> None:
        if self.fail.get(n, -1) < budget:
            self.fail[n] = budget
        return None

    def checkpoint(self) -> int:
        """Mark the current nodes as permanent; see `truncate`."""
        self._keep = len(self.nodes)
        return self._keep

    def truncate(self) -> None:
        """Forget every node created after the last checkpoint, and the caches using them."""
        keep = getattr(self, "_keep", 0)
        del self.nodes[keep:]
        kept = {k: v for k, v in self.table.items() if v < keep}
        self.table.clear()
        self.table.update(kept)
        self.ok = {n: r for n, r in self.ok.items() if n < keep and r[0] < keep}
        self.fail = {n: b for n, b in self.fail.items() if n < keep}

    def steps(self, n: int) -> int | None:
        r = self.normalize(n)
        return None if r is None else r[1]

