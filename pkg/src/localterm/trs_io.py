"""Reading and writing TRSs, SRSs and finite algebras.

TRSs use the old TPDB format ``(VAR x y) (RULES l -> r ...)``; rules may be
separated by whitespace or commas. String rewriting systems use
``(RULES a b -> b a, ...)`` with ``eps`` for the empty word; the word
``a1 ... an`` becomes the term ``an(...a1(x)...)`` (rightmost letter on top)
and a constant ``e`` is added to the signature for grounding.

Algebra files are S-expressions::

    (CARRIER 2) (FUN O -> 0) (FUN @ 0 0 -> 1) (GE 1 0) (POLY f 1 2)

with ``;`` line comments.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .algebra import CarrierRelation, FiniteAlgebra
from .interpretations import LinearInterpretation
from .terms import (
    App,
    Rule,
    RuleError,
    Signature,
    SignatureError,
    Term,
    Trs,
    Var,
    render,
    term_to_word,
    variables,
    word_to_term,
)

SRS_VAR = "x"
SRS_CONSTANT = "e"
EMPTY_WORD = "eps"
ORIENTATION_HEADER = "; orientation: right-top"


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


# ---------------------------------------------------------------- tokens


@dataclass(frozen=True)
class Token:
    kind: str  # "(" ")" "," "->" "ident" "string"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>;[^\n]*)
  | (?P<arrow>->=?)
  | (?P<punct>[(),])
  | (?P<string>"[^"\n]*")
  | (?P<ident>(?:[^\s(),;"\-]|-(?!>))+)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "arrow":
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind == "punct":
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind == "string":
            tokens.append(Token("string", m.group()[1:-1], line, col))
        elif kind == "ident":
            tokens.append(Token("ident", m.group(), line, col))
        pos = m.end()
    return tokens


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("", "", 0, 0)
            raise ParseError("unexpected end of input", last.line, last.col)
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return tok


# ---------------------------------------------------------------- terms and TRSs


def _parse_term(s: _Stream, var_names: set[str], sig: Signature | None) -> Term:
    tok = s.expect("ident")
    nxt = s.peek()
    if tok.text in var_names:
        if nxt is not None and nxt.kind == "(":
            raise ParseError(f"variable {tok.text!r} used as a function symbol", tok.line, tok.col)
        return Var(tok.text)
    args: list[Term] = []
    if nxt is not None and nxt.kind == "(":
        s.next()
        if s.peek() is not None and s.peek().kind == ")":
            s.next()
        else:
            while True:
                args.append(_parse_term(s, var_names, sig))
                t = s.next()
                if t.kind == ")":
                    break
                if t.kind != ",":
                    raise ParseError(f"expected ',' or ')', found {t.text!r}", t.line, t.col)
    if sig is not None:
        try:
            sig.add(tok.text, len(args))
        except SignatureError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
    return App(tok.text, args)


def parse_term(text: str, variables: Iterable[str] = (), signature: Signature | None = None) -> Term:
    """Parse a single term; names in ``variables`` are variables."""
    s = _Stream(tokenize(text))
    sig = signature.copy() if signature is not None else None
    t = _parse_term(s, set(variables), sig)
    extra = s.peek()
    if extra is not None:
        raise ParseError(f"trailing input {extra.text!r}", extra.line, extra.col)
    return t


def _skip_section(s: _Stream) -> None:
    depth = 1
    while depth:
        tok = s.next()
        if tok.kind == "(":
            depth += 1
        elif tok.kind == ")":
            depth -= 1


def parse_trs(text: str) -> Trs:
    """Parse a TRS in old TPDB format."""
    s = _Stream(tokenize(text))
    var_names: set[str] = set()
    sig = Signature()
    rules: list[Rule] = []
    seen_rules = False
    while s.peek() is not None:
        s.expect("(")
        head = s.expect("ident")
        if head.text == "VAR":
            while s.peek() is not None and s.peek().kind == "ident":
                var_names.add(s.next().text)
            s.expect(")")
        elif head.text == "RULES":
            seen_rules = True
            while True:
                tok = s.peek()
                if tok is None:
                    raise ParseError("unterminated RULES section", head.line, head.col)
                if tok.kind == ")":
                    s.next()
                    break
                if tok.kind == ",":
                    s.next()
                    continue
                lhs = _parse_term(s, var_names, sig)
                arrow = s.next()
                if arrow.kind != "->":
                    raise ParseError(f"expected '->', found {arrow.text!r}", arrow.line, arrow.col)
                rhs = _parse_term(s, var_names, sig)
                try:
                    rules.append(Rule(lhs, rhs))
                except RuleError as e:
                    raise ParseError(str(e), tok.line, tok.col) from None
        else:
            _skip_section(s)
    if not seen_rules:
        raise ParseError("no RULES section")
    return Trs(tuple(rules), sig)


def write_trs(trs: Trs) -> str:
    vs: dict[str, None] = {}
    for r in trs.rules:
        for v in variables(r.lhs):
            vs.setdefault(v)
    if not trs.rules:
        return "(RULES)\n"
    lines = []
    if vs:
        lines.append("(VAR " + " ".join(vs) + ")")
    lines.append("(RULES")
    for r in trs.rules:
        lines.append(f"  {render(r.lhs)} -> {render(r.rhs)}")
    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- string rewriting


def _orientation(text: str) -> str:
    m = re.search(r";\s*orientation:\s*(\S+)", text)
    return m.group(1) if m else "right-top"


def parse_srs(text: str) -> Trs:
    """Parse a string rewriting system into unary terms (rightmost letter on top)."""
    orient = _orientation(text)
    if orient not in ("right-top", "left-top"):
        raise ParseError(f"unknown orientation {orient!r}")
    s = _Stream(tokenize(text))
    sig = Signature()
    words: list[tuple[list[str], list[str], Token]] = []
    seen_rules = False
    while s.peek() is not None:
        s.expect("(")
        head = s.expect("ident")
        if head.text != "RULES":
            _skip_section(s)
            continue
        seen_rules = True
        while True:
            tok = s.peek()
            if tok is None:
                raise ParseError("unterminated RULES section", head.line, head.col)
            if tok.kind == ")":
                s.next()
                break
            if tok.kind == ",":
                s.next()
                continue
            lhs = _read_word(s)
            arrow = s.next()
            if arrow.kind != "->":
                raise ParseError(f"expected '->', found {arrow.text!r}", arrow.line, arrow.col)
            rhs = _read_word(s, stop_line=arrow.line)
            if not lhs:
                raise ParseError("empty left-hand side", tok.line, tok.col)
            words.append((lhs, rhs, tok))
    if not seen_rules:
        raise ParseError("no RULES section")
    rules = []
    x = Var(SRS_VAR)
    for lhs, rhs, tok in words:
        if orient == "left-top":
            lhs, rhs = lhs[::-1], rhs[::-1]
        for a in lhs + rhs:
            try:
                sig.add(a, 1)
            except SignatureError as e:
                raise ParseError(str(e), tok.line, tok.col) from None
        rules.append(Rule(word_to_term(lhs, x), word_to_term(rhs, x)))
    try:
        sig.add(SRS_CONSTANT, 0)
    except SignatureError as e:
        raise ParseError(str(e)) from None
    return Trs(tuple(rules), sig)


def _read_word(s: _Stream, stop_line: int | None = None) -> list[str]:
    """Letters up to '->', ',' or ')'; a right-hand side also ends at a line break."""
    word: list[str] = []
    last_line = stop_line
    while True:
        tok = s.peek()
        if tok is None or tok.kind in ("->", ",", ")"):
            break
        if tok.kind != "ident":
            raise ParseError(f"unexpected {tok.text!r} in word", tok.line, tok.col)
        if stop_line is not None and tok.line != last_line:
            break
        s.next()
        last_line = tok.line
        if tok.text != EMPTY_WORD:
            word.append(tok.text)
    return word


def write_srs(trs: Trs) -> str:
    lines = [ORIENTATION_HEADER, "(RULES"]
    for i, r in enumerate(trs.rules):
        lw, lb = term_to_word(r.lhs)
        rw, rb = term_to_word(r.rhs)
        if not (isinstance(lb, Var) and isinstance(rb, Var)):
            raise ValueError(f"rule {r} is not a string rewriting rule")
        sep = "," if i < len(trs.rules) - 1 else ""
        lines.append(f"  {' '.join(lw) or EMPTY_WORD} -> {' '.join(rw) or EMPTY_WORD}{sep}")
    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- S-expressions

SExpr = Union[str, list]


def parse_sexprs(text: str) -> list[SExpr]:
    """Parse a sequence of S-expressions; strings keep their quotes stripped."""
    s = _Stream(tokenize(text))
    out = []
    while s.peek() is not None:
        out.append(_read_sexpr(s))
    return out


class Atom(str):
    line: int = 0
    col: int = 0
    quoted: bool = False


def _read_sexpr(s: _Stream) -> SExpr:
    tok = s.next()
    if tok.kind == "(":
        items = []
        while True:
            nxt = s.peek()
            if nxt is None:
                raise ParseError("unbalanced parenthesis", tok.line, tok.col)
            if nxt.kind == ")":
                s.next()
                return items
            items.append(_read_sexpr(s))
    if tok.kind == ")":
        raise ParseError("unexpected ')'", tok.line, tok.col)
    a = Atom(tok.text)
    a.line, a.col, a.quoted = tok.line, tok.col, tok.kind == "string"
    return a


def _int(x: SExpr, what: str = "integer") -> int:
    if isinstance(x, list):
        raise ParseError(f"expected {what}, found a list")
    try:
        return int(x)
    except ValueError:
        raise ParseError(f"expected {what}, found {x!r}", getattr(x, "line", 0), getattr(x, "col", 0)) from None


def _where(x: SExpr) -> tuple[int, int]:
    while isinstance(x, list) and x:
        x = x[0]
    return getattr(x, "line", 0), getattr(x, "col", 0)


# ---------------------------------------------------------------- algebra files


@dataclass
class AlgebraFile:
    algebra: FiniteAlgebra
    ge: CarrierRelation | None = None
    strict: CarrierRelation | None = None
    leadsto: CarrierRelation | None = None
    polys: LinearInterpretation | None = None
    accepting: tuple[int, ...] | None = None
    extra: list = field(default_factory=list)


def parse_algebra_items(items: list[SExpr], signature: Signature | None = None) -> AlgebraFile:
    size = None
    entries: list[tuple[str, tuple[int, ...], int, SExpr]] = []
    pairs: dict[str, list[tuple[int, int]]] = {"GE": [], "STRICT": [], "LEADSTO": []}
    present: set[str] = set()
    polys: dict[str, tuple[int, tuple[int, ...]] | None] = {}
    accepting = None
    extra = []
    for item in items:
        if not isinstance(item, list) or not item or isinstance(item[0], list):
            line, col = _where(item)
            raise ParseError("expected a parenthesised declaration", line, col)
        head = item[0]
        if head == "CARRIER":
            if len(item) != 2:
                raise ParseError("CARRIER takes one size", head.line, head.col)
            size = _int(item[1], "carrier size")
            if size < 1:
                raise ParseError("the carrier must be non-empty", head.line, head.col)
        elif head == "FUN":
            if len(item) < 4 or item[-2] != "->":
                raise ParseError("FUN expects: FUN f a1 .. ak -> b", head.line, head.col)
            entries.append((str(item[1]), tuple(_int(x) for x in item[2:-2]), _int(item[-1]), item))
        elif head in pairs:
            if len(item) != 3:
                raise ParseError(f"{head} expects two elements", head.line, head.col)
            present.add(str(head))
            pairs[str(head)].append((_int(item[1]), _int(item[2])))
        elif head == "POLY":
            if len(item) < 3:
                raise ParseError("POLY expects: POLY f c0 c1 .. ck | POLY f undefined", head.line, head.col)
            name = str(item[1])
            if len(item) == 3 and item[2] == "undefined":
                polys[name] = None
            else:
                cs = [_int(x, "coefficient") for x in item[2:]]
                if any(c < 0 for c in cs):
                    raise ParseError("coefficients must be natural numbers", head.line, head.col)
                polys[name] = (cs[0], tuple(cs[1:]))
        elif head == "ACCEPT":
            accepting = tuple(_int(x) for x in item[1:])
        else:
            extra.append(item)
    if size is None:
        if entries or present or accepting is not None:
            raise ParseError("missing CARRIER declaration")
        size = 0
    sig = signature.copy() if signature is not None else Signature()
    for f, args, _, item in entries:
        try:
            if signature is not None and f not in signature:
                raise SignatureError(f"symbol {f!r} not in the signature")
            sig.add(f, len(args))
        except SignatureError as e:
            raise ParseError(str(e), *_where(item)) from None
    alg = FiniteAlgebra(sig, size)
    for f, args, v, item in entries:
        if args in alg.tables[f]:
            raise ParseError(f"duplicate entry for {f}{args}", *_where(item))
        try:
            alg.set(f, args, v)
        except ValueError as e:
            raise ParseError(str(e), *_where(item)) from None

    def rel(name):
        if name not in present:
            return None
        try:
            return CarrierRelation(size, pairs[name])
        except ValueError as e:
            raise ParseError(str(e)) from None

    if accepting is not None and any(not 0 <= q < size for q in accepting):
        raise ParseError("accepting element outside the carrier")
    interp = LinearInterpretation(polys) if polys else None
    return AlgebraFile(alg, rel("GE"), rel("STRICT"), rel("LEADSTO"), interp, accepting, extra)


def parse_algebra_file(text: str, signature: Signature | None = None) -> AlgebraFile:
    return parse_algebra_items(parse_sexprs(text), signature)


def parse_algebra(text: str, signature: Signature | None = None) -> FiniteAlgebra:
    return parse_algebra_file(text, signature).algebra


def write_algebra(
    a: FiniteAlgebra,
    ge: CarrierRelation | None = None,
    strict: CarrierRelation | None = None,
    polys: LinearInterpretation | None = None,
    comments: Iterable[str] = (),
    leadsto: CarrierRelation | None = None,
    accepting: Iterable[int] | None = None,
) -> str:
    lines = [f"; {c}" for c in comments]
    lines.append(f"(CARRIER {a.size})")
    for f, args, v in a.defined_entries():
        lines.append(f"(FUN {' '.join([f, *map(str, args)])} -> {v})")
    for name, rel in (("GE", ge), ("STRICT", strict), ("LEADSTO", leadsto)):
        if rel is not None:
            for x, y in rel.pairs():
                lines.append(f"({name} {x} {y})")
    if accepting is not None:
        lines.append("(ACCEPT " + " ".join(map(str, accepting)) + ")")
    if polys is not None:
        lines.extend(write_polys(polys))
    return "\n".join(lines) + "\n"


def write_polys(polys: LinearInterpretation) -> list[str]:
    out = []
    for name, form in polys.items():
        if form is None:
            out.append(f"(POLY {name} undefined)")
        else:
            c0, cs = form
            out.append(f"(POLY {' '.join([name, str(c0), *map(str, cs)])})")
    return out
