"""Lexer, recursive-descent parser and pretty-printer for ``.fuzz`` files.

Concrete syntax::

    program  := typedef* vardecl* expr
    typedef  := "type" IDENT "=" type
    vardecl  := "var" IDENT ":" type
    type     := sumtype ("-o" type)?
    sumtype  := prodtype ("+" prodtype)*
    prodtype := tatom (("*" | "&") tatom)*
    tatom    := "real" | "unit" | IDENT | "(" type ")" | "!" "[" sens "]" tatom
    sens     := NUMBER | "inf"

    expr     := "fun" "(" IDENT ":" type ")" "=>" expr
              | "fix" "[" sens "]" IDENT "(" IDENT ":" type ")" ":" type "=>" expr
              | "let" "(" IDENT "," IDENT ")" "=" expr "in" expr
              | "let" "!" IDENT "=" expr "in" expr
              | "case" expr "of" "inl" IDENT "=>" expr "|" "inr" IDENT "=>" expr
              | app ("+" app)*
    app      := aexpr+
    aexpr    := IDENT | NUMBER | "()" | "(" expr "," expr ")" | "<" expr "," expr ">"
              | "fst" aexpr | "snd" aexpr | "!" "[" sens "]" aexpr
              | "inl" "[" type "]" aexpr | "inr" "[" type "]" aexpr
              | "fold" "[" IDENT "]" aexpr | "unfold" aexpr | "(" expr ")"

``#`` starts a line comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import syntax as S
from .errors import DuplicateDefinitionError, LexError, ParseError, Span
from .extreal import ExtReal, format_ext, format_real, parse_ext

KEYWORDS = {
    "type", "var", "fun", "fix", "let", "in", "case", "of", "inl", "inr",
    "fold", "unfold", "fst", "snd", "real", "unit", "inf",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>=>|-o|[()\[\]<>,:=*&+!|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "kw", "sym", "eof"
    text: str
    span: Span


def _span_at(text: str, start: int, end: int) -> Span:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return Span(start, end, line, col)


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", _span_at(text, pos, pos + 1))
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, _span_at(text, m.start(), m.end())))
        pos = m.end()
    tokens.append(Token("eof", "", _span_at(text, len(text), len(text))))
    return tokens


@dataclass
class Program:
    typedefs: Dict[str, S.TypeExpr] = field(default_factory=dict)
    freevars: Dict[str, S.TypeExpr] = field(default_factory=dict)
    main: S.Term = field(default_factory=S.UnitVal)

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (
            list(self.typedefs.items()) == list(other.typedefs.items())
            and list(self.freevars.items()) == list(other.freevars.items())
            and self.main == other.main
        )


_EXPR_START_KW = {"fun", "fix", "let", "case"}
_AEXPR_START_KW = {"fst", "snd", "inl", "inr", "fold", "unfold"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected '{text}'")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail("expected an identifier")
        return self.advance()

    def fail(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{message}, found {found}", t.span)

    def span_from(self, start: Token) -> Span:
        last = self.toks[self.i - 1] if self.i > 0 else start
        return Span(start.span.start, max(last.span.end, start.span.start),
                    start.span.line, start.span.col)

    # -- sensitivities and types

    def sens(self) -> ExtReal:
        t = self.tok
        if t.kind == "kw" and t.text == "inf":
            self.advance()
            return parse_ext("inf")
        if t.kind != "number":
            self.fail("expected a sensitivity (number or 'inf')")
        self.advance()
        try:
            return parse_ext(t.text)
        except ValueError as exc:
            raise ParseError(f"bad sensitivity {t.text!r}: {exc}", t.span) from None

    def bracketed_sens(self) -> ExtReal:
        self.expect("[")
        r = self.sens()
        self.expect("]")
        return r

    def type_(self) -> S.TypeExpr:
        left = self.sum_type()
        if self.at("-o"):
            self.advance()
            return S.Lolli(left, self.type_())
        return left

    def sum_type(self) -> S.TypeExpr:
        left = self.prod_type()
        while self.at("+"):
            self.advance()
            left = S.Sum(left, self.prod_type())
        return left

    def prod_type(self) -> S.TypeExpr:
        left = self.type_atom()
        while self.at("*") or self.at("&"):
            op = self.advance().text
            right = self.type_atom()
            left = S.Tensor(left, right) if op == "*" else S.With(left, right)
        return left

    def type_atom(self) -> S.TypeExpr:
        t = self.tok
        if self.at("real"):
            self.advance()
            return S.REAL
        if self.at("unit"):
            self.advance()
            return S.UNIT
        if t.kind == "ident":
            self.advance()
            return S.Ident(t.text)
        if self.at("("):
            self.advance()
            inner = self.type_()
            self.expect(")")
            return inner
        if self.at("!"):
            self.advance()
            r = self.bracketed_sens()
            return S.Bang(r, self.type_atom())
        self.fail("expected a type")

    # -- terms

    def expr(self) -> S.Term:
        start = self.tok
        if self.at("fun"):
            self.advance()
            self.expect("(")
            x = self.ident().text
            self.expect(":")
            annot = self.type_()
            self.expect(")")
            self.expect("=>")
            body = self.expr()
            return S.Lam(x, annot, body, span=self.span_from(start))
        if self.at("fix"):
            self.advance()
            r = self.bracketed_sens()
            f = self.ident().text
            self.expect("(")
            x = self.ident().text
            self.expect(":")
            tin = self.type_()
            self.expect(")")
            self.expect(":")
            tout = self.type_()
            self.expect("=>")
            body = self.expr()
            if f == x:
                raise ParseError(f"fix binds '{f}' twice", self.span_from(start))
            return S.Fix(r, f, x, tin, tout, body, span=self.span_from(start))
        if self.at("let"):
            self.advance()
            if self.at("!"):
                self.advance()
                x = self.ident().text
                self.expect("=")
                bound = self.expr()
                self.expect("in")
                body = self.expr()
                return S.LetBox(x, bound, body, span=self.span_from(start))
            self.expect("(")
            x = self.ident().text
            self.expect(",")
            y = self.ident().text
            self.expect(")")
            if x == y:
                raise ParseError(f"pattern binds '{x}' twice", self.span_from(start))
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            body = self.expr()
            return S.LetPair(x, y, bound, body, span=self.span_from(start))
        if self.at("case"):
            self.advance()
            scrut = self.expr()
            self.expect("of")
            self.expect("inl")
            x = self.ident().text
            self.expect("=>")
            left = self.expr()
            self.expect("|")
            self.expect("inr")
            y = self.ident().text
            self.expect("=>")
            right = self.expr()
            return S.Case(scrut, x, left, y, right, span=self.span_from(start))
        return self.plus()

    def plus(self) -> S.Term:
        start = self.tok
        left = self.app()
        while self.at("+"):
            self.advance()
            if self.tok.kind == "kw" and self.tok.text in _EXPR_START_KW:
                right = self.expr()
                return S.Plus(left, right, span=self.span_from(start))
            right = self.app()
            left = S.Plus(left, right, span=self.span_from(start))
        return left

    def starts_aexpr(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "number"):
            return True
        if t.kind == "kw":
            return t.text in _AEXPR_START_KW
        return t.kind == "sym" and t.text in ("(", "<", "!")

    def app(self) -> S.Term:
        start = self.tok
        if not self.starts_aexpr():
            self.fail("expected an expression")
        fn = self.aexpr()
        while self.starts_aexpr():
            fn = S.App(fn, self.aexpr(), span=self.span_from(start))
        return fn

    def aexpr(self) -> S.Term:
        start = t = self.tok
        if t.kind == "ident":
            self.advance()
            return S.Var(t.text, span=t.span)
        if t.kind == "number":
            self.advance()
            v = float(t.text)
            if not math.isfinite(v):
                raise ParseError(f"numeric literal {t.text!r} is out of range", t.span)
            return S.Const(v, span=t.span)
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return S.UnitVal(span=self.span_from(start))
            first = self.expr()
            if self.at(","):
                self.advance()
                second = self.expr()
                self.expect(")")
                return S.TensorPair(first, second, span=self.span_from(start))
            self.expect(")")
            return first
        if self.at("<"):
            self.advance()
            first = self.expr()
            self.expect(",")
            second = self.expr()
            self.expect(">")
            return S.WithPair(first, second, span=self.span_from(start))
        if self.at("fst") or self.at("snd"):
            idx = 1 if self.advance().text == "fst" else 2
            return S.Proj(idx, self.aexpr(), span=self.span_from(start))
        if self.at("!"):
            self.advance()
            r = self.bracketed_sens()
            return S.Box(r, self.aexpr(), span=self.span_from(start))
        if self.at("inl") or self.at("inr"):
            ctor = S.Inl if self.advance().text == "inl" else S.Inr
            self.expect("[")
            other = self.type_()
            self.expect("]")
            return ctor(other, self.aexpr(), span=self.span_from(start))
        if self.at("fold"):
            self.advance()
            self.expect("[")
            alpha = self.ident().text
            self.expect("]")
            return S.Fold(alpha, self.aexpr(), span=self.span_from(start))
        if self.at("unfold"):
            self.advance()
            return S.Unfold(self.aexpr(), span=self.span_from(start))
        self.fail("expected an expression")

    # -- programs

    def program(self) -> Program:
        prog = Program()
        seen_spans = {}
        while self.at("type"):
            start = self.advance()
            name = self.ident()
            self.expect("=")
            rhs = self.type_()
            if name.text in prog.typedefs:
                raise DuplicateDefinitionError(f"type '{name.text}' is defined twice", name.span)
            prog.typedefs[name.text] = rhs
            seen_spans[("type", name.text)] = self.span_from(start)
        while self.at("var"):
            start = self.advance()
            name = self.ident()
            self.expect(":")
            t = self.type_()
            if name.text in prog.freevars:
                raise DuplicateDefinitionError(f"variable '{name.text}' is declared twice", name.span)
            prog.freevars[name.text] = t
            seen_spans[("var", name.text)] = self.span_from(start)
        if self.at("type"):
            self.fail("type definitions must precede variable declarations")
        prog.main = self.expr()
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input")
        phi = prog.typedefs
        for name, rhs in phi.items():
            S.well_formed(phi, rhs, seen_spans[("type", name)])
        for name, t in prog.freevars.items():
            S.well_formed(phi, t, seen_spans[("var", name)])
        check_annotations(phi, prog.main)
        return prog


def check_annotations(phi, e: S.Term) -> None:
    """Every annotation inside ``e`` must be well formed under ``phi``."""
    for t in _own_annotations(e):
        S.well_formed(phi, t, e.span)
    for sub in S.subterms(e):
        check_annotations(phi, sub)


def _own_annotations(e: S.Term):
    if isinstance(e, S.Lam):
        return (e.annot,)
    if isinstance(e, S.Fix):
        return (e.annot_in, e.annot_out)
    if isinstance(e, (S.Inl, S.Inr)):
        return (e.other,)
    if isinstance(e, S.Fold):
        return (S.Ident(e.alpha),)
    return ()


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_term(text: str, phi: Optional[Dict[str, S.TypeExpr]] = None) -> S.Term:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    if phi is not None:
        check_annotations(phi, e)
    return e


def parse_type(text: str) -> S.TypeExpr:
    p = _Parser(text)
    t = p.type_()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return t


# --------------------------------------------------------------------------
# Pretty-printing

# binder forms < sums < applications < prefix forms < atoms
_BINDER, _SUM, _APP, _PREFIX, _ATOM = range(5)


def _prec(e: S.Term) -> int:
    if isinstance(e, (S.Lam, S.Fix, S.LetPair, S.LetBox, S.Case)):
        return _BINDER
    if isinstance(e, S.Plus):
        return _SUM
    if isinstance(e, S.App):
        return _APP
    if isinstance(e, (S.Proj, S.Box, S.Inl, S.Inr, S.Fold, S.Unfold)):
        return _PREFIX
    return _ATOM


def _at(e: S.Term, min_prec: int) -> str:
    s = pretty_term(e)
    return f"({s})" if _prec(e) < min_prec else s


def pretty_term(e: S.Term) -> str:
    P = pretty_term
    ty = S.pretty_type
    if isinstance(e, S.Var):
        return e.name
    if isinstance(e, S.Const):
        return format_real(e.value)
    if isinstance(e, S.UnitVal):
        return "()"
    if isinstance(e, S.Plus):
        return f"{_at(e.left, _SUM)} + {_at(e.right, _APP)}"
    if isinstance(e, S.App):
        return f"{_at(e.fn, _APP)} {_at(e.arg, _PREFIX)}"
    if isinstance(e, S.TensorPair):
        return f"({P(e.left)}, {P(e.right)})"
    if isinstance(e, S.WithPair):
        return f"<{P(e.left)}, {P(e.right)}>"
    if isinstance(e, S.Proj):
        return f"{'fst' if e.index == 1 else 'snd'} {_at(e.arg, _PREFIX)}"
    if isinstance(e, S.Box):
        return f"![{format_ext(e.index)}] {_at(e.body, _PREFIX)}"
    if isinstance(e, S.Inl):
        return f"inl[{ty(e.other)}] {_at(e.body, _PREFIX)}"
    if isinstance(e, S.Inr):
        return f"inr[{ty(e.other)}] {_at(e.body, _PREFIX)}"
    if isinstance(e, S.Fold):
        return f"fold[{e.alpha}] {_at(e.body, _PREFIX)}"
    if isinstance(e, S.Unfold):
        return f"unfold {_at(e.body, _PREFIX)}"
    if isinstance(e, S.Lam):
        return f"fun ({e.param} : {ty(e.annot)}) => {P(e.body)}"
    if isinstance(e, S.Fix):
        return (f"fix[{format_ext(e.index)}] {e.fname} ({e.param} : {ty(e.annot_in)})"
                f" : {ty(e.annot_out)} => {P(e.body)}")
    if isinstance(e, S.LetPair):
        return f"let ({e.x}, {e.y}) = {P(e.bound)} in {P(e.body)}"
    if isinstance(e, S.LetBox):
        return f"let !{e.x} = {P(e.bound)} in {P(e.body)}"
    if isinstance(e, S.Case):
        return (f"case {P(e.scrutinee)} of inl {e.x} => {P(e.left)}"
                f" | inr {e.y} => {P(e.right)}")
    raise TypeError(f"not a term: {e!r}")


def pretty(p: Program) -> str:
    lines = [f"type {name} = {S.pretty_type(t)}" for name, t in p.typedefs.items()]
    lines += [f"var {name} : {S.pretty_type(t)}" for name, t in p.freevars.items()]
    lines.append(pretty_term(p.main))
    return "\n".join(lines) + "\n"
