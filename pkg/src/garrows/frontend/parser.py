"""Lexer and recursive-descent parser for the surface language.

A definition starts at column 1; anything indented continues the previous one.
Infix operators follow the usual precedence (``==`` < ``+ -`` < ``*`` <
application < prefix ``~``), which also covers the fully parenthesised form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .. import ir
from ..errors import Overflow, SyntaxError_
from .syntax import (App, Brak, CName, Code, Definition, Esc, GBool, GFun, GInt, GPair,
                     GUnit, If, Lam, Let, LetRec, Lit, MLType, Note, PrimOp, Program,
                     SurfaceTerm, Var)

KEYWORDS = {"let", "letrec", "in", "if", "then", "else", "true", "false", "note",
            "fst", "snd"}

_TOKEN = re.compile(r"""
    (?P<comment>--[^\n]*)
  | (?P<nl>\n)
  | (?P<ws>[ \t\r]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<sym><\[|\]>|->|==|[\\=:()\[\],~@*+\-])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, string, kw, sym, eof
    text: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)


def tokenize(source: str) -> list[Token]:
    out: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        col = i - line_start + 1
        if not m:
            raise SyntaxError_(line, col, f"a token, not {source[i]!r}")
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, text, line, col))
        i = m.end()
    out.append(Token("eof", "", line, i - line_start + 1))
    return out


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.def_start = 0
        self.layout = True

    # -- token helpers ------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at_boundary(self) -> bool:
        """End of the current definition: EOF or a token in column 1."""
        tok = self.peek()
        return tok.kind == "eof" or (self.layout and tok.col == 1 and self.i > self.def_start)

    def check(self, text: str) -> bool:
        tok = self.peek()
        return not self.at_boundary() and tok.kind in ("sym", "kw") and tok.text == text

    def advance(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text: str, what: str | None = None) -> Token:
        if not self.check(text):
            tok = self.peek()
            raise SyntaxError_(tok.line, tok.col, what or repr(text))
        return self.advance()

    def ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or self.at_boundary():
            raise SyntaxError_(tok.line, tok.col, "an identifier")
        return self.advance()

    # -- program ------------------------------------------------------------

    def program(self) -> Program:
        defs = []
        while self.peek().kind != "eof":
            self.def_start = self.i
            tok = self.peek()
            if tok.col != 1:
                raise SyntaxError_(tok.line, tok.col, "a definition starting in column 1")
            name = self.ident()
            params = []
            while self.peek().kind == "ident" and not self.at_boundary():
                params.append(self.advance().text)
            self.expect("=")
            body = self.expr()
            if not self.at_boundary():
                tok = self.peek()
                raise SyntaxError_(tok.line, tok.col, "end of definition")
            defs.append(Definition(name.text, params, body, name.pos))
        return defs

    def standalone_expr(self) -> SurfaceTerm:
        self.layout = False
        e = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise SyntaxError_(tok.line, tok.col, "end of input")
        return e

    # -- expressions --------------------------------------------------------

    def expr(self) -> SurfaceTerm:
        tok = self.peek()
        if self.check("\\"):
            return self.lam()
        if self.check("let"):
            self.advance()
            name = self.ident().text
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return Let(name, bound, self.expr(), tok.pos)
        if self.check("letrec"):
            self.advance()
            name = self.ident().text
            self.expect(":")
            annot = self.type_()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return LetRec(name, annot, bound, self.expr(), tok.pos)
        if self.check("if"):
            self.advance()
            c = self.expr()
            self.expect("then")
            t = self.expr()
            self.expect("else")
            return If(c, t, self.expr(), tok.pos)
        if self.check("note"):
            self.advance()
            s = self.peek()
            if s.kind != "string":
                raise SyntaxError_(s.line, s.col, "a string after 'note'")
            self.advance()
            return Note(bytes(s.text[1:-1], "utf-8").decode("unicode_escape"), self.expr(),
                        tok.pos)
        return self.equality()

    def lam(self) -> SurfaceTerm:
        start = self.expect("\\")
        params: list[tuple[str, MLType | None, tuple]] = []
        while not self.check("->"):
            if self.check("("):
                p = self.advance()
                name = self.ident().text
                self.expect(":")
                annot = self.type_()
                self.expect(")")
                params.append((name, annot, p.pos))
            else:
                tok = self.ident()
                params.append((tok.text, None, tok.pos))
        if not params:
            tok = self.peek()
            raise SyntaxError_(tok.line, tok.col, "a parameter")
        self.expect("->")
        body = self.expr()
        for i, (name, annot, pos) in reversed(list(enumerate(params))):
            body = Lam(name, annot, body, start.pos if i == 0 else pos)
        return body

    def equality(self) -> SurfaceTerm:
        left = self.additive()
        if self.check("=="):
            op = self.advance()
            right = self.additive()
            left = PrimOp("eq", [left, right], op.pos)
        return left

    def additive(self) -> SurfaceTerm:
        left = self.multiplicative()
        while self.check("+") or self.check("-"):
            op = self.advance()
            right = self.multiplicative()
            left = PrimOp("add" if op.text == "+" else "sub", [left, right], op.pos)
        return left

    def multiplicative(self) -> SurfaceTerm:
        left = self.application()
        while self.check("*"):
            op = self.advance()
            right = self.application()
            left = PrimOp("mult", [left, right], op.pos)
        return left

    def starts_atom(self) -> bool:
        tok = self.peek()
        if self.at_boundary():
            return False
        if tok.kind in ("ident", "int"):
            return True
        if tok.kind == "kw":
            return tok.text in ("true", "false", "fst", "snd")
        return tok.kind == "sym" and tok.text in ("(", "<[", "~")

    def application(self) -> SurfaceTerm:
        tok = self.peek()
        if not self.starts_atom():
            raise SyntaxError_(tok.line, tok.col, "an expression")
        head = self.atom()
        while self.starts_atom():
            arg = self.atom()
            head = App(head, arg, head.pos)
        return head

    def atom(self) -> SurfaceTerm:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text, tok.pos)
        if tok.kind == "int":
            self.advance()
            try:
                return Lit(ir.LInt(int(tok.text)), tok.pos)
            except Overflow:
                raise SyntaxError_(tok.line, tok.col, "a 64-bit integer literal") from None
        if tok.kind == "kw" and tok.text in ("true", "false"):
            self.advance()
            return Lit(ir.LBool(tok.text == "true"), tok.pos)
        if tok.kind == "kw" and tok.text in ("fst", "snd"):
            self.advance()
            if not self.starts_atom():
                raise SyntaxError_(self.peek().line, self.peek().col, f"an argument to {tok.text}")
            return PrimOp(tok.text, [self.atom()], tok.pos)
        if self.check("~"):
            self.advance()
            if not self.starts_atom():
                raise SyntaxError_(self.peek().line, self.peek().col, "an expression after '~'")
            return Esc(self.atom(), tok.pos)
        if self.check("<["):
            self.advance()
            body = self.expr()
            self.expect("]>")
            return Brak(body, tok.pos)
        if self.check("("):
            self.advance()
            if self.check(")"):
                self.advance()
                return Lit(ir.LUnit(), tok.pos)
            inner = self.expr()
            if self.check(","):
                self.advance()
                second = self.expr()
                self.expect(")")
                return PrimOp("pair", [inner, second], tok.pos)
            self.expect(")")
            return inner
        raise SyntaxError_(tok.line, tok.col, "an expression")

    # -- types --------------------------------------------------------------

    def type_(self) -> MLType:
        left = self.btype()
        if self.check("->"):
            self.advance()
            return GFun(left, self.type_())
        return left

    def btype(self) -> MLType:
        tok = self.peek()
        if tok.kind == "ident" and tok.text in ("Int", "Bool") and not self.at_boundary():
            self.advance()
            return GInt() if tok.text == "Int" else GBool()
        if self.check("<["):
            self.advance()
            inner = self.type_()
            self.expect("]>")
            self.expect("@")
            return Code(inner, CName(self.ident().text))
        if self.check("("):
            self.advance()
            if self.check(")"):
                self.advance()
                return GUnit()
            inner = self.type_()
            if self.check(","):
                self.advance()
                second = self.type_()
                self.expect(")")
                return GPair(inner, second)
            self.expect(")")
            return inner
        raise SyntaxError_(tok.line, tok.col, "a type")


def parse(source: str) -> Program:
    return Parser(source).program()


def parse_expr(source: str) -> SurfaceTerm:
    return Parser(source).standalone_expr()


def parse_type(source: str) -> MLType:
    p = Parser(source)
    p.layout = False
    t = p.type_()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise SyntaxError_(tok.line, tok.col, "end of type")
    return t
