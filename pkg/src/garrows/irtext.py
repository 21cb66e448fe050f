"""Textual s-expression form of combinator terms.

Shapes are left out of the rendering and rebuilt from the root domain while
parsing.  The five heads whose shapes cannot be recovered from their input
(``curryr``, ``loopr``, ``never``, ``inl``, ``inr``) carry one type or shape
argument.
"""
from __future__ import annotations

import re

from . import ir
from .errors import IllTyped, IRSyntaxError
from .prims import prim_term

_SIMPLE = {
    ir.Id: "id", ir.CancelL: "cancell", ir.CancelR: "cancelr",
    ir.UncancelL: "uncancell", ir.UncancelR: "uncancelr", ir.Assoc: "assoc",
    ir.Unassoc: "unassoc", ir.Copy: "copy", ir.Drop: "drop", ir.Swap: "swap",
    ir.ApplyR: "applyr", ir.Merge: "merge",
}


def render_type(t: ir.GuestType) -> str:
    return str(t)


def render_shape(s: ir.ShapeTree) -> str:
    return str(s)


def render_ir(t: ir.GaTerm, header: bool = False) -> str:
    body = _render(t)
    if header:
        d, c = ir.ga_type_of(t)
        return f";; dom: {d} ;; cod: {c}\n{body}"
    return body


def _render(t: ir.GaTerm) -> str:
    head = _SIMPLE.get(type(t))
    if head is not None:
        return f"({head})"
    if isinstance(t, ir.Comp):
        return f"(comp {_render(t.f)} {_render(t.g)})"
    if isinstance(t, ir.First):
        return f"(first {_render(t.f)})"
    if isinstance(t, ir.Second):
        return f"(second {_render(t.f)})"
    if isinstance(t, ir.Constant):
        return f"(constant {t.lit})"
    if isinstance(t, ir.Prim):
        return f"(prim {t.name})"
    if isinstance(t, ir.CurryR):
        d, _ = ir.ga_type_of(t.f)
        return f"(curryr {d.r.t} {_render(t.f)})"
    if isinstance(t, ir.LoopR):
        return f"(loopr {t.z} {_render(t.f)})"
    if isinstance(t, ir.Never):
        return f"(never {t.x})"
    if isinstance(t, ir.InjL):
        return f"(inl {t.y})"
    if isinstance(t, ir.InjR):
        return f"(inr {t.x})"
    raise TypeError(f"not a GaTerm: {t!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<unit>\(\s*\))
  | (?P<arrow>->)
  | (?P<punct>[()<>,+*])
  | (?P<int>-?\d+)
  | (?P<tyvar>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_HEADER = re.compile(r";;\s*dom:\s*(?P<dom>.*?)\s*;;\s*cod:\s*(?P<cod>.*?)\s*$", re.MULTILINE)


def _tokenize(text: str, base: int = 0) -> list[tuple[str, str, int]]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise IRSyntaxError(base + i, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            out.append((kind if kind not in ("punct", "arrow") else val, val, base + i))
        i = m.end()
    out.append(("eof", "", base + len(text)))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise IRSyntaxError(tok[2], f"expected {kind!r}, found {tok[1] or 'end of input'!r}")
        return tok

    # types: Int | Bool | Unit | 'a | (T -> T) | (T + T) | (T * T)
    def gtype(self) -> ir.GuestType:
        kind, val, pos = self.next()
        if kind == "ident":
            simple = {"Int": ir.INT, "Bool": ir.BOOL, "Unit": ir.UNIT}
            if val in simple:
                return simple[val]
            raise IRSyntaxError(pos, f"unknown type {val!r}")
        if kind == "tyvar":
            return ir.TyVarT(val[1:])
        if kind == "(":
            left = self.gtype()
            op = self.next()
            right = self.gtype()
            self.expect(")")
            ctor = {"->": ir.ExpT, "+": ir.SumT, "*": ir.ProdT}.get(op[0])
            if ctor is None:
                raise IRSyntaxError(op[2], "expected '->', '+' or '*'")
            return ctor(left, right)
        raise IRSyntaxError(pos, "expected a type")

    # shapes: <> | <T> | <S, S>
    def shape(self) -> ir.ShapeTree:
        self.expect("<")
        if self.peek()[0] == ">":
            self.next()
            return ir.EMPTY
        if self.peek()[0] == "<":
            left = self.shape()
            self.expect(",")
            right = self.shape()
            self.expect(">")
            return ir.Branch(left, right)
        t = self.gtype()
        self.expect(">")
        return ir.Leaf(t)

    def literal(self) -> ir.Literal:
        kind, val, pos = self.next()
        if kind == "int":
            return ir.LInt(int(val))
        if kind == "unit":
            return ir.LUnit()
        if kind == "ident" and val in ("true", "false"):
            return ir.LBool(val == "true")
        raise IRSyntaxError(pos, "expected a literal")

    def term(self, d: ir.ShapeTree, path: str = "") -> ir.GaTerm:
        self.expect("(")
        kind, head, pos = self.next()
        if kind != "ident":
            raise IRSyntaxError(pos, "expected a combinator name")
        t = self._body(head, pos, d, path)
        self.expect(")")
        return t

    def _body(self, head, pos, d, path):
        def need(cond, expected):
            if not cond:
                raise IllTyped(path or "root", expected, d, f"{head} cannot take input {d}")

        B = ir.Branch
        if head == "id":
            return ir.Id(d)
        if head == "comp":
            f = self.term(d, path + ".f")
            g = self.term(ir.ga_type_of(f)[1], path + ".g")
            return ir.Comp(f, g)
        if head == "first":
            need(isinstance(d, B), "<a, z>")
            return ir.First(self.term(d.l, path + ".f"), d.r)
        if head == "second":
            need(isinstance(d, B), "<z, a>")
            return ir.Second(self.term(d.r, path + ".f"), d.l)
        if head == "cancell":
            need(isinstance(d, B) and d.l == ir.EMPTY, "<<>, x>")
            return ir.CancelL(d.r)
        if head == "cancelr":
            need(isinstance(d, B) and d.r == ir.EMPTY, "<x, <>>")
            return ir.CancelR(d.l)
        if head == "uncancell":
            return ir.UncancelL(d)
        if head == "uncancelr":
            return ir.UncancelR(d)
        if head == "assoc":
            need(isinstance(d, B) and isinstance(d.l, B), "<<x, y>, z>")
            return ir.Assoc(d.l.l, d.l.r, d.r)
        if head == "unassoc":
            need(isinstance(d, B) and isinstance(d.r, B), "<x, <y, z>>")
            return ir.Unassoc(d.l, d.r.l, d.r.r)
        if head == "copy":
            return ir.Copy(d)
        if head == "drop":
            return ir.Drop(d)
        if head == "swap":
            need(isinstance(d, B), "<x, y>")
            return ir.Swap(d.l, d.r)
        if head == "constant":
            need(d == ir.EMPTY, "<>")
            lit = self.literal()
            return ir.Constant(lit, ir.literal_type(lit))
        if head == "prim":
            name = self.expect("ident")[1]
            return prim_term(name, d)
        if head == "curryr":
            x = self.gtype()
            f = self.term(B(d, ir.Leaf(x)), path + ".f")
            t = ir.CurryR(f)
            ir.ga_type_of(t, path)
            return t
        if head == "applyr":
            need(isinstance(d, B) and isinstance(d.l, ir.Leaf) and isinstance(d.r, ir.Leaf)
                 and isinstance(d.r.t, ir.ExpT) and d.r.t.dom == d.l.t, "<<x>, <(x -> y)>>")
            return ir.ApplyR(d.l.t, d.r.t.cod)
        if head == "loopr":
            z = self.shape()
            t = ir.LoopR(self.term(B(d, z), path + ".f"), z)
            ir.ga_type_of(t, path)
            return t
        if head == "merge":
            need(isinstance(d, ir.Leaf) and isinstance(d.t, ir.SumT) and d.t.l == d.t.r,
                 "<(x + x)>")
            return ir.Merge(d.t.l)
        if head == "never":
            need(d == ir.EMPTY, "<>")
            return ir.Never(self.gtype())
        if head == "inl":
            need(isinstance(d, ir.Leaf), "<x>")
            return ir.InjL(d.t, self.gtype())
        if head == "inr":
            need(isinstance(d, ir.Leaf), "<y>")
            return ir.InjR(self.gtype(), d.t)
        raise IRSyntaxError(pos, f"unknown combinator {head!r}")


def parse_shape(text: str) -> ir.ShapeTree:
    p = _Parser(_tokenize(text))
    s = p.shape()
    p.expect("eof")
    return s


def parse_type(text: str) -> ir.GuestType:
    p = _Parser(_tokenize(text))
    t = p.gtype()
    p.expect("eof")
    return t


def parse_ir(text: str, dom: ir.ShapeTree | None = None) -> ir.GaTerm:
    body_start = 0
    expected_cod = None
    m = _HEADER.search(text)
    if m and text[:m.start()].strip() == "":
        header_dom = parse_shape(m.group("dom"))
        expected_cod = parse_shape(m.group("cod"))
        if dom is None:
            dom = header_dom
        elif dom != header_dom:
            raise IllTyped("root", header_dom, dom)
        body_start = m.end()
    if dom is None:
        raise IRSyntaxError(0, "no domain given and no ';; dom:' header")
    p = _Parser(_tokenize(text[body_start:], body_start))
    t = p.term(dom)
    p.expect("eof")
    if expected_cod is not None:
        c = ir.ga_type_of(t)[1]
        if c != expected_cod:
            raise IllTyped("root", expected_cod, c)
    return t
