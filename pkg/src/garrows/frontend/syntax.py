"""Surface AST and the types of the two-level language."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .. import ir

Pos = tuple[int, int] | None


# ---------------------------------------------------------------------------
# types

class MLType:
    __slots__ = ()


@dataclass(frozen=True)
class GInt(MLType):
    pass


@dataclass(frozen=True)
class GBool(MLType):
    pass


@dataclass(frozen=True)
class GUnit(MLType):
    pass


@dataclass(frozen=True)
class GFun(MLType):
    dom: MLType
    cod: MLType


@dataclass(frozen=True)
class GPair(MLType):
    l: MLType
    r: MLType


@dataclass(frozen=True)
class TVar(MLType):
    id: int


class Classifier:
    __slots__ = ()


@dataclass(frozen=True)
class CVar(Classifier):
    """Classifier unification variable."""
    id: int


@dataclass(frozen=True)
class CName(Classifier):
    """Rigid classifier named in an annotation."""
    name: str


@dataclass(frozen=True)
class Code(MLType):
    inner: MLType
    classifier: Classifier


# ---------------------------------------------------------------------------
# terms

class SurfaceTerm:
    pos: Pos


@dataclass
class Var(SurfaceTerm):
    name: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Lit(SurfaceTerm):
    lit: ir.Literal
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Lam(SurfaceTerm):
    name: str
    annot: MLType | None
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class App(SurfaceTerm):
    f: SurfaceTerm
    a: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Let(SurfaceTerm):
    name: str
    bound: SurfaceTerm
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class LetRec(SurfaceTerm):
    name: str
    annot: MLType
    bound: SurfaceTerm
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class If(SurfaceTerm):
    c: SurfaceTerm
    t: SurfaceTerm
    e: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class PrimOp(SurfaceTerm):
    name: str
    args: list[SurfaceTerm]
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Brak(SurfaceTerm):
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Esc(SurfaceTerm):
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Note(SurfaceTerm):
    text: str
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass
class Definition:
    name: str
    params: list[str]
    body: SurfaceTerm
    pos: Pos = field(default=None, compare=False, repr=False)

    def term(self) -> SurfaceTerm:
        """The definition as a single expression, parameters turned into lambdas."""
        out = self.body
        for p in reversed(self.params):
            out = Lam(p, None, out, self.pos)
        return out


Program = list[Definition]


def subterms(t: SurfaceTerm) -> list[SurfaceTerm]:
    if isinstance(t, (Lam, Brak, Esc, Note)):
        return [t.body]
    if isinstance(t, App):
        return [t.f, t.a]
    if isinstance(t, (Let, LetRec)):
        return [t.bound, t.body]
    if isinstance(t, If):
        return [t.c, t.t, t.e]
    if isinstance(t, PrimOp):
        return list(t.args)
    return []


def free_vars(t: SurfaceTerm) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.name}
    if isinstance(t, Let):
        return free_vars(t.bound) | (free_vars(t.body) - {t.name})
    if isinstance(t, LetRec):
        return (free_vars(t.bound) | free_vars(t.body)) - {t.name}
    out: set[str] = set()
    for s in subterms(t):
        out |= free_vars(s)
    return out


def alpha_equivalent(a: SurfaceTerm, b: SurfaceTerm, env=None) -> bool:
    """Structural equality up to renaming of bound variables."""
    env = env or {}
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return env.get(a.name, a.name) == b.name
    if isinstance(a, Lit):
        return a.lit == b.lit
    if isinstance(a, Lam):
        return a.annot == b.annot and alpha_equivalent(a.body, b.body, {**env, a.name: b.name})
    if isinstance(a, Let):
        return (alpha_equivalent(a.bound, b.bound, env)
                and alpha_equivalent(a.body, b.body, {**env, a.name: b.name}))
    if isinstance(a, LetRec):
        inner = {**env, a.name: b.name}
        return (a.annot == b.annot and alpha_equivalent(a.bound, b.bound, inner)
                and alpha_equivalent(a.body, b.body, inner))
    if isinstance(a, PrimOp) and a.name != b.name:
        return False
    if isinstance(a, Note) and a.text != b.text:
        return False
    sa, sb = subterms(a), subterms(b)
    return len(sa) == len(sb) and all(alpha_equivalent(x, y, env) for x, y in zip(sa, sb))


# ---------------------------------------------------------------------------
# printing

_OPS = {"mult": "*", "add": "+", "sub": "-", "eq": "=="}


def show_type(t: MLType, names: dict | None = None) -> str:
    names = names if names is not None else {}
    if isinstance(t, GInt):
        return "Int"
    if isinstance(t, GBool):
        return "Bool"
    if isinstance(t, GUnit):
        return "()"
    if isinstance(t, TVar):
        return names.get(t, f"t{t.id}")
    if isinstance(t, GFun):
        left = show_type(t.dom, names)
        if isinstance(t.dom, GFun):
            left = f"({left})"
        return f"{left} -> {show_type(t.cod, names)}"
    if isinstance(t, GPair):
        return f"({show_type(t.l, names)}, {show_type(t.r, names)})"
    if isinstance(t, Code):
        return f"<[{show_type(t.inner, names)}]>@{show_classifier(t.classifier, names)}"
    raise TypeError(t)


def show_classifier(c: Classifier, names: dict | None = None) -> str:
    names = names or {}
    if c in names:
        return names[c]
    if isinstance(c, CName):
        return c.name
    return f"k{c.id}"


def _operand(t: SurfaceTerm) -> str:
    # binder forms extend as far right as possible, so they need closing off
    text = show_term(t)
    open_ended = isinstance(t, (Lam, Let, LetRec, If)) or \
        (isinstance(t, PrimOp) and t.name == "ite")
    return f"({text})" if open_ended else text


def show_term(t: SurfaceTerm) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return str(t.lit) if not (isinstance(t.lit, ir.LInt) and t.lit.value < 0) \
            else f"(0 - {-t.lit.value})"
    if isinstance(t, Lam):
        if t.annot is not None:
            return f"\\({t.name} : {show_type(t.annot)}) -> {show_term(t.body)}"
        return f"\\{t.name} -> {show_term(t.body)}"
    if isinstance(t, App):
        return f"({show_term(t.f)}) ({show_term(t.a)})"
    if isinstance(t, Let):
        return f"let {t.name} = {show_term(t.bound)} in {show_term(t.body)}"
    if isinstance(t, LetRec):
        return (f"letrec {t.name} : {show_type(t.annot)} = {show_term(t.bound)} "
                f"in {show_term(t.body)}")
    if isinstance(t, If):
        return f"if {show_term(t.c)} then {show_term(t.t)} else {show_term(t.e)}"
    if isinstance(t, PrimOp):
        if t.name in _OPS:
            a, b = t.args
            return f"({_operand(a)} {_OPS[t.name]} {_operand(b)})"
        if t.name == "pair":
            a, b = t.args
            return f"({_operand(a)}, {_operand(b)})"
        if t.name == "ite":
            c, a, b = t.args
            return f"if {show_term(c)} then {show_term(a)} else {show_term(b)}"
        return f"{t.name} ({show_term(t.args[0])})"
    if isinstance(t, Brak):
        return f"<[ {show_term(t.body)} ]>"
    if isinstance(t, Esc):
        return f"~({show_term(t.body)})"
    if isinstance(t, Note):
        return f"note {json.dumps(t.text)} ({show_term(t.body)})"
    raise TypeError(t)
