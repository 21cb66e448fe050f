"""Level-aware type inference with environment classifiers.

First-order unification over types and classifiers.  Every variable occurrence
must sit at exactly the level of its binder; a bracket pushes a classifier onto
the level and an escape pops it.  Only top-level definitions are generalized.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .. import ir
from ..errors import (ClassifierMismatch, EscapeAtLevelZero, LevelMismatch, OccursCheck,
                      TypeError_, TypeMismatch, UnboundVar)
from .syntax import (App, Brak, CName, Classifier, Code, CVar, Definition, Esc, GBool, GFun,
                     GInt, GPair, GUnit, If, Lam, Let, LetRec, Lit, MLType, Note, PrimOp,
                     Program, SurfaceTerm, TVar, Var, show_classifier, show_type)

Level = tuple[Classifier, ...]


@dataclass
class Typed:
    """A surface node annotated with its type and level (innermost classifier first)."""
    node: SurfaceTerm
    type: MLType
    level: Level
    kids: list["Typed"] = field(default_factory=list)
    binder: int | None = None     # Var: uid of its binder; Lam/Let/LetRec: uid introduced
    binder_level: Level | None = None
    global_ref: bool = False      # Var referring to a top-level definition

    @property
    def transport(self) -> bool:
        """Literal at a positive level, lifted with a constant combinator."""
        return isinstance(self.node, Lit) and len(self.level) > 0

    def free_vars(self) -> list[tuple[str, MLType, Level]]:
        seen: dict[int, tuple[str, MLType, Level]] = {}
        bound: set[int] = set()

        def walk(t: Typed):
            if isinstance(t.node, Var):
                if t.binder is not None and t.binder not in bound and t.binder not in seen:
                    seen[t.binder] = (t.node.name, t.type, t.level)
                return
            if isinstance(t.node, (Lam, LetRec)):
                bound.add(t.binder)
                for k in t.kids:
                    walk(k)
                return
            if isinstance(t.node, Let):
                walk(t.kids[0])
                bound.add(t.binder)
                walk(t.kids[1])
                return
            for k in t.kids:
                walk(k)
        walk(self)
        return list(seen.values())


@dataclass(frozen=True)
class Scheme:
    tvars: frozenset
    cvars: frozenset
    type: MLType


@dataclass
class Binding:
    scheme: Scheme
    level: Level
    uid: int
    top: bool = False


@dataclass
class TypedDef:
    name: str
    scheme: Scheme
    body: Typed
    definition: Definition


_BINOPS = {"mult": (GInt(), GInt(), GInt()), "add": (GInt(), GInt(), GInt()),
           "sub": (GInt(), GInt(), GInt()), "eq": (GInt(), GInt(), GBool())}


class Checker:
    def __init__(self):
        self.tsub: dict[int, MLType] = {}
        self.csub: dict[int, Classifier] = {}
        self.ids = itertools.count()

    # -- substitution -------------------------------------------------------

    def fresh(self) -> TVar:
        return TVar(next(self.ids))

    def fresh_c(self) -> CVar:
        return CVar(next(self.ids))

    def cresolve(self, c: Classifier) -> Classifier:
        while isinstance(c, CVar) and c.id in self.csub:
            c = self.csub[c.id]
        return c

    def resolve(self, t: MLType) -> MLType:
        while isinstance(t, TVar) and t.id in self.tsub:
            t = self.tsub[t.id]
        return t

    def zonk(self, t: MLType) -> MLType:
        t = self.resolve(t)
        if isinstance(t, GFun):
            return GFun(self.zonk(t.dom), self.zonk(t.cod))
        if isinstance(t, GPair):
            return GPair(self.zonk(t.l), self.zonk(t.r))
        if isinstance(t, Code):
            return Code(self.zonk(t.inner), self.cresolve(t.classifier))
        return t

    def zonk_level(self, lv: Level) -> Level:
        return tuple(self.cresolve(c) for c in lv)

    def zonk_tree(self, t: Typed) -> None:
        t.type = self.zonk(t.type)
        t.level = self.zonk_level(t.level)
        if t.binder_level is not None:
            t.binder_level = self.zonk_level(t.binder_level)
        for k in t.kids:
            self.zonk_tree(k)

    # -- unification --------------------------------------------------------

    def occurs(self, v: int, t: MLType) -> bool:
        t = self.resolve(t)
        if isinstance(t, TVar):
            return t.id == v
        if isinstance(t, GFun):
            return self.occurs(v, t.dom) or self.occurs(v, t.cod)
        if isinstance(t, GPair):
            return self.occurs(v, t.l) or self.occurs(v, t.r)
        if isinstance(t, Code):
            return self.occurs(v, t.inner)
        return False

    def unify_c(self, a: Classifier, b: Classifier, pos=None) -> None:
        a, b = self.cresolve(a), self.cresolve(b)
        if a == b:
            return
        if isinstance(a, CVar):
            self.csub[a.id] = b
        elif isinstance(b, CVar):
            self.csub[b.id] = a
        else:
            raise ClassifierMismatch(
                f"classifiers {show_classifier(a)} and {show_classifier(b)} differ", pos)

    def unify(self, expected: MLType, actual: MLType, pos=None) -> None:
        def fail():
            raise TypeMismatch(f"expected {show_type(self.zonk(expected))}, "
                               f"got {show_type(self.zonk(actual))}", pos)
        self._unify(expected, actual, pos, fail)

    def _unify(self, a, b, pos, fail):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar) or isinstance(b, TVar):
            v, other = (a, b) if isinstance(a, TVar) else (b, a)
            if self.occurs(v.id, other):
                raise OccursCheck(f"t{v.id} occurs in {show_type(self.zonk(other))}", pos)
            self.tsub[v.id] = other
            return
        if isinstance(a, GFun) and isinstance(b, GFun):
            self._unify(a.dom, b.dom, pos, fail)
            self._unify(a.cod, b.cod, pos, fail)
            return
        if isinstance(a, GPair) and isinstance(b, GPair):
            self._unify(a.l, b.l, pos, fail)
            self._unify(a.r, b.r, pos, fail)
            return
        if isinstance(a, Code) and isinstance(b, Code):
            self._unify(a.inner, b.inner, pos, fail)
            self.unify_c(a.classifier, b.classifier, pos)
            return
        fail()

    def unify_levels(self, name: str, bound: Level, use: Level, pos) -> None:
        if len(bound) != len(use):
            raise LevelMismatch(
                f"{name} is bound at level {show_level(bound)} but used at level "
                f"{show_level(use)}", pos)
        for b, u in zip(bound, use):
            self.unify_c(b, u, pos)

    # -- schemes ------------------------------------------------------------

    def instantiate(self, s: Scheme) -> MLType:
        tmap = {v: self.fresh() for v in s.tvars}
        cmap = {c: self.fresh_c() for c in s.cvars}

        def go(t):
            t = self.resolve(t)
            if isinstance(t, TVar):
                return tmap.get(t.id, t)
            if isinstance(t, GFun):
                return GFun(go(t.dom), go(t.cod))
            if isinstance(t, GPair):
                return GPair(go(t.l), go(t.r))
            if isinstance(t, Code):
                c = self.cresolve(t.classifier)
                return Code(go(t.inner), cmap.get(c, c))
            return t
        return go(s.type)

    def generalize(self, t: MLType) -> Scheme:
        t = self.zonk(t)
        tv, cv = type_variables(t)
        return Scheme(frozenset(v.id for v in tv), frozenset(cv), t)

    # -- inference ----------------------------------------------------------

    def annot(self, t: MLType | None) -> MLType:
        return self.fresh() if t is None else t

    def infer(self, e: SurfaceTerm, env: dict[str, Binding], level: Level) -> Typed:
        pos = e.pos
        if isinstance(e, Var):
            b = env.get(e.name)
            if b is None:
                raise UnboundVar(f"unbound variable {e.name}", pos)
            self.unify_levels(e.name, b.level, level, pos)
            ty = self.instantiate(b.scheme) if b.top else b.scheme.type
            return Typed(e, ty, level, binder=b.uid, binder_level=b.level, global_ref=b.top)
        if isinstance(e, Lit):
            return Typed(e, _lit_type(e.lit), level)
        if isinstance(e, Lam):
            a = self.annot(e.annot)
            uid = next(self.ids)
            body = self.infer(e.body, {**env, e.name: Binding(Scheme(frozenset(), frozenset(), a),
                                                              level, uid)}, level)
            return Typed(e, GFun(a, body.type), level, [body], binder=uid)
        if isinstance(e, App):
            f = self.infer(e.f, env, level)
            a = self.infer(e.a, env, level)
            r = self.fresh()
            fty = self.resolve(f.type)
            if isinstance(fty, GFun):
                self.unify(fty.dom, a.type, e.a.pos or pos)
                r = fty.cod
            else:
                self.unify(GFun(a.type, r), f.type, pos)
            return Typed(e, r, level, [f, a])
        if isinstance(e, Let):
            bound = self.infer(e.bound, env, level)
            uid = next(self.ids)
            body = self.infer(e.body, {**env, e.name: Binding(
                Scheme(frozenset(), frozenset(), bound.type), level, uid)}, level)
            return Typed(e, body.type, level, [bound, body], binder=uid)
        if isinstance(e, LetRec):
            uid = next(self.ids)
            inner = {**env, e.name: Binding(Scheme(frozenset(), frozenset(), e.annot), level, uid)}
            bound = self.infer(e.bound, inner, level)
            self.unify(e.annot, bound.type, e.bound.pos or pos)
            body = self.infer(e.body, inner, level)
            return Typed(e, body.type, level, [bound, body], binder=uid)
        if isinstance(e, If):
            c = self.infer(e.c, env, level)
            self.unify(GBool(), c.type, e.c.pos or pos)
            t = self.infer(e.t, env, level)
            f = self.infer(e.e, env, level)
            self.unify(t.type, f.type, e.e.pos or pos)
            return Typed(e, t.type, level, [c, t, f])
        if isinstance(e, PrimOp):
            kids = [self.infer(a, env, level) for a in e.args]
            return Typed(e, self.prim_type(e, kids), level, kids)
        if isinstance(e, Brak):
            alpha = self.fresh_c()
            body = self.infer(e.body, env, (alpha,) + level)
            return Typed(e, Code(body.type, alpha), level, [body])
        if isinstance(e, Esc):
            if not level:
                raise EscapeAtLevelZero("escape outside of any bracket", pos)
            body = self.infer(e.body, env, level[1:])
            inner = self.fresh()
            self.unify(Code(inner, level[0]), body.type, e.body.pos or pos)
            return Typed(e, inner, level, [body])
        if isinstance(e, Note):
            body = self.infer(e.body, env, level)
            return Typed(e, body.type, level, [body])
        raise TypeError(f"unknown term {e!r}")

    def prim_type(self, e: PrimOp, kids: list[Typed]) -> MLType:
        def arity(n):
            if len(kids) != n:
                raise TypeError_(f"{e.name} takes {n} arguments", e.pos)
        if e.name in _BINOPS:
            arity(2)
            a, b, r = _BINOPS[e.name]
            self.unify(a, kids[0].type, e.args[0].pos or e.pos)
            self.unify(b, kids[1].type, e.args[1].pos or e.pos)
            return r
        if e.name == "pair":
            arity(2)
            return GPair(kids[0].type, kids[1].type)
        if e.name in ("fst", "snd"):
            arity(1)
            a, b = self.fresh(), self.fresh()
            self.unify(GPair(a, b), kids[0].type, e.args[0].pos or e.pos)
            return a if e.name == "fst" else b
        raise TypeError_(f"unknown primitive {e.name}", e.pos)

    # -- programs -----------------------------------------------------------

    def check_program(self, prog: Program, env: dict[str, Binding] | None = None) -> list[TypedDef]:
        env = dict(env or {})
        out = []
        for d in prog:
            self_ty = self.fresh()
            uid = next(self.ids)
            inner = {**env, d.name: Binding(Scheme(frozenset(), frozenset(), self_ty), (), uid)}
            body = self.infer(d.term(), inner, ())
            self.unify(self_ty, body.type, d.pos)
            self.zonk_tree(body)
            scheme = self.generalize(body.type)
            # references to the definition inside its own body are monomorphic
            _mark_self(body, uid)
            env[d.name] = Binding(scheme, (), uid, top=True)
            out.append(TypedDef(d.name, scheme, body, d))
        return out


def _mark_self(t: Typed, uid: int) -> None:
    if isinstance(t.node, Var) and t.binder == uid:
        t.global_ref = True
    for k in t.kids:
        _mark_self(k, uid)


def _lit_type(lit: ir.Literal) -> MLType:
    if isinstance(lit, ir.LInt):
        return GInt()
    if isinstance(lit, ir.LBool):
        return GBool()
    return GUnit()


def type_variables(t: MLType) -> tuple[list[TVar], list[Classifier]]:
    """Type and classifier variables of ``t`` in order of first occurrence."""
    tv: list[TVar] = []
    cv: list[Classifier] = []

    def go(t):
        if isinstance(t, TVar):
            if t not in tv:
                tv.append(t)
        elif isinstance(t, GFun):
            go(t.dom)
            go(t.cod)
        elif isinstance(t, GPair):
            go(t.l)
            go(t.r)
        elif isinstance(t, Code):
            go(t.inner)
            if t.classifier not in cv:
                cv.append(t.classifier)
    go(t)
    return tv, cv


def show_level(lv: Level) -> str:
    if not lv:
        return "."
    return ",".join(show_classifier(c) for c in lv)


_TYVAR_NAMES = "abdefghijmnpqrstuvwxyz"


def show_scheme(s: Scheme) -> str:
    tv, cv = type_variables(s.type)
    names: dict = {}
    for i, v in enumerate(tv):
        names[v] = _TYVAR_NAMES[i] if i < len(_TYVAR_NAMES) else f"t{i}"
    quantified = [c for c in cv if c in s.cvars]
    for i, c in enumerate(quantified):
        names[c] = "c" if i == 0 else f"c{i}"
    body = show_type(s.type, names)
    if quantified:
        return f"forall {' '.join(names[c] for c in quantified)}. {body}"
    return body


def alpha_equal(a: MLType, b: MLType) -> bool:
    """Equality up to a consistent renaming of type and classifier variables."""
    fwd: dict = {}
    bwd: dict = {}

    def bind(x, y):
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            return False
        return True

    def go(x, y):
        if isinstance(x, TVar) and isinstance(y, TVar):
            return bind(x, y)
        if type(x) is not type(y):
            return False
        if isinstance(x, GFun):
            return go(x.dom, y.dom) and go(x.cod, y.cod)
        if isinstance(x, GPair):
            return go(x.l, y.l) and go(x.r, y.r)
        if isinstance(x, Code):
            return go(x.inner, y.inner) and bind(x.classifier, y.classifier)
        return x == y
    return go(a, b)


def typecheck(prog: Program) -> list[TypedDef]:
    return Checker().check_program(prog)


def typecheck_expr(e: SurfaceTerm, defs: list[TypedDef] | None = None) -> Typed:
    ck = Checker()
    env = {d.name: Binding(d.scheme, (), -1 - i, top=True) for i, d in enumerate(defs or [])}
    t = ck.infer(e, env, ())
    ck.zonk_tree(t)
    return t
