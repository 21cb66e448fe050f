"""Flattening by staged evaluation.

Level-0 code runs call-by-value.  Evaluating a bracket elaborates its body,
runs every splice in the current level-0 environment and assembles the
combinator term; the result is a code value holding the normalized term.

Code of guest function type ``a -> b`` is always a morphism ``<a> -> <b>``;
code of any other type ``t`` is a morphism ``<> -> <t>``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import ir
from .derivation import (AAssoc, AComp, ACanL, ACanR, ACont, AExch, AId, ALeft, ARight,
                         Arrangement, AuAssoc, AuCanL, AuCanR, AWeak, DAbs, DApp, DArrange,
                         DBrak, DEsc, Derivation, DLet, DLetRec, DLit, DNote, DPrim, DSpliceApp,
                         DVar, elaborate)
from .errors import (FuelExhausted, GarrowError, InternalError, Overflow, SpliceNotCode,
                     UserError)
from .frontend.syntax import (App, Brak, Esc, If, Lam, Let, LetRec, Lit, Note, PrimOp, Var)
from .frontend.typecheck import Typed, TypedDef
from .prims import lookup
from .values import (UNIT, VBool, VCode, VFun, VInt, VPair, Value, literal_value)

DEFAULT_STEPS = 1_000_000

# ---------------------------------------------------------------------------
# arrangements to wiring


def interp_arrangement(a: Arrangement) -> ir.GaTerm:
    """Contravariant reading: domain is arr_tgt(a), codomain arr_src(a)."""
    hit = a.__dict__.get("_wiring")
    if hit is None:
        hit = _interp(a)
        object.__setattr__(a, "_wiring", hit)
    return hit


def _interp(a: Arrangement) -> ir.GaTerm:
    if isinstance(a, AId):
        return ir.Id(a.s)
    if isinstance(a, ACont):
        return ir.Copy(a.s)
    if isinstance(a, AWeak):
        return ir.Drop(a.s)
    if isinstance(a, AExch):
        return ir.Swap(a.b, a.a)
    if isinstance(a, ACanL):
        return ir.UncancelL(a.s)
    if isinstance(a, AuCanL):
        return ir.CancelL(a.s)
    if isinstance(a, ACanR):
        return ir.UncancelR(a.s)
    if isinstance(a, AuCanR):
        return ir.CancelR(a.s)
    if isinstance(a, AAssoc):
        return ir.Unassoc(a.a, a.b, a.c)
    if isinstance(a, AuAssoc):
        return ir.Assoc(a.a, a.b, a.c)
    if isinstance(a, ALeft):
        return ir.Second(interp_arrangement(a.sub), a.frame)
    if isinstance(a, ARight):
        return ir.First(interp_arrangement(a.sub), a.frame)
    if isinstance(a, AComp):
        return ir.Comp(interp_arrangement(a.then), interp_arrangement(a.first))
    raise TypeError(a)


# ---------------------------------------------------------------------------
# guest type unification for polymorphic splices

class _Subst:
    def __init__(self):
        self.map: dict[str, ir.GuestType] = {}

    def resolve(self, t: ir.GuestType) -> ir.GuestType:
        return ir.subst_type(t, self.map)

    def unify(self, a: ir.GuestType, b: ir.GuestType) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, ir.TyVarT) or isinstance(b, ir.TyVarT):
            v, other = (a, b) if isinstance(a, ir.TyVarT) else (b, a)
            if v.name in ir.type_vars(other):
                raise InternalError(f"splice type {v} occurs in {other}")
            self.map[v.name] = other
            return
        for cls, parts in ((ir.ExpT, ("dom", "cod")), (ir.ProdT, ("l", "r")),
                           (ir.SumT, ("l", "r"))):
            if isinstance(a, cls) and isinstance(b, cls):
                for p in parts:
                    self.unify(getattr(a, p), getattr(b, p))
                return
        raise InternalError(f"spliced code of type {b} where {a} was expected")


_fresh = itertools.count()


def _freshen(t: ir.GaTerm) -> ir.GaTerm:
    names = ir.term_type_vars(t)
    if not names:
        return t
    ren = {n: ir.TyVarT(f"s{next(_fresh)}") for n in sorted(names)}
    return ir.map_types(t, lambda ty: ir.subst_type(ty, ren))


def code_type(m: ir.GaTerm) -> ir.GuestType:
    """Guest type of a code value's term under the representation convention."""
    d, c = ir.ga_type_of(m)
    if isinstance(d, ir.Empty) and isinstance(c, ir.Leaf):
        return c.t
    if isinstance(d, ir.Leaf) and isinstance(c, ir.Leaf):
        return ir.ExpT(d.t, c.t)
    raise InternalError(f"code value of shape {d} -> {c}")


def canonical_type_names(t: ir.GaTerm) -> ir.GaTerm:
    """Rename leftover type variables to 'a, 'b, ... in order of appearance."""
    ren: dict[str, ir.GuestType] = {}

    def visit(ty):
        for n in _ordered_vars(ty):
            if n not in ren:
                i = len(ren)
                ren[n] = ir.TyVarT(chr(ord("a") + i) if i < 26 else f"t{i}")
        return ir.subst_type(ty, ren)
    if not ir.term_type_vars(t):
        return t
    return ir.map_types(t, visit)


def _ordered_vars(ty: ir.GuestType) -> list[str]:
    if isinstance(ty, ir.TyVarT):
        return [ty.name]
    if isinstance(ty, ir.ExpT):
        return _ordered_vars(ty.dom) + _ordered_vars(ty.cod)
    if isinstance(ty, (ir.ProdT, ir.SumT)):
        return _ordered_vars(ty.l) + _ordered_vars(ty.r)
    return []


# ---------------------------------------------------------------------------
# derivations to terms

def _fun_form(m: ir.GaTerm, t: ir.ExpT) -> ir.GaTerm:
    """<a> -> <b> from a closure-producing <> -> <a -> b>."""
    a = ir.Leaf(t.dom)
    return ir.compose(ir.UncancelR(a), ir.Second(m, a), ir.ApplyR(t.dom, t.cod))


def _value_form(m: ir.GaTerm, t: ir.ExpT) -> ir.GaTerm:
    """<> -> <a -> b> from a morphism <a> -> <b>."""
    return ir.CurryR(ir.Comp(ir.CancelL(ir.Leaf(t.dom)), m))


@dataclass
class StageEnv:
    """Level-0 environment: local values plus the program's top-level definitions."""
    values: dict[str, Value] = field(default_factory=dict)
    stager: "Stager | None" = None

    def bind(self, name: str, v: Value) -> "StageEnv":
        return StageEnv({**self.values, name: v}, self.stager)


class _Builder:
    def __init__(self, splices: dict[int, ir.GaTerm], sub: _Subst):
        self.splices = splices
        self.sub = sub

    def ty(self, t: ir.GuestType) -> ir.GuestType:
        return self.sub.resolve(t)

    def splice(self, d: DEsc, as_function: bool) -> ir.GaTerm:
        m = self.splices[id(d)]
        d0, _ = ir.ga_type_of(ir.map_types(m, self.ty))
        t = self.ty(d.type)
        if as_function:
            return _fun_form(m, t) if isinstance(d0, ir.Empty) else m
        if isinstance(d0, ir.Leaf):
            return _value_form(m, t)
        return m

    def build(self, d: Derivation) -> ir.GaTerm:
        if isinstance(d, DVar):
            return ir.Id(d.ctx)
        if isinstance(d, DLit):
            return ir.Constant(d.lit, d.type)
        if isinstance(d, DNote):
            return self.build(d.d)
        if isinstance(d, DArrange):
            return ir.Comp(interp_arrangement(d.arr), self.build(d.d))
        if isinstance(d, DEsc):
            return self.splice(d, as_function=False)
        if isinstance(d, DSpliceApp):
            return ir.Comp(self.build(d.darg), self.splice(d.esc, as_function=True))
        if isinstance(d, DAbs):
            body = self.build(d.d)
            return body if d.absorbed else ir.CurryR(body)
        if isinstance(d, DApp):
            a = d.darg.type
            return ir.compose(ir.First(self.build(d.darg), d.dfun.ctx),
                              ir.Second(self.build(d.dfun), ir.Leaf(a)),
                              ir.ApplyR(a, d.type))
        if isinstance(d, DLet):
            return ir.Comp(ir.Second(self.build(d.d1), d.ctx.l), self.build(d.d2))
        if isinstance(d, DLetRec):
            ft = ir.Leaf(d.d1.type)
            loop = ir.LoopR(ir.Comp(self.build(d.d1), ir.Copy(ft)), ft)
            return ir.Comp(ir.Second(loop, d.ctx.l), self.build(d.d2))
        if isinstance(d, DPrim):
            ins = ir.rnest([ir.Leaf(a.type) for a in d.args])
            out = ir.Leaf(d.type)
            return ir.Comp(self.assemble(d.args), ir.Prim(d.name, ins, out))
        if isinstance(d, DBrak):
            return self.build(d.d)
        raise TypeError(d)

    def assemble(self, args: list[Derivation]) -> ir.GaTerm:
        """rnest(ctx_i) -> rnest(<type_i>), each argument in its own slot."""
        head = self.build(args[0])
        if len(args) == 1:
            return head
        rest_ctx = ir.rnest([a.ctx for a in args[1:]])
        return ir.Comp(ir.First(head, rest_ctx),
                       ir.Second(self.assemble(args[1:]), ir.Leaf(args[0].type)))


def _escapes(d: Derivation) -> list[DEsc]:
    out = []

    def go(x):
        if isinstance(x, DEsc):
            out.append(x)
        for k in x.kids():
            go(k)
    go(d)
    return out


def flatten_derivation(d: Derivation, env: StageEnv) -> ir.GaTerm:
    """Combinator term of a bracket-body derivation, splices evaluated in ``env``."""
    sub = _Subst()
    splices: dict[int, ir.GaTerm] = {}
    for e in _escapes(d):
        v = stage_eval(e.term, env)
        if not isinstance(v, VCode):
            raise SpliceNotCode(f"splice produced {type(v).__name__}, not code", e.term.node.pos)
        m = _freshen(v.term)
        sub.unify(e.type, code_type(m))
        splices[id(e)] = m
    b = _Builder(splices, sub)
    t = b.build(d)
    if not (isinstance(d, DAbs) and d.absorbed):
        root = sub.resolve(d.type)
        if isinstance(root, ir.ExpT):
            inner = d.d if isinstance(d, DArrange) else d
            if isinstance(inner, DEsc):
                t = b.splice(inner, as_function=True)
            else:
                t = _fun_form(t, root)
    t = ir.map_types(t, sub.resolve)
    ir.ga_type_of(t)
    return t


# ---------------------------------------------------------------------------
# level-0 evaluation

class Stager:
    """Evaluates a typed program's level-0 code, building code values on demand."""

    def __init__(self, defs: list[TypedDef], steps: int = DEFAULT_STEPS):
        self.defs = {d.name: d for d in defs}
        self.globals: dict[str, Value] = {}
        self.pending: set[str] = set()
        self.steps = steps
        self.derivations: dict[int, Derivation] = {}

    def tick(self) -> None:
        self.steps -= 1
        if self.steps < 0:
            raise FuelExhausted("level-0 step budget exceeded")

    def global_value(self, name: str) -> Value:
        if name in self.globals:
            return self.globals[name]
        if name in self.pending:
            raise FuelExhausted(f"definition {name} depends on its own value")
        self.pending.add(name)
        try:
            v = stage_eval(self.defs[name].body, StageEnv({}, self))
        finally:
            self.pending.discard(name)
        self.globals[name] = v
        return v

    def derivation(self, brak: Typed) -> Derivation:
        d = self.derivations.get(id(brak))
        if d is None:
            d = elaborate(brak.kids[0])
            self.derivations[id(brak)] = d
        return d

    def apply(self, f: Value, *args: Value) -> Value:
        for a in args:
            if not isinstance(f, VFun):
                raise UserError("cannot apply a non-function value")
            f = f.fn(a)
        return f


def stage_eval(t: Typed, env: StageEnv) -> Value:
    st = env.stager
    if st is not None:
        st.tick()
    n = t.node
    if isinstance(n, Var):
        if t.global_ref and st is not None and n.name not in env.values:
            return st.global_value(n.name)
        if n.name in env.values:
            return env.values[n.name]
        if t.global_ref and st is not None:
            return st.global_value(n.name)
        raise InternalError(f"unbound level-0 variable {n.name}")
    if isinstance(n, Lit):
        return literal_value(n.lit)
    if isinstance(n, Note):
        return stage_eval(t.kids[0], env)
    if isinstance(n, Lam):
        body = t.kids[0]
        return VFun(lambda v, env=env: stage_eval(body, env.bind(n.name, v)), n.name)
    if isinstance(n, App):
        f = stage_eval(t.kids[0], env)
        a = stage_eval(t.kids[1], env)
        if not isinstance(f, VFun):
            raise InternalError("application of a non-function at level 0")
        return f.fn(a)
    if isinstance(n, Let):
        v = stage_eval(t.kids[0], env)
        return stage_eval(t.kids[1], env.bind(n.name, v))
    if isinstance(n, LetRec):
        inner = env.bind(n.name, UNIT)
        v = stage_eval(t.kids[0], inner)
        inner.values[n.name] = v
        return stage_eval(t.kids[1], inner)
    if isinstance(n, If):
        c = stage_eval(t.kids[0], env)
        return stage_eval(t.kids[1] if c == VBool(True) else t.kids[2], env)
    if isinstance(n, PrimOp):
        args = [stage_eval(k, env) for k in t.kids]
        return _prim0(n.name, args)
    if isinstance(n, Brak):
        if st is None:
            raise InternalError("staging needs a Stager")
        try:
            term = flatten_derivation(st.derivation(t), env)
        except GarrowError as e:
            if e.pos is None:
                e.pos = n.pos
            raise
        return VCode(ir.normalize(canonical_type_names(term)))
    if isinstance(n, Esc):
        raise InternalError("escape evaluated at level 0")
    raise TypeError(n)


def _prim0(name: str, args: list[Value]) -> Value:
    if name == "pair":
        return VPair(args[0], args[1])
    if name in ("fst", "snd"):
        p = args[0]
        return p.l if name == "fst" else p.r
    arg = args[0] if len(args) == 1 else VPair(args[0], args[1])
    return lookup(name).run(arg)


# ---------------------------------------------------------------------------
# driving a program

def stage_entry(defs: list[TypedDef], entry: str, args: list[Value],
                steps: int = DEFAULT_STEPS) -> Value:
    """Evaluate ``entry`` applied to ``args`` at level 0."""
    st = Stager(defs, steps)
    if entry not in st.defs:
        raise UserError(f"no definition named {entry}")
    return st.apply(st.global_value(entry), *args)


def parse_literal_arg(text: str) -> Value:
    """Level-0 command-line argument: an integer, true/false, () or a pair of those."""
    from .frontend.parser import parse_expr
    if re.fullmatch(r"\s*-\s*\d+\s*", text):
        return VInt(ir.LInt(int(text.replace(" ", ""))).value)
    e = parse_expr(text)
    return _const_value(e, text)


def _const_value(e, text: str) -> Value:
    if isinstance(e, Lit):
        return literal_value(e.lit)
    if isinstance(e, PrimOp) and e.name == "pair":
        return VPair(_const_value(e.args[0], text), _const_value(e.args[1], text))
    if isinstance(e, PrimOp) and e.name == "sub" and isinstance(e.args[0], Lit) \
            and e.args[0].lit == ir.LInt(0) and isinstance(e.args[1], Lit):
        inner = _const_value(e.args[1], text)
        if isinstance(inner, VInt):
            return VInt(-inner.i)
    raise UserError(f"not a literal value: {text}")
