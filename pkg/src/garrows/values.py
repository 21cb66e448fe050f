"""Runtime values shared by the evaluation backends and the staging evaluator."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from . import ir
from .errors import FuelExhausted


class Value:
    __slots__ = ()


@dataclass(frozen=True)
class VInt(Value):
    i: int


@dataclass(frozen=True)
class VBool(Value):
    b: bool


@dataclass(frozen=True)
class VUnit(Value):
    pass


@dataclass(frozen=True)
class VPair(Value):
    l: Value
    r: Value


@dataclass(frozen=True)
class VInl(Value):
    v: Value


@dataclass(frozen=True)
class VInr(Value):
    v: Value


@dataclass(frozen=True)
class VClos(Value):
    """Guest closure: ``code`` has shape ``<env, <x>> -> <y>``."""
    code: ir.GaTerm
    env: Value


@dataclass(frozen=True)
class VCode(Value):
    """Level-0 value of code type: a flattened combinator term."""
    term: ir.GaTerm


@dataclass(frozen=True, eq=False)
class VFun(Value):
    """Level-0 function value."""
    fn: Callable[[Value], Value]
    name: str = "<fun>"


@dataclass(eq=False)
class VFix(Value):
    """The fed-back wire of a running loop, unfolded on demand."""
    unfold: Callable[[], Value]
    value: Any = field(default=None)
    busy: bool = False


UNIT = VUnit()


def force(v: Value) -> Value:
    while isinstance(v, VFix):
        if v.value is not None:
            v = v.value
            continue
        if v.busy:
            # the fixpoint needs itself before it is produced: bottom
            raise FuelExhausted("loop feedback demanded before it was defined")
        v.busy = True
        try:
            v.value = v.unfold()
        finally:
            v.busy = False
        v = v.value
    return v


def force_all(v: Value) -> Value:
    """``v`` with no fixpoint cell left outside closures."""
    v = force(v)
    cls = v.__class__
    if cls is VPair:
        l, r = force_all(v.l), force_all(v.r)
        return v if l is v.l and r is v.r else VPair(l, r)
    if cls is VInl or cls is VInr:
        inner = force_all(v.v)
        return v if inner is v.v else cls(inner)
    return v


def literal_value(lit: ir.Literal) -> Value:
    if isinstance(lit, ir.LInt):
        return VInt(lit.value)
    if isinstance(lit, ir.LBool):
        return VBool(lit.value)
    return UNIT


# ---------------------------------------------------------------------------
# shape membership

def conforms_type(v: Value, t: ir.GuestType) -> bool:
    v = force(v)
    if isinstance(t, ir.TyVarT):
        return True
    if isinstance(t, ir.IntT):
        return isinstance(v, VInt)
    if isinstance(t, ir.BoolT):
        return isinstance(v, VBool)
    if isinstance(t, ir.UnitT):
        return isinstance(v, VUnit)
    if isinstance(t, ir.ProdT):
        return isinstance(v, VPair) and conforms_type(v.l, t.l) and conforms_type(v.r, t.r)
    if isinstance(t, ir.SumT):
        return (isinstance(v, VInl) and conforms_type(v.v, t.l)
                or isinstance(v, VInr) and conforms_type(v.v, t.r))
    if isinstance(t, ir.ExpT):
        if not isinstance(v, VClos):
            return False
        d, c = ir.ga_type_of(v.code)
        return (isinstance(d, ir.Branch) and d.r == ir.Leaf(t.dom)
                and c == ir.Leaf(t.cod) and conforms(v.env, d.l))
    return False


def conforms(v: Value, s: ir.ShapeTree) -> bool:
    """Membership in values_of_shape(s)."""
    v = force(v)
    if isinstance(s, ir.Empty):
        return isinstance(v, VUnit)
    if isinstance(s, ir.Leaf):
        return conforms_type(v, s.t)
    return isinstance(v, VPair) and conforms(v.l, s.l) and conforms(v.r, s.r)


# ---------------------------------------------------------------------------
# generation

def constant_term(t: ir.GuestType, rng: random.Random) -> ir.GaTerm:
    """A closed morphism ``<> -> <t>`` producing some fixed value of ``t``."""
    if isinstance(t, ir.IntT):
        return ir.Constant(ir.LInt(rng.randint(-50, 50)), t)
    if isinstance(t, ir.BoolT):
        return ir.Constant(ir.LBool(rng.random() < 0.5), t)
    if isinstance(t, ir.UnitT):
        return ir.Constant(ir.LUnit(), t)
    if isinstance(t, ir.ExpT):
        ctx = ir.Branch(ir.EMPTY, ir.Leaf(t.dom))
        return ir.CurryR(ir.Comp(ir.Drop(ctx), constant_term(t.cod, rng)))
    if isinstance(t, ir.ProdT):
        both = ir.Branch(ir.Leaf(t.l), ir.Leaf(t.r))
        return ir.compose(
            ir.Copy(ir.EMPTY),
            ir.First(constant_term(t.l, rng), ir.EMPTY),
            ir.Second(constant_term(t.r, rng), ir.Leaf(t.l)),
            ir.Prim("pair", both, ir.Leaf(t)))
    if isinstance(t, ir.SumT):
        return ir.Comp(constant_term(t.l, rng), ir.InjL(t.l, t.r))
    raise ValueError(f"cannot build values of {t}")


def gen_closure(t: ir.ExpT, rng: random.Random) -> VClos:
    """Identity or constant closure bodies only."""
    ctx = ir.Branch(ir.EMPTY, ir.Leaf(t.dom))
    if t.dom == t.cod and rng.random() < 0.5:
        return VClos(ir.CancelL(ir.Leaf(t.dom)), UNIT)
    return VClos(ir.Comp(ir.Drop(ctx), constant_term(t.cod, rng)), UNIT)


def gen_type_value(t: ir.GuestType, rng: random.Random) -> Value:
    if isinstance(t, ir.IntT):
        return VInt(rng.randint(-50, 50))
    if isinstance(t, ir.BoolT):
        return VBool(rng.random() < 0.5)
    if isinstance(t, ir.UnitT):
        return UNIT
    if isinstance(t, ir.ProdT):
        return VPair(gen_type_value(t.l, rng), gen_type_value(t.r, rng))
    if isinstance(t, ir.SumT):
        if rng.random() < 0.5:
            return VInl(gen_type_value(t.l, rng))
        return VInr(gen_type_value(t.r, rng))
    if isinstance(t, ir.ExpT):
        return gen_closure(t, rng)
    raise ValueError(f"cannot generate values of {t}")


def gen_value(s: ir.ShapeTree, rng: random.Random) -> Value:
    if isinstance(s, ir.Empty):
        return UNIT
    if isinstance(s, ir.Leaf):
        return gen_type_value(s.t, rng)
    return VPair(gen_value(s.l, rng), gen_value(s.r, rng))


# ---------------------------------------------------------------------------
# printing

def format_value(v: Value) -> str:
    v = force(v)
    if isinstance(v, VInt):
        return str(v.i)
    if isinstance(v, VBool):
        return "true" if v.b else "false"
    if isinstance(v, VUnit):
        return "()"
    if isinstance(v, VPair):
        return f"({format_value(v.l)}, {format_value(v.r)})"
    if isinstance(v, VInl):
        return f"inl {format_value(v.v)}"
    if isinstance(v, VInr):
        return f"inr {format_value(v.v)}"
    if isinstance(v, VClos):
        return "<closure>"
    if isinstance(v, VCode):
        from .irtext import render_ir
        return render_ir(v.term)
    if isinstance(v, VFun):
        return "<function>"
    return repr(v)
