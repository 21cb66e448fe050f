"""Builtin guest primitives: signatures, evaluation and registered inverses."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import ir
from .errors import IllTyped, Overflow, PrimUndefined, ShapeMismatch
from .values import VBool, VInt, VPair, Value, force

INT2 = ir.Branch(ir.Leaf(ir.INT), ir.Leaf(ir.INT))


def checked(n: int) -> VInt:
    if not ir.INT64_MIN <= n <= ir.INT64_MAX:
        raise Overflow(f"64-bit overflow: {n}")
    return VInt(n)


def _ints(v: Value) -> tuple[int, int]:
    v = force(v)
    if isinstance(v, VPair):
        a, b = force(v.l), force(v.r)
        if isinstance(a, VInt) and isinstance(b, VInt):
            return a.i, b.i
    raise ShapeMismatch(f"expected a pair of integers, got {v!r}")


def _int(v: Value) -> int:
    v = force(v)
    if not isinstance(v, VInt):
        raise ShapeMismatch(f"expected an integer, got {v!r}")
    return v.i


def _bool(v: Value) -> bool:
    v = force(v)
    if not isinstance(v, VBool):
        raise ShapeMismatch(f"expected a boolean, got {v!r}")
    return v.b


def _pair(v: Value) -> VPair:
    v = force(v)
    if not isinstance(v, VPair):
        raise ShapeMismatch(f"expected a pair, got {v!r}")
    return v


def _ite(v: Value) -> Value:
    p = _pair(v)
    branches = _pair(p.r)
    return branches.l if _bool(p.l) else branches.r


def _fixed(out: ir.ShapeTree):
    return lambda ins: out


def _ite_sig(ins: ir.ShapeTree) -> ir.ShapeTree:
    if (isinstance(ins, ir.Branch) and ins.l == ir.Leaf(ir.BOOL)
            and isinstance(ins.r, ir.Branch) and ins.r.l == ins.r.r):
        return ins.r.l
    raise IllTyped("prim ite", "<<Bool>, <t, t>>", ins)


def _pair_sig(ins: ir.ShapeTree) -> ir.ShapeTree:
    if isinstance(ins, ir.Branch) and isinstance(ins.l, ir.Leaf) and isinstance(ins.r, ir.Leaf):
        return ir.Leaf(ir.ProdT(ins.l.t, ins.r.t))
    raise IllTyped("prim pair", "<<a>, <b>>", ins)


def _proj_sig(side: str):
    def sig(ins: ir.ShapeTree) -> ir.ShapeTree:
        if isinstance(ins, ir.Leaf) and isinstance(ins.t, ir.ProdT):
            return ir.Leaf(getattr(ins.t, side))
        raise IllTyped(f"prim {'fst' if side == 'l' else 'snd'}", "<(a * b)>", ins)
    return sig


@dataclass(frozen=True)
class PrimInfo:
    name: str
    signature: Callable[[ir.ShapeTree], ir.ShapeTree]
    run: Callable[[Value], Value]
    inverse: str | None = None


PRIMS: dict[str, PrimInfo] = {p.name: p for p in [
    PrimInfo("mult", _fixed(ir.Leaf(ir.INT)), lambda v: checked(_ints(v)[0] * _ints(v)[1])),
    PrimInfo("add", _fixed(ir.Leaf(ir.INT)), lambda v: checked(sum(_ints(v)))),
    PrimInfo("sub", _fixed(ir.Leaf(ir.INT)), lambda v: checked(_ints(v)[0] - _ints(v)[1])),
    PrimInfo("eq", _fixed(ir.Leaf(ir.BOOL)), lambda v: VBool(_ints(v)[0] == _ints(v)[1])),
    PrimInfo("ite", _ite_sig, _ite),
    PrimInfo("succ", _fixed(ir.Leaf(ir.INT)), lambda v: checked(_int(v) + 1), inverse="pred"),
    PrimInfo("pred", _fixed(ir.Leaf(ir.INT)), lambda v: checked(_int(v) - 1), inverse="succ"),
    PrimInfo("neg", _fixed(ir.Leaf(ir.INT)), lambda v: checked(-_int(v)), inverse="neg"),
    PrimInfo("not", _fixed(ir.Leaf(ir.BOOL)), lambda v: VBool(not _bool(v)), inverse="not"),
    PrimInfo("pair", _pair_sig, lambda v: _pair(v)),
    PrimInfo("fst", _proj_sig("l"), lambda v: _pair(v).l),
    PrimInfo("snd", _proj_sig("r"), lambda v: _pair(v).r),
]}

# surface operator -> primitive
BINOPS = {"*": "mult", "+": "add", "-": "sub", "==": "eq"}


def lookup(name: str) -> PrimInfo:
    try:
        return PRIMS[name]
    except KeyError:
        raise PrimUndefined(f"no primitive named {name!r}") from None


def prim_term(name: str, ins: ir.ShapeTree) -> ir.Prim:
    return ir.Prim(name, ins, lookup(name).signature(ins))
