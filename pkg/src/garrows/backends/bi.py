"""Invertible backend: each term denotes a forward/backward pair.

The forward direction is the evaluation backend itself.  The backward direction
is assembled structurally; nodes without an inverse get a backward function
that raises :class:`NonInvertible` only when it is actually applied.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .. import ir
from ..errors import NonInvertible, ShapeMismatch
from ..irtext import render_ir
from ..prims import PRIMS
from ..values import UNIT, VPair, Value, force
from .evaluate import DEFAULT_FUEL, compile_term

Fn = Callable[[Value], Value]


@dataclass(frozen=True)
class BiMorphism:
    fwd: Fn
    bwd: Fn


def bi_inv(m: BiMorphism) -> BiMorphism:
    return BiMorphism(m.bwd, m.fwd)


def _pair(v: Value) -> VPair:
    v = force(v)
    if not isinstance(v, VPair):
        raise ShapeMismatch(f"expected a pair, got {v!r}")
    return v


def _missing(t: ir.GaTerm) -> Fn:
    label = render_ir(t)

    def bwd(v):
        raise NonInvertible(f"{label} has no inverse")
    return bwd


def _copy_bwd(v: Value) -> Value:
    p = _pair(v)
    if force(p.l) != force(p.r):
        raise NonInvertible("copy: components differ")
    return p.l


def _backward(t: ir.GaTerm) -> Fn:
    if isinstance(t, ir.Id):
        return lambda v: v
    if isinstance(t, ir.Comp):
        bf, bg = _backward(t.f), _backward(t.g)
        return lambda v: bf(bg(v))
    if isinstance(t, ir.First):
        b = _backward(t.f)

        def first(v):
            p = _pair(v)
            return VPair(b(p.l), p.r)
        return first
    if isinstance(t, ir.Second):
        b = _backward(t.f)

        def second(v):
            p = _pair(v)
            return VPair(p.l, b(p.r))
        return second
    if isinstance(t, ir.CancelL):
        return lambda v: VPair(UNIT, v)
    if isinstance(t, ir.CancelR):
        return lambda v: VPair(v, UNIT)
    if isinstance(t, ir.UncancelL):
        return lambda v: _pair(v).r
    if isinstance(t, ir.UncancelR):
        return lambda v: _pair(v).l
    if isinstance(t, ir.Assoc):
        def unassoc(v):
            p = _pair(v)
            q = _pair(p.r)
            return VPair(VPair(p.l, q.l), q.r)
        return unassoc
    if isinstance(t, ir.Unassoc):
        def assoc(v):
            p = _pair(v)
            q = _pair(p.l)
            return VPair(q.l, VPair(q.r, p.r))
        return assoc
    if isinstance(t, ir.Swap):
        def swap(v):
            p = _pair(v)
            return VPair(p.r, p.l)
        return swap
    if isinstance(t, ir.Copy):
        return _copy_bwd
    if isinstance(t, ir.Prim):
        spec = PRIMS.get(t.name)
        if spec is not None and spec.inverse is not None:
            return PRIMS[spec.inverse].run
    return _missing(t)


def bi_interpret(t: ir.GaTerm, fuel: int = DEFAULT_FUEL) -> BiMorphism:
    return BiMorphism(compile_term(t, fuel), _backward(t))


def is_invertible(t: ir.GaTerm) -> bool:
    """Whether every node of ``t`` has a registered backward direction."""
    if isinstance(t, (ir.Comp, ir.First, ir.Second)):
        return all(is_invertible(c) for c in ir.children(t))
    if isinstance(t, ir.Prim):
        spec = PRIMS.get(t.name)
        return spec is not None and spec.inverse is not None
    return isinstance(t, (ir.Id, ir.CancelL, ir.CancelR, ir.UncancelL, ir.UncancelR,
                          ir.Assoc, ir.Unassoc, ir.Swap, ir.Copy))
