"""Reference evaluation backend: combinators as functions on host values.

Tensor is the cartesian pair, unit is ``VUnit``.  ``LoopR`` feeds its right
wire back as a :class:`~garrows.values.VFix` that re-runs the body on demand;
each unfolding costs one unit of fuel.

Subterms built only from wiring combinators (associators, unitors, swap,
copy, drop and their compositions) are fused at compile time: they are run
once on a symbolic input and the resulting template rebuilds the output
directly from projections of the real input.
"""
from __future__ import annotations

import sys
from functools import lru_cache
from operator import attrgetter
from typing import Callable

from .. import ir
from ..errors import FuelExhausted, ShapeMismatch, Unreachable
from ..prims import lookup
from ..values import (UNIT, VClos, VInl, VInr, VFix, VPair, VUnit, Value, conforms,
                      force, force_all, literal_value)

DEFAULT_FUEL = 10_000

Fn = Callable[[Value], Value]


class Machine:
    """Per-run state: remaining loop fuel and a cache of compiled closure bodies."""

    def __init__(self, fuel: int = DEFAULT_FUEL):
        self.fuel = fuel
        self._compiled: dict[int, tuple[ir.GaTerm, Fn]] = {}

    def spend(self) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("loop iteration bound exceeded")

    def compiled(self, t: ir.GaTerm) -> Fn:
        hit = self._compiled.get(id(t))
        if hit is None or hit[0] is not t:
            hit = (t, self.compile(t))
            self._compiled[id(t)] = hit
        return hit[1]

    def apply_closure(self, clos: Value, arg: Value) -> Value:
        clos = force(clos)
        if not isinstance(clos, VClos):
            raise ShapeMismatch(f"expected a closure, got {clos!r}")
        return self.compiled(clos.code)(VPair(clos.env, arg))

    def compile(self, t: ir.GaTerm) -> Fn:
        if isinstance(t, _FUSABLE) and is_wiring(t):
            return _template_fn(_template(t))
        if isinstance(t, ir.Id):
            return lambda v: v
        if isinstance(t, ir.Comp):
            f, g = self.compile(t.f), self.compile(t.g)
            return lambda v: g(f(v))
        if isinstance(t, ir.First):
            f = self.compile(t.f)

            def first(v):
                p = _pair(v)
                return VPair(f(p.l), p.r)
            return first
        if isinstance(t, ir.Second):
            f = self.compile(t.f)

            def second(v):
                p = _pair(v)
                return VPair(p.l, f(p.r))
            return second
        if isinstance(t, ir.CancelL):
            return lambda v: _pair(v).r
        if isinstance(t, ir.CancelR):
            return lambda v: _pair(v).l
        if isinstance(t, ir.UncancelL):
            return lambda v: VPair(UNIT, v)
        if isinstance(t, ir.UncancelR):
            return lambda v: VPair(v, UNIT)
        if isinstance(t, ir.Assoc):
            def assoc(v):
                p = _pair(v)
                q = _pair(p.l)
                return VPair(q.l, VPair(q.r, p.r))
            return assoc
        if isinstance(t, ir.Unassoc):
            def unassoc(v):
                p = _pair(v)
                q = _pair(p.r)
                return VPair(VPair(p.l, q.l), q.r)
            return unassoc
        if isinstance(t, ir.Copy):
            return lambda v: VPair(v, v)
        if isinstance(t, ir.Drop):
            return lambda v: UNIT
        if isinstance(t, ir.Swap):
            def swap(v):
                p = _pair(v)
                return VPair(p.r, p.l)
            return swap
        if isinstance(t, ir.Constant):
            value = literal_value(t.lit)

            def constant(v):
                if not isinstance(force(v), VUnit):
                    raise ShapeMismatch(f"constant expects (), got {v!r}")
                return value
            return constant
        if isinstance(t, ir.Prim):
            return lookup(t.name).run
        if isinstance(t, ir.CurryR):
            body = t.f
            return lambda v: VClos(body, v)
        if isinstance(t, ir.ApplyR):
            def apply(v):
                p = _pair(v)
                return self.apply_closure(p.r, p.l)
            return apply
        if isinstance(t, ir.LoopR):
            return self._loop(self.compile(t.f))
        if isinstance(t, ir.Merge):
            def merge(v):
                v = force(v)
                if isinstance(v, (VInl, VInr)):
                    return v.v
                raise ShapeMismatch(f"merge expects a sum value, got {v!r}")
            return merge
        if isinstance(t, ir.Never):
            def never(v):
                raise Unreachable("never was evaluated")
            return never
        if isinstance(t, ir.InjL):
            return VInl
        if isinstance(t, ir.InjR):
            return VInr
        raise TypeError(f"not a GaTerm: {t!r}")

    def _loop(self, body: Fn) -> Fn:
        def loop(a):
            def unfold():
                self.spend()
                return _pair(body(VPair(a, fix))).r
            fix = VFix(unfold)
            return _pair(body(VPair(a, fix))).l
        return loop


# ---------------------------------------------------------------------------
# wiring fusion

_WIRING = (ir.Id, ir.CancelL, ir.CancelR, ir.UncancelL, ir.UncancelR, ir.Assoc,
           ir.Unassoc, ir.Copy, ir.Drop, ir.Swap)
_FUSABLE = (ir.Comp, ir.First, ir.Second)


class _In:
    """Symbolic input: the projection of the real input along a dotted
    ``path`` such as ``"l.r"`` (the empty path is the input itself)."""
    __slots__ = ("path",)

    def __init__(self, path: str):
        self.path = path


def _proj(s, side: str):
    if s.__class__ is tuple:
        return s[side == "r"]
    if s.__class__ is _In:
        return _In(f"{s.path}.{side}" if s.path else side)
    raise ShapeMismatch("wiring projects out of a unit")


def is_wiring(t: ir.GaTerm) -> bool:
    hit = t.__dict__.get("_is_wiring")
    if hit is None:
        if isinstance(t, ir.Comp):
            hit = is_wiring(t.f) and is_wiring(t.g)
        elif isinstance(t, (ir.First, ir.Second)):
            hit = is_wiring(t.f)
        else:
            hit = isinstance(t, _WIRING)
        object.__setattr__(t, "_is_wiring", hit)
    return hit


def _substitute(tpl, s):
    """Plug the symbolic value ``s`` in for the input of ``tpl``."""
    cls = tpl.__class__
    if cls is tuple:
        return (_substitute(tpl[0], s), _substitute(tpl[1], s))
    if cls is _In:
        path = tpl.path
        while path:
            if s.__class__ is tuple:
                head, _, path = path.partition(".")
                s = s[head == "r"]
            elif s.__class__ is _In:
                return _In(f"{s.path}.{path}" if s.path else path)
            else:
                raise ShapeMismatch("wiring projects out of a unit")
        return s
    return tpl


def _template(t: ir.GaTerm):
    """Output of a wiring term as a tree of input projections (tuples are pairs)."""
    hit = t.__dict__.get("_template")
    if hit is None:
        hit = _build_template(t)
        object.__setattr__(t, "_template", hit)
    return hit


def _build_template(t: ir.GaTerm):
    s = _In("")
    if isinstance(t, ir.Comp):
        return _substitute(_template(t.g), _template(t.f))
    if isinstance(t, ir.First):
        return (_substitute(_template(t.f), _In("l")), _In("r"))
    if isinstance(t, ir.Second):
        return (_In("l"), _substitute(_template(t.f), _In("r")))
    if isinstance(t, ir.Id):
        return s
    if isinstance(t, ir.CancelL):
        return _In("r")
    if isinstance(t, ir.CancelR):
        return _In("l")
    if isinstance(t, ir.UncancelL):
        return (UNIT, s)
    if isinstance(t, ir.UncancelR):
        return (s, UNIT)
    if isinstance(t, ir.Assoc):
        return (_In("l.l"), (_In("l.r"), _In("r")))
    if isinstance(t, ir.Unassoc):
        return ((_In("l"), _In("r.l")), _In("r.r"))
    if isinstance(t, ir.Copy):
        return (s, s)
    if isinstance(t, ir.Drop):
        return UNIT
    if isinstance(t, ir.Swap):
        return (_In("r"), _In("l"))
    raise TypeError(f"not a wiring term: {t!r}")


def _template_fn(tpl) -> Fn:
    """Fast path: one C-level multi-projection, then a cached builder for the
    output skeleton.  Lazy or ill-shaped inputs fall back to projections that
    force each pair on the way down."""
    paths: list[str] = []
    skeleton = _skeleton(tpl, paths)
    if not paths or "" in paths:
        return _careful_fn(tpl)
    get = attrgetter(*paths)
    build = _builder(skeleton, len(paths))
    careful: list[Fn] = []
    single = len(paths) == 1

    def wiring(v):
        try:
            parts = get(v)
        except AttributeError:
            if not careful:
                careful.append(_careful_fn(tpl))
            return careful[0](v)
        return build(parts) if single else build(*parts)
    return wiring


def _skeleton(tpl, paths: list) -> str:
    if tpl.__class__ is tuple:
        return f"VPair({_skeleton(tpl[0], paths)}, {_skeleton(tpl[1], paths)})"
    if tpl.__class__ is _In:
        paths.append(tpl.path)
        return f"a{len(paths) - 1}"
    return "UNIT"


@lru_cache(maxsize=4096)
def _builder(skeleton: str, arity: int) -> Callable:
    scope = {"VPair": VPair, "UNIT": UNIT}
    args = ", ".join(f"a{k}" for k in range(arity))
    exec(f"def build({args}):\n    return {skeleton}\n", scope)
    return scope["build"]


def _careful_fn(tpl) -> Fn:
    if isinstance(tpl, tuple):
        left, right = _careful_fn(tpl[0]), _careful_fn(tpl[1])
        return lambda v: VPair(left(v), right(v))
    if isinstance(tpl, _In):
        sides = [side == "r" for side in tpl.path.split(".")] if tpl.path else []

        def project(v):
            for right in sides:
                p = _pair(v)
                v = p.r if right else p.l
            return v
        return project
    return lambda v: UNIT


def _pair(v: Value) -> VPair:
    if v.__class__ is VPair:
        return v
    v = force(v)
    if not isinstance(v, VPair):
        raise ShapeMismatch(f"expected a pair, got {v!r}")
    return v


def compile_term(t: ir.GaTerm, fuel: int = DEFAULT_FUEL) -> Fn:
    """Compile once, apply many times; each application gets fresh fuel."""
    ir.ga_type_of(t)
    m = Machine(fuel)
    fn = m.compile(t)
    if is_wiring(t):
        return fn  # fused wiring neither loops nor recurses
    _deep_stack()

    def run(v: Value) -> Value:
        m.fuel = fuel
        try:
            return force_all(fn(v))
        except RecursionError:
            raise FuelExhausted("evaluation nested too deeply") from None
    return run


def _deep_stack() -> None:
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)


def _guarded(fn: Fn, v: Value) -> Value:
    _deep_stack()
    try:
        return fn(v)
    except RecursionError:
        raise FuelExhausted("evaluation nested too deeply") from None


def eval_interpret(t: ir.GaTerm, value: Value, fuel: int = DEFAULT_FUEL) -> Value:
    d, _ = ir.ga_type_of(t)
    if not conforms(value, d):
        raise ShapeMismatch(f"input does not inhabit {d}")
    fn = Machine(fuel).compile(t)
    return _guarded(lambda v: force_all(fn(v)), value)


def apply_closure(clos: Value, arg: Value, fuel: int = DEFAULT_FUEL) -> Value:
    return _guarded(lambda a: Machine(fuel).apply_closure(clos, a), arg)
