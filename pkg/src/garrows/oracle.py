"""Reference two-level interpreter by substitution.

Deliberately shares nothing with the flattener: level-0 code is evaluated by
substituting values into surface terms, brackets become residual one-level
terms with splices pasted in, and residual terms are run by a one-level
call-by-value evaluator with a lazy conditional.
"""
from __future__ import annotations

from dataclasses import replace

from . import ir
from .errors import FuelExhausted, InternalError, Overflow, PrimUndefined
from .frontend.syntax import (App, Brak, Definition, Esc, If, Lam, Let, LetRec, Lit, Note,
                              PrimOp, SurfaceTerm, Var)
from .values import UNIT, VBool, VInt, VPair, VUnit, Value

_LO, _HI = -(2 ** 63), 2 ** 63 - 1


def subst(t: SurfaceTerm, x: str, v: SurfaceTerm) -> SurfaceTerm:
    """Replace free ``x`` by the closed term ``v``."""
    if isinstance(t, Var):
        return v if t.name == x else t
    if isinstance(t, Lit):
        return t
    if isinstance(t, Lam):
        return t if t.name == x else replace(t, body=subst(t.body, x, v))
    if isinstance(t, Let):
        body = t.body if t.name == x else subst(t.body, x, v)
        return replace(t, bound=subst(t.bound, x, v), body=body)
    if isinstance(t, LetRec):
        if t.name == x:
            return t
        return replace(t, bound=subst(t.bound, x, v), body=subst(t.body, x, v))
    if isinstance(t, App):
        return replace(t, f=subst(t.f, x, v), a=subst(t.a, x, v))
    if isinstance(t, If):
        return replace(t, c=subst(t.c, x, v), t=subst(t.t, x, v), e=subst(t.e, x, v))
    if isinstance(t, PrimOp):
        return replace(t, args=[subst(a, x, v) for a in t.args])
    if isinstance(t, (Brak, Esc, Note)):
        return replace(t, body=subst(t.body, x, v))
    raise TypeError(t)


class Oracle:
    def __init__(self, program: list[Definition] | None = None, steps: int = 2_000_000):
        self.defs = {d.name: d for d in program or []}
        self.steps = steps

    def tick(self):
        self.steps -= 1
        if self.steps < 0:
            raise FuelExhausted("oracle step budget exceeded")

    # -- evaluation ---------------------------------------------------------

    def eval(self, t: SurfaceTerm) -> SurfaceTerm:
        """Value of a closed term: a literal, lambda, pair of values or bracket."""
        self.tick()
        if isinstance(t, (Lit, Lam)):
            return t
        if isinstance(t, Var):
            if t.name in self.defs:
                return self.eval(self.defs[t.name].term())
            raise InternalError(f"free variable {t.name} in oracle")
        if isinstance(t, Note):
            return self.eval(t.body)
        if isinstance(t, App):
            f = self.eval(t.f)
            a = self.eval(t.a)
            if not isinstance(f, Lam):
                raise InternalError("oracle applied a non-function")
            return self.eval(subst(f.body, f.name, a))
        if isinstance(t, Let):
            return self.eval(subst(t.body, t.name, self.eval(t.bound)))
        if isinstance(t, LetRec):
            knot = LetRec(t.name, t.annot, t.bound, Var(t.name))
            v = self.eval(subst(t.bound, t.name, knot))
            return self.eval(subst(t.body, t.name, v))
        if isinstance(t, If):
            c = self.eval(t.c)
            return self.eval(t.t if c.lit == ir.LBool(True) else t.e)
        if isinstance(t, PrimOp):
            return self.prim(t.name, [self.eval(a) for a in t.args])
        if isinstance(t, Brak):
            return Brak(self.residual(t.body, 1))
        raise InternalError(f"cannot evaluate {type(t).__name__} at level 0")

    def residual(self, t: SurfaceTerm, depth: int) -> SurfaceTerm:
        if isinstance(t, Esc):
            if depth == 1:
                code = self.eval(t.body)
                if not isinstance(code, Brak):
                    raise InternalError("splice of a non-code value")
                return code.body
            return replace(t, body=self.residual(t.body, depth - 1))
        if isinstance(t, Brak):
            return replace(t, body=self.residual(t.body, depth + 1))
        if isinstance(t, (Var, Lit)):
            return t
        if isinstance(t, (Lam, Note)):
            return replace(t, body=self.residual(t.body, depth))
        if isinstance(t, (Let, LetRec)):
            return replace(t, bound=self.residual(t.bound, depth),
                           body=self.residual(t.body, depth))
        if isinstance(t, App):
            return replace(t, f=self.residual(t.f, depth), a=self.residual(t.a, depth))
        if isinstance(t, If):
            return replace(t, c=self.residual(t.c, depth), t=self.residual(t.t, depth),
                           e=self.residual(t.e, depth))
        if isinstance(t, PrimOp):
            return replace(t, args=[self.residual(a, depth) for a in t.args])
        raise TypeError(t)

    def prim(self, name: str, args: list[SurfaceTerm]) -> SurfaceTerm:
        if name == "pair":
            return PrimOp("pair", args)
        if name in ("fst", "snd"):
            p = args[0]
            return p.args[0] if name == "fst" else p.args[1]
        a, b = (x.lit.value for x in args)
        if name == "eq":
            return Lit(ir.LBool(a == b))
        ops = {"add": a + b, "sub": a - b, "mult": a * b}
        if name not in ops:
            raise PrimUndefined(name)
        r = ops[name]
        if not _LO <= r <= _HI:
            raise Overflow(f"{name} overflows 64 bits")
        return Lit(ir.LInt(r))

    # -- entry points -------------------------------------------------------

    def residual_of(self, entry: str, args: list[Value]) -> SurfaceTerm:
        """The one-level term a code-valued entry point produces."""
        t: SurfaceTerm = Var(entry)
        for a in args:
            t = App(t, value_term(a))
        v = self.eval(t)
        if not isinstance(v, Brak):
            raise InternalError(f"{entry} did not produce code")
        return v.body

    def apply(self, fn: SurfaceTerm, v: Value) -> Value:
        """Run a residual term on ``v``: applied if it is a function, else ``v`` is ignored."""
        f = self.eval(fn)
        if isinstance(f, Lam):
            return term_value(self.eval(App(f, value_term(v))))
        return term_value(f)


def value_term(v: Value) -> SurfaceTerm:
    if isinstance(v, VInt):
        return Lit(ir.LInt(v.i))
    if isinstance(v, VBool):
        return Lit(ir.LBool(v.b))
    if isinstance(v, VUnit):
        return Lit(ir.LUnit())
    if isinstance(v, VPair):
        return PrimOp("pair", [value_term(v.l), value_term(v.r)])
    raise InternalError(f"no surface form for {v!r}")


def term_value(t: SurfaceTerm) -> Value:
    if isinstance(t, Lit):
        lit = t.lit
        if isinstance(lit, ir.LInt):
            return VInt(lit.value)
        if isinstance(lit, ir.LBool):
            return VBool(lit.value)
        return UNIT
    if isinstance(t, PrimOp) and t.name == "pair":
        return VPair(term_value(t.args[0]), term_value(t.args[1]))
    raise InternalError(f"not a first-order value: {type(t).__name__}")


def eval_one_level(t: SurfaceTerm) -> SurfaceTerm:
    return Oracle().eval(t)
