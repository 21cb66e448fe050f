"""Residual backend: each combinator prints as a closed one-level lambda term.

Tensors become pairs and are taken apart with ``fst``/``snd`` rather than
pattern lambdas, so the output stays inside the surface grammar.
"""
from __future__ import annotations

from .. import ir
from ..errors import Unresidualizable

_STRUCT = {
    ir.Id: r"\x -> x",
    ir.CancelL: r"\p -> snd p",
    ir.CancelR: r"\p -> fst p",
    ir.UncancelL: r"\x -> ((), x)",
    ir.UncancelR: r"\x -> (x, ())",
    ir.Assoc: r"\p -> (fst (fst p), (snd (fst p), snd p))",
    ir.Unassoc: r"\p -> ((fst p, fst (snd p)), snd (snd p))",
    ir.Copy: r"\x -> (x, x)",
    ir.Drop: r"\y -> ()",
    ir.Swap: r"\p -> (snd p, fst p)",
    ir.ApplyR: r"\p -> (snd p) (fst p)",
}

_PRIMS = {
    "mult": r"\p -> (fst p * snd p)",
    "add": r"\p -> (fst p + snd p)",
    "sub": r"\p -> (fst p - snd p)",
    "eq": r"\p -> (fst p == snd p)",
    "ite": r"\p -> if fst p then fst (snd p) else snd (snd p)",
    "succ": r"\x -> (x + 1)",
    "pred": r"\x -> (x - 1)",
    "neg": r"\x -> (0 - x)",
    "not": r"\x -> if x then false else true",
    "pair": r"\p -> p",
    "fst": r"\p -> fst p",
    "snd": r"\p -> snd p",
}


def surface_literal(lit: ir.Literal) -> str:
    if isinstance(lit, ir.LInt) and lit.value < 0:
        return f"(0 - {-lit.value})"
    return str(lit)


def surface_type(t: ir.GuestType) -> str:
    if isinstance(t, ir.IntT):
        return "Int"
    if isinstance(t, ir.BoolT):
        return "Bool"
    if isinstance(t, ir.UnitT):
        return "()"
    if isinstance(t, ir.ExpT):
        return f"({surface_type(t.dom)} -> {surface_type(t.cod)})"
    if isinstance(t, ir.ProdT):
        return f"({surface_type(t.l)}, {surface_type(t.r)})"
    raise Unresidualizable(f"type {t} has no surface syntax")


def residualize(t: ir.GaTerm) -> str:
    ir.ga_type_of(t)
    return _res(t)


def _res(t: ir.GaTerm) -> str:
    text = _STRUCT.get(type(t))
    if text is not None:
        return text
    if isinstance(t, ir.Comp):
        return rf"\x -> ({_res(t.g)}) (({_res(t.f)}) x)"
    if isinstance(t, ir.First):
        return rf"\p -> (({_res(t.f)}) (fst p), snd p)"
    if isinstance(t, ir.Second):
        return rf"\p -> (fst p, ({_res(t.f)}) (snd p))"
    if isinstance(t, ir.Constant):
        return rf"\u -> {surface_literal(t.lit)}"
    if isinstance(t, ir.Prim):
        if t.name not in _PRIMS:
            raise Unresidualizable(f"primitive {t.name} has no residual form")
        return _PRIMS[t.name]
    if isinstance(t, ir.CurryR):
        return rf"\a -> \x -> ({_res(t.f)}) (a, x)"
    if isinstance(t, ir.LoopR):
        if not (isinstance(t.z, ir.Leaf) and isinstance(t.z.t, ir.ExpT)):
            raise Unresidualizable(f"loopr over non-function wire {t.z}")
        f = _res(t.f)
        ty = surface_type(t.z.t)
        return (rf"\a -> letrec k : {ty} = \v -> (snd (({f}) (a, k))) v "
                rf"in fst (({f}) (a, k))")
    if isinstance(t, ir.SUM_NODES):
        raise Unresidualizable(f"{type(t).__name__} has no residual form")
    raise TypeError(f"not a GaTerm: {t!r}")
