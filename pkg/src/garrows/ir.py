"""Shape trees, guest types and the generalized-arrow combinator IR.

Every node carries the shapes it needs, so :func:`ga_type_of` is a plain fold
with no inference.  ``Comp(f, g)`` is diagrammatic: ``f`` runs first.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import IllTyped, Overflow

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


# ---------------------------------------------------------------------------
# guest types

class GuestType:
    __slots__ = ()


@dataclass(frozen=True)
class IntT(GuestType):
    def __str__(self):
        return "Int"

    def __hash__(self):  # fieldless types would otherwise all hash alike
        return hash("Int")


@dataclass(frozen=True)
class BoolT(GuestType):
    def __str__(self):
        return "Bool"

    def __hash__(self):  # fieldless types would otherwise all hash alike
        return hash("Bool")


@dataclass(frozen=True)
class UnitT(GuestType):
    def __str__(self):
        return "Unit"

    def __hash__(self):  # fieldless types would otherwise all hash alike
        return hash("Unit")


@dataclass(frozen=True)
class ExpT(GuestType):
    dom: GuestType
    cod: GuestType

    def __str__(self):
        return f"({self.dom} -> {self.cod})"


@dataclass(frozen=True)
class SumT(GuestType):
    l: GuestType
    r: GuestType

    def __str__(self):
        return f"({self.l} + {self.r})"


@dataclass(frozen=True)
class ProdT(GuestType):
    l: GuestType
    r: GuestType

    def __str__(self):
        return f"({self.l} * {self.r})"


@dataclass(frozen=True)
class TyVarT(GuestType):
    """Placeholder for a guest type left open by polymorphic guest code."""
    name: str

    def __str__(self):
        return f"'{self.name}"


INT, BOOL, UNIT = IntT(), BoolT(), UnitT()


def type_vars(t: GuestType) -> set[str]:
    if isinstance(t, TyVarT):
        return {t.name}
    if isinstance(t, (ExpT,)):
        return type_vars(t.dom) | type_vars(t.cod)
    if isinstance(t, (SumT, ProdT)):
        return type_vars(t.l) | type_vars(t.r)
    return set()


def subst_type(t: GuestType, sub: dict[str, GuestType]) -> GuestType:
    if not sub:
        return t
    if isinstance(t, TyVarT):
        if t.name in sub:
            return subst_type(sub[t.name], sub)
        return t
    if isinstance(t, ExpT):
        return ExpT(subst_type(t.dom, sub), subst_type(t.cod, sub))
    if isinstance(t, SumT):
        return SumT(subst_type(t.l, sub), subst_type(t.r, sub))
    if isinstance(t, ProdT):
        return ProdT(subst_type(t.l, sub), subst_type(t.r, sub))
    return t


# ---------------------------------------------------------------------------
# shape trees

class ShapeTree:
    __slots__ = ()


@dataclass(frozen=True)
class Empty(ShapeTree):
    def __str__(self):
        return "<>"


@dataclass(frozen=True)
class Leaf(ShapeTree):
    t: GuestType

    def __str__(self):
        return f"<{self.t}>"


@dataclass(frozen=True)
class Branch(ShapeTree):
    l: ShapeTree
    r: ShapeTree

    def __str__(self):
        return f"<{self.l}, {self.r}>"


EMPTY = Empty()


def memo(obj, key: str, compute):
    """Cache ``compute()`` on an immutable node; the cache is not a field."""
    d = obj.__dict__
    hit = d.get(key)
    if hit is None:
        hit = compute()
        object.__setattr__(obj, key, hit)
    return hit


def leaves(s: ShapeTree) -> list[GuestType]:
    return list(memo(s, "_leaves", lambda: tuple(_leaves(s))))


def _leaves(s: ShapeTree) -> list[GuestType]:
    out: list[GuestType] = []
    stack = [s]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node.t)
        elif isinstance(node, Branch):
            stack.append(node.r)
            stack.append(node.l)
    return out


def shape_key(s: ShapeTree) -> str:
    """Cached printed form; printing is injective on shapes, so equal keys
    mean equal shapes."""
    return memo(s, "_key", lambda: str(s))


def shape_size(s: ShapeTree) -> int:
    return len(leaves(s))


def map_shape(s: ShapeTree, fn) -> ShapeTree:
    if isinstance(s, Leaf):
        return Leaf(fn(s.t))
    if isinstance(s, Branch):
        return Branch(map_shape(s.l, fn), map_shape(s.r, fn))
    return s


def rnest(shapes: list[ShapeTree]) -> ShapeTree:
    """Right-nested tensor of ``shapes``; a single element is returned as is."""
    if not shapes:
        return EMPTY
    out = shapes[-1]
    for s in reversed(shapes[:-1]):
        out = Branch(s, out)
    return out


# ---------------------------------------------------------------------------
# literals

class Literal:
    __slots__ = ()


@dataclass(frozen=True)
class LInt(Literal):
    value: int

    def __post_init__(self):
        if not INT64_MIN <= self.value <= INT64_MAX:
            raise Overflow(f"integer literal {self.value} outside 64-bit range")

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class LBool(Literal):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class LUnit(Literal):
    def __str__(self):
        return "()"


def literal_type(lit: Literal) -> GuestType:
    if isinstance(lit, LInt):
        return INT
    if isinstance(lit, LBool):
        return BOOL
    return UNIT


# ---------------------------------------------------------------------------
# combinator terms

class GaTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Id(GaTerm):
    s: ShapeTree


@dataclass(frozen=True)
class Comp(GaTerm):
    f: GaTerm
    g: GaTerm


@dataclass(frozen=True)
class First(GaTerm):
    f: GaTerm
    z: ShapeTree


@dataclass(frozen=True)
class Second(GaTerm):
    f: GaTerm
    z: ShapeTree


@dataclass(frozen=True)
class CancelL(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class CancelR(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class UncancelL(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class UncancelR(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class Assoc(GaTerm):
    x: ShapeTree
    y: ShapeTree
    z: ShapeTree


@dataclass(frozen=True)
class Unassoc(GaTerm):
    x: ShapeTree
    y: ShapeTree
    z: ShapeTree


@dataclass(frozen=True)
class Copy(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class Drop(GaTerm):
    x: ShapeTree


@dataclass(frozen=True)
class Swap(GaTerm):
    x: ShapeTree
    y: ShapeTree


@dataclass(frozen=True)
class Constant(GaTerm):
    lit: Literal
    t: GuestType


@dataclass(frozen=True)
class Prim(GaTerm):
    name: str
    ins: ShapeTree
    out: ShapeTree


@dataclass(frozen=True)
class CurryR(GaTerm):
    f: GaTerm


@dataclass(frozen=True)
class ApplyR(GaTerm):
    x: GuestType
    y: GuestType


@dataclass(frozen=True)
class LoopR(GaTerm):
    f: GaTerm
    z: ShapeTree


@dataclass(frozen=True)
class Merge(GaTerm):
    x: GuestType


@dataclass(frozen=True)
class Never(GaTerm):
    x: GuestType


@dataclass(frozen=True)
class InjL(GaTerm):
    x: GuestType
    y: GuestType


@dataclass(frozen=True)
class InjR(GaTerm):
    x: GuestType
    y: GuestType


STRUCTURAL = (Id, Comp, First, Second, CancelL, CancelR, UncancelL, UncancelR,
              Assoc, Unassoc, Swap)
SUM_NODES = (Merge, Never, InjL, InjR)


def ga_type_of(t: GaTerm, path: str = "") -> tuple[ShapeTree, ShapeTree]:
    """(domain, codomain) of ``t``; raises IllTyped at the first bad joint."""
    hit = t.__dict__.get("_type")
    if hit is None:
        hit = _ga_type_of(t, path)
        object.__setattr__(t, "_type", hit)
    return hit


def _ga_type_of(t: GaTerm, path: str) -> tuple[ShapeTree, ShapeTree]:
    if isinstance(t, Id):
        return t.s, t.s
    if isinstance(t, Comp):
        df, cf = ga_type_of(t.f, path + ".f")
        dg, cg = ga_type_of(t.g, path + ".g")
        if cf is not dg and shape_key(cf) != shape_key(dg):
            raise IllTyped(path, cf, dg)
        return df, cg
    if isinstance(t, First):
        d, c = ga_type_of(t.f, path + ".f")
        return Branch(d, t.z), Branch(c, t.z)
    if isinstance(t, Second):
        d, c = ga_type_of(t.f, path + ".f")
        return Branch(t.z, d), Branch(t.z, c)
    if isinstance(t, CancelL):
        return Branch(EMPTY, t.x), t.x
    if isinstance(t, CancelR):
        return Branch(t.x, EMPTY), t.x
    if isinstance(t, UncancelL):
        return t.x, Branch(EMPTY, t.x)
    if isinstance(t, UncancelR):
        return t.x, Branch(t.x, EMPTY)
    if isinstance(t, Assoc):
        return Branch(Branch(t.x, t.y), t.z), Branch(t.x, Branch(t.y, t.z))
    if isinstance(t, Unassoc):
        return Branch(t.x, Branch(t.y, t.z)), Branch(Branch(t.x, t.y), t.z)
    if isinstance(t, Copy):
        return t.x, Branch(t.x, t.x)
    if isinstance(t, Drop):
        return t.x, EMPTY
    if isinstance(t, Swap):
        return Branch(t.x, t.y), Branch(t.y, t.x)
    if isinstance(t, Constant):
        return EMPTY, Leaf(t.t)
    if isinstance(t, Prim):
        return t.ins, t.out
    if isinstance(t, CurryR):
        d, c = ga_type_of(t.f, path + ".f")
        if not (isinstance(d, Branch) and isinstance(d.r, Leaf) and isinstance(c, Leaf)):
            raise IllTyped(path, "<a, <x>> -> <y>", f"{d} -> {c}")
        return d.l, Leaf(ExpT(d.r.t, c.t))
    if isinstance(t, ApplyR):
        return Branch(Leaf(t.x), Leaf(ExpT(t.x, t.y))), Leaf(t.y)
    if isinstance(t, LoopR):
        d, c = ga_type_of(t.f, path + ".f")
        if not (isinstance(d, Branch) and isinstance(c, Branch)
                and d.r == t.z and c.r == t.z):
            raise IllTyped(path, f"<a, {t.z}> -> <b, {t.z}>", f"{d} -> {c}")
        return d.l, c.l
    if isinstance(t, Merge):
        return Leaf(SumT(t.x, t.x)), Leaf(t.x)
    if isinstance(t, Never):
        return EMPTY, Leaf(t.x)
    if isinstance(t, InjL):
        return Leaf(t.x), Leaf(SumT(t.x, t.y))
    if isinstance(t, InjR):
        return Leaf(t.y), Leaf(SumT(t.x, t.y))
    raise TypeError(f"not a GaTerm: {t!r}")


def dom(t: GaTerm) -> ShapeTree:
    return ga_type_of(t)[0]


def cod(t: GaTerm) -> ShapeTree:
    return ga_type_of(t)[1]


def children(t: GaTerm) -> list[GaTerm]:
    if isinstance(t, Comp):
        return [t.f, t.g]
    if isinstance(t, (First, Second, CurryR, LoopR)):
        return [t.f]
    return []


def node_count(t: GaTerm) -> int:
    return 1 + sum(node_count(c) for c in children(t))


def compose(*terms: GaTerm) -> GaTerm:
    """Right-nested composition of a non-empty sequence."""
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Comp(t, out)
    return out


def map_types(t: GaTerm, fn) -> GaTerm:
    """Apply ``fn`` to every guest type annotation inside ``t``."""
    ms = lambda s: map_shape(s, fn)  # noqa: E731
    if isinstance(t, Id):
        return Id(ms(t.s))
    if isinstance(t, Comp):
        return Comp(map_types(t.f, fn), map_types(t.g, fn))
    if isinstance(t, First):
        return First(map_types(t.f, fn), ms(t.z))
    if isinstance(t, Second):
        return Second(map_types(t.f, fn), ms(t.z))
    if isinstance(t, (CancelL, CancelR, UncancelL, UncancelR, Copy, Drop)):
        return type(t)(ms(t.x))
    if isinstance(t, (Assoc, Unassoc)):
        return type(t)(ms(t.x), ms(t.y), ms(t.z))
    if isinstance(t, Swap):
        return Swap(ms(t.x), ms(t.y))
    if isinstance(t, Constant):
        return Constant(t.lit, fn(t.t))
    if isinstance(t, Prim):
        return Prim(t.name, ms(t.ins), ms(t.out))
    if isinstance(t, CurryR):
        return CurryR(map_types(t.f, fn))
    if isinstance(t, LoopR):
        return LoopR(map_types(t.f, fn), ms(t.z))
    if isinstance(t, (ApplyR, InjL, InjR)):
        return type(t)(fn(t.x), fn(t.y))
    if isinstance(t, (Merge, Never)):
        return type(t)(fn(t.x))
    raise TypeError(f"not a GaTerm: {t!r}")


def term_type_vars(t: GaTerm) -> set[str]:
    found: set[str] = set()

    def visit(ty):
        found.update(type_vars(ty))
        return ty

    map_types(t, visit)
    return found


# ---------------------------------------------------------------------------
# peephole normalization

def _cancels(a: GaTerm, b: GaTerm) -> bool:
    """True when ``a >>> b`` is an identity by one of the inverse-pair rules."""
    pairs = ((CancelL, UncancelL), (UncancelL, CancelL),
             (CancelR, UncancelR), (UncancelR, CancelR))
    for p, q in pairs:
        if isinstance(a, p) and isinstance(b, q):
            return a.x == b.x
    if isinstance(a, Assoc) and isinstance(b, Unassoc) or \
            isinstance(a, Unassoc) and isinstance(b, Assoc):
        return (a.x, a.y, a.z) == (b.x, b.y, b.z)
    if isinstance(a, Swap) and isinstance(b, Swap):
        return a.x == b.y and a.y == b.x
    return False


def _chain(t: GaTerm, out: list[GaTerm]) -> None:
    if isinstance(t, Comp):
        _chain(t.f, out)
        _chain(t.g, out)
    else:
        out.append(t)


def normalize(t: GaTerm) -> GaTerm:
    d, _ = ga_type_of(t)
    return _normalize(t, d)


def _normalize(t: GaTerm, d: ShapeTree) -> GaTerm:
    if isinstance(t, Comp):
        parts: list[GaTerm] = []
        _chain(t, parts)
        stack: list[GaTerm] = []
        for p in parts:
            p = _normalize(p, ga_type_of(p)[0])
            if isinstance(p, Comp):
                sub: list[GaTerm] = []
                _chain(p, sub)
            else:
                sub = [p]
            for q in sub:
                if isinstance(q, Id):
                    continue
                if stack and _cancels(stack[-1], q):
                    stack.pop()
                    continue
                stack.append(q)
        if not stack:
            return Id(d)
        return compose(*stack)
    if isinstance(t, First):
        return First(normalize(t.f), t.z)
    if isinstance(t, Second):
        return Second(normalize(t.f), t.z)
    if isinstance(t, CurryR):
        return CurryR(normalize(t.f))
    if isinstance(t, LoopR):
        return LoopR(normalize(t.f), t.z)
    return t
