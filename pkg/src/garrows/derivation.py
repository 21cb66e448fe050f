"""Structure-explicit derivations over binary-tree contexts.

A bracket body is elaborated into a derivation whose every node demands exactly
the context its free level-1 variables need.  Where a binder hands a body a
context of a different shape, an ``Arrangement`` (needed ⇝ given) witnesses the
reshaping; the flattener turns it into wiring combinators.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from . import ir
from .errors import InternalError, MissingLeaf, NestedBracketUnsupported, OpenSplice
from .frontend.syntax import (App, Brak, Code, Esc, GBool, GFun, GInt, GPair, GUnit, If, Lam,
                              Let, LetRec, Lit, MLType, Note, PrimOp, SurfaceTerm, TVar, Var)
from .frontend.typecheck import Typed

# ---------------------------------------------------------------------------
# arrangements


class Arrangement:
    __slots__ = ()


@dataclass(frozen=True)
class AId(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class ACanL(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class ACanR(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class AuCanL(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class AuCanR(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class AAssoc(Arrangement):
    a: ir.ShapeTree
    b: ir.ShapeTree
    c: ir.ShapeTree


@dataclass(frozen=True)
class AuAssoc(Arrangement):
    a: ir.ShapeTree
    b: ir.ShapeTree
    c: ir.ShapeTree


@dataclass(frozen=True)
class ALeft(Arrangement):
    """Acts on the right component; ``frame`` is the untouched left one."""
    sub: Arrangement
    frame: ir.ShapeTree


@dataclass(frozen=True)
class ARight(Arrangement):
    """Acts on the left component; ``frame`` is the untouched right one."""
    sub: Arrangement
    frame: ir.ShapeTree


@dataclass(frozen=True)
class AExch(Arrangement):
    a: ir.ShapeTree
    b: ir.ShapeTree


@dataclass(frozen=True)
class ACont(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class AWeak(Arrangement):
    s: ir.ShapeTree


@dataclass(frozen=True)
class AComp(Arrangement):
    first: Arrangement
    then: Arrangement


B = ir.Branch
E = ir.EMPTY


def arr_src(a: Arrangement) -> ir.ShapeTree:
    if isinstance(a, AId):
        return a.s
    if isinstance(a, ACanL):
        return B(E, a.s)
    if isinstance(a, ACanR):
        return B(a.s, E)
    if isinstance(a, (AuCanL, AuCanR)):
        return a.s
    if isinstance(a, AAssoc):
        return B(B(a.a, a.b), a.c)
    if isinstance(a, AuAssoc):
        return B(a.a, B(a.b, a.c))
    if isinstance(a, ALeft):
        return B(a.frame, arr_src(a.sub))
    if isinstance(a, ARight):
        return B(arr_src(a.sub), a.frame)
    if isinstance(a, AExch):
        return B(a.a, a.b)
    if isinstance(a, ACont):
        return B(a.s, a.s)
    if isinstance(a, AWeak):
        return E
    if isinstance(a, AComp):
        return arr_src(a.first)
    raise TypeError(a)


def arr_tgt(a: Arrangement) -> ir.ShapeTree:
    if isinstance(a, (AId, ACanL, ACanR, ACont, AWeak)):
        return a.s
    if isinstance(a, AuCanL):
        return B(E, a.s)
    if isinstance(a, AuCanR):
        return B(a.s, E)
    if isinstance(a, AAssoc):
        return B(a.a, B(a.b, a.c))
    if isinstance(a, AuAssoc):
        return B(B(a.a, a.b), a.c)
    if isinstance(a, ALeft):
        return B(a.frame, arr_tgt(a.sub))
    if isinstance(a, ARight):
        return B(arr_tgt(a.sub), a.frame)
    if isinstance(a, AExch):
        return B(a.b, a.a)
    if isinstance(a, AComp):
        return arr_tgt(a.then)
    raise TypeError(a)


def arr_check(a: Arrangement) -> None:
    """Raise InternalError unless every AComp joint lines up."""
    if isinstance(a, AComp):
        arr_check(a.first)
        arr_check(a.then)
        if arr_tgt(a.first) != arr_src(a.then):
            raise InternalError(f"arrangement joint {arr_tgt(a.first)} vs {arr_src(a.then)}")
    elif isinstance(a, (ALeft, ARight)):
        arr_check(a.sub)


def invert(a: Arrangement) -> Arrangement:
    """The arrangement with source and target exchanged (weakening and contraction excluded)."""
    if isinstance(a, AId):
        return a
    pairs = {ACanL: AuCanL, AuCanL: ACanL, ACanR: AuCanR, AuCanR: ACanR}
    if type(a) in pairs:
        return pairs[type(a)](a.s)
    if isinstance(a, AAssoc):
        return AuAssoc(a.a, a.b, a.c)
    if isinstance(a, AuAssoc):
        return AAssoc(a.a, a.b, a.c)
    if isinstance(a, ALeft):
        return ALeft(invert(a.sub), a.frame)
    if isinstance(a, ARight):
        return ARight(invert(a.sub), a.frame)
    if isinstance(a, AExch):
        return AExch(a.b, a.a)
    if isinstance(a, AComp):
        return AComp(invert(a.then), invert(a.first))
    raise InternalError(f"{type(a).__name__} has no inverse arrangement")


def render_arrangement(a: Arrangement) -> str:
    if isinstance(a, AComp):
        return f"(comp {render_arrangement(a.first)} {render_arrangement(a.then)})"
    if isinstance(a, (ALeft, ARight)):
        head = "left" if isinstance(a, ALeft) else "right"
        return f"({head} {render_arrangement(a.sub)})"
    names = {AId: "id", ACanL: "canl", ACanR: "canr", AuCanL: "ucanl", AuCanR: "ucanr",
             AAssoc: "assoc", AuAssoc: "uassoc", AExch: "exch", ACont: "cont", AWeak: "weak"}
    return f"({names[type(a)]})"


# ---------------------------------------------------------------------------
# canonical arrangement search
#
# Work happens in the combinator direction (given -> needed); each step is
# recorded as the arrangement whose contravariant reading is that step.  The
# working context is kept as a right comb, i.e. a plain list of leaf types.

def _chain(steps: list[Arrangement]) -> Arrangement:
    """Arrangement whose reading is steps[0] >>> steps[1] >>> ..."""
    out = steps[-1]
    for s in reversed(steps[:-1]):
        out = AComp(out, s)
    return out


def _comb(types: list[ir.GuestType]) -> ir.ShapeTree:
    return ir.rnest([ir.Leaf(t) for t in types])


def _to_comb(s: ir.ShapeTree) -> tuple[list[Arrangement], ir.ShapeTree]:
    """Steps flattening ``s`` into the right comb of its leaves (no empty leaves)."""
    steps, comb = ir.memo(s, "_to_comb", lambda: _to_comb_uncached(s))
    return list(steps), comb


def _to_comb_uncached(s: ir.ShapeTree) -> tuple[list[Arrangement], ir.ShapeTree]:
    if not isinstance(s, ir.Branch):
        return [], s
    lsteps, lc = _to_comb(s.l)
    rsteps, rc = _to_comb(s.r)
    steps: list[Arrangement] = []
    if lsteps:
        steps.append(ARight(_chain(lsteps), s.r))
    if rsteps:
        steps.append(ALeft(_chain(rsteps), lc))
    if isinstance(lc, ir.Empty):
        steps.append(AuCanL(rc))
        return steps, rc
    if isinstance(rc, ir.Empty):
        steps.append(AuCanR(lc))
        return steps, lc
    more, out = _append(lc, rc)
    return steps + more, out


def _append(lc: ir.ShapeTree, rc: ir.ShapeTree) -> tuple[list[Arrangement], ir.ShapeTree]:
    """Steps turning Branch(comb, comb) into a single comb."""
    if not isinstance(lc, ir.Branch):
        return [], B(lc, rc)
    head, rest = lc.l, lc.r
    steps: list[Arrangement] = [AuAssoc(head, rest, rc)]
    inner, out = _append(rest, rc)
    if inner:
        steps.append(ALeft(_chain(inner), head))
    return steps, B(head, out)


def _at(pos: int, types: list[ir.GuestType], step: list[Arrangement]) -> Arrangement:
    """Frame a step acting on the sub-comb starting at ``pos``."""
    a = _chain(step)
    for j in reversed(range(pos)):
        a = ALeft(a, ir.Leaf(types[j]))
    return a


def _duplicate(types, pos) -> Arrangement:
    x = ir.Leaf(types[pos])
    if pos == len(types) - 1:
        return _at(pos, types, [ACont(x)])
    rest = _comb(types[pos + 1:])
    return _at(pos, types, [ARight(ACont(x), rest), AuAssoc(x, x, rest)])


def _delete(types, pos) -> Arrangement:
    x = ir.Leaf(types[pos])
    if len(types) == 1:
        return AWeak(x)
    if pos < len(types) - 1:
        rest = _comb(types[pos + 1:])
        return _at(pos, types, [ARight(AWeak(x), rest), AuCanL(rest)])
    prev = ir.Leaf(types[pos - 1])
    return _at(pos - 1, types, [ALeft(AWeak(x), prev), AuCanR(prev)])


def _swap(types, pos) -> Arrangement:
    a, b = ir.Leaf(types[pos]), ir.Leaf(types[pos + 1])
    if pos + 1 == len(types) - 1:
        return _at(pos, types, [AExch(b, a)])
    rest = _comb(types[pos + 2:])
    return _at(pos, types, [AAssoc(a, b, rest), ARight(AExch(b, a), rest), AuAssoc(b, a, rest)])


def arrange_sources(needed: ir.ShapeTree, given: ir.ShapeTree, src: list[int]) -> Arrangement:
    """Arrangement needed ⇝ given where needed leaf ``i`` is given leaf ``src[i]``.

    Built in three blocks: flatten ``given`` to a comb, duplicate, delete and
    reorder comb leaves, then rebuild ``needed`` from its comb.  Each block
    depends on only one argument so it is cached and shared.
    """
    gtypes = ir.leaves(given)
    ntypes = ir.leaves(needed)
    if len(src) != len(ntypes):
        raise InternalError("source map does not cover the needed leaves")
    for i, j in enumerate(src):
        if gtypes[j] != ntypes[i]:
            raise InternalError(f"leaf {i} of {needed} drawn from a {gtypes[j]} leaf")
    if len(src) == len(gtypes) and src == list(range(len(gtypes))) and needed == given:
        return AId(given)
    blocks = [b for b in (_flatten_block(given), _comb_block(tuple(gtypes), tuple(src)),
                          _rebuild_block(needed)) if b is not None]
    if not blocks:
        return AId(given)
    return _chain(blocks)


def _flatten_block(s: ir.ShapeTree) -> Arrangement | None:
    def build():
        steps, _ = _to_comb(s)
        return (_chain(steps) if steps else None,)
    return ir.memo(s, "_flatten_block", build)[0]


def _rebuild_block(s: ir.ShapeTree) -> Arrangement | None:
    def build():
        steps, _ = _to_comb(s)
        return (_chain([invert(x) for x in reversed(steps)]) if steps else None,)
    return ir.memo(s, "_rebuild_block", build)[0]


@lru_cache(maxsize=4096)
def _comb_block(gtypes: tuple, src: tuple) -> Arrangement | None:
    steps: list[Arrangement] = []
    ids = list(range(len(gtypes)))          # origin of each comb position
    types = list(gtypes)
    uses = Counter(src)

    # duplicate, left to right
    pos = 0
    while pos < len(ids):
        origin = ids[pos]
        extra = uses[origin] - 1 if pos == ids.index(origin) else 0
        for _ in range(max(extra, 0)):
            steps.append(_duplicate(types, pos))
            ids.insert(pos, origin)
            types.insert(pos, types[pos])
            pos += 1
        pos += 1
    # delete unused leaves
    pos = 0
    while pos < len(ids):
        if uses[ids[pos]] == 0:
            steps.append(_delete(types, pos))
            del ids[pos], types[pos]
        else:
            pos += 1
    # bubble into needed order; copies of one origin keep their relative order
    slots: dict[int, list[int]] = {}
    for i, j in enumerate(src):
        slots.setdefault(j, []).append(i)
    seen: Counter = Counter()
    target = []
    for origin in ids:
        target.append(slots[origin][seen[origin]])
        seen[origin] += 1
    for end in range(len(target) - 1, 0, -1):
        for p in range(end):
            if target[p] > target[p + 1]:
                steps.append(_swap(types, p))
                target[p], target[p + 1] = target[p + 1], target[p]
                types[p], types[p + 1] = types[p + 1], types[p]
    return _chain(steps) if steps else None


def type_sources(needed: ir.ShapeTree, given: ir.ShapeTree) -> list[int]:
    """k-th needed occurrence of a type draws from the k-th given one (last one if fewer)."""
    src = _type_sources(tuple(ir.leaves(needed)), tuple(ir.leaves(given)))
    if src is None:
        missing = next(t for t in ir.leaves(needed) if t not in ir.leaves(given))
        raise MissingLeaf(f"no {missing} leaf in {given}")
    return list(src)


@lru_cache(maxsize=8192)
def _type_sources(ntypes: tuple, gtypes: tuple) -> tuple[int, ...] | None:
    where: dict[ir.GuestType, list[int]] = {}
    for j, t in enumerate(gtypes):
        where.setdefault(t, []).append(j)
    seen: Counter = Counter()
    src = []
    for t in ntypes:
        if t not in where:
            return None
        occ = where[t]
        src.append(occ[min(seen[t], len(occ) - 1)])
        seen[t] += 1
    return tuple(src)


def arrange(needed: ir.ShapeTree, given: ir.ShapeTree) -> Arrangement:
    return arrange_sources(needed, given, type_sources(needed, given))


def arrange_keys(needed: ir.ShapeTree, needed_keys: list, given: ir.ShapeTree,
                 given_keys: list) -> Arrangement:
    """Like ``arrange`` but leaves are matched by key rather than by type."""
    index = {k: j for j, k in enumerate(given_keys)}
    src = []
    for k, t in zip(needed_keys, ir.leaves(needed)):
        if k not in index:
            raise MissingLeaf(f"no {t} leaf for binder {k} in {given}")
        src.append(index[k])
    return arrange_sources(needed, given, src)


# ---------------------------------------------------------------------------
# guest types of level-1 terms

def guest_type(t: MLType) -> ir.GuestType:
    if isinstance(t, GInt):
        return ir.INT
    if isinstance(t, GBool):
        return ir.BOOL
    if isinstance(t, GUnit):
        return ir.UNIT
    if isinstance(t, GFun):
        return ir.ExpT(guest_type(t.dom), guest_type(t.cod))
    if isinstance(t, GPair):
        return ir.ProdT(guest_type(t.l), guest_type(t.r))
    if isinstance(t, TVar):
        return ir.TyVarT(f"t{t.id}")
    if isinstance(t, Code):
        raise NestedBracketUnsupported("code types inside guest code cannot be flattened")
    raise TypeError(t)


# ---------------------------------------------------------------------------
# derivations

@dataclass
class Derivation:
    ctx: ir.ShapeTree
    type: ir.GuestType
    keys: tuple = ()
    level: tuple = ()

    rule = "?"

    def kids(self) -> list["Derivation"]:
        return []


@dataclass
class DVar(Derivation):
    name: str = ""
    uid: int = -1
    rule = "Var"


@dataclass
class DLit(Derivation):
    lit: ir.Literal = None
    transport: bool = True
    rule = "Lit"


@dataclass
class DNote(Derivation):
    text: str = ""
    d: Derivation = None
    rule = "Note"

    def kids(self):
        return [self.d]


@dataclass
class DLet(Derivation):
    name: str = ""
    uid: int = -1
    d1: Derivation = None
    d2: Derivation = None
    rule = "Let"

    def kids(self):
        return [self.d1, self.d2]


@dataclass
class DLetRec(Derivation):
    name: str = ""
    uid: int = -1
    annot: MLType = None
    d1: Derivation = None
    d2: Derivation = None
    rule = "LetRec"

    def kids(self):
        return [self.d1, self.d2]


@dataclass
class DAbs(Derivation):
    name: str = ""
    uid: int = -1
    annot: MLType | None = None
    d: Derivation = None
    absorbed: bool = False
    rule = "Abs"

    def kids(self):
        return [self.d]


@dataclass
class DApp(Derivation):
    darg: Derivation = None
    dfun: Derivation = None
    rule = "App"

    def kids(self):
        return [self.darg, self.dfun]


@dataclass
class DEsc(Derivation):
    """A splice; ``term`` is the level-0 expression evaluated at staging time."""
    term: Typed = None
    rule = "Esc"


@dataclass
class DSpliceApp(Derivation):
    """A spliced function applied directly to a guest argument."""
    darg: Derivation = None
    esc: DEsc = None
    rule = "SpliceApp"

    def kids(self):
        return [self.darg, self.esc]


@dataclass
class DBrak(Derivation):
    d: Derivation = None
    rule = "Brak"

    def kids(self):
        return [self.d]


@dataclass
class DArrange(Derivation):
    arr: Arrangement = None
    d: Derivation = None
    rule = "Arrange"

    def kids(self):
        return [self.d]


@dataclass
class DPrim(Derivation):
    name: str = ""
    args: list = field(default_factory=list)
    from_if: bool = False
    rule = "Prim"

    def kids(self):
        return list(self.args)


# ---------------------------------------------------------------------------
# required contexts
#
# A context is a shape paired with the binder ids of its leaves, left to right.

Ctx = tuple[ir.ShapeTree, tuple]


def _remove(ctx: Ctx, uid: int) -> Ctx:
    """Drop every leaf of binder ``uid`` and collapse empty branches."""
    shape, keys = ctx
    it = iter(keys)

    def go(s):
        if isinstance(s, ir.Leaf):
            k = next(it)
            return (E, ()) if k == uid else (s, (k,))
        if isinstance(s, ir.Branch):
            l, lk = go(s.l)
            r, rk = go(s.r)
            if isinstance(l, ir.Empty):
                return r, rk
            if isinstance(r, ir.Empty):
                return l, lk
            return B(l, r), lk + rk
        return E, ()
    return go(shape)


def _branch(a: Ctx, b: Ctx) -> Ctx:
    return B(a[0], b[0]), a[1] + b[1]


def _is_splice_app(t: Typed) -> bool:
    return isinstance(t.node, App) and isinstance(t.kids[0].node, Esc)


def _req(t: Typed) -> Ctx:
    n = t.node
    if isinstance(n, Var):
        return ir.Leaf(guest_type(t.type)), (t.binder,)
    if isinstance(n, (Lit, Esc)):
        return E, ()
    if isinstance(n, Note):
        return _req(t.kids[0])
    if isinstance(n, App):
        if _is_splice_app(t):
            return _req(t.kids[1])
        return _branch(_req(t.kids[1]), _req(t.kids[0]))
    if isinstance(n, Lam):
        return _remove(_req(t.kids[0]), t.binder)
    if isinstance(n, Let):
        return _branch(_remove(_req(t.kids[1]), t.binder), _req(t.kids[0]))
    if isinstance(n, LetRec):
        return _branch(_remove(_req(t.kids[1]), t.binder), _remove(_req(t.kids[0]), t.binder))
    if isinstance(n, (PrimOp, If)):
        parts = [_req(k) for k in t.kids]
        return ir.rnest([p[0] for p in parts]), sum((p[1] for p in parts), ())
    if isinstance(n, Brak):
        raise NestedBracketUnsupported("brackets nested inside guest code", n.pos)
    raise TypeError(n)


def required_context(t: Typed) -> ir.ShapeTree:
    return _req(t)[0]


# ---------------------------------------------------------------------------
# elaboration

def _fit(d: Derivation, given: Ctx) -> Derivation:
    """Place ``d`` in context ``given``, arranging if the shapes differ."""
    if (d.ctx, d.keys) == given:
        return d
    a = arrange_keys(d.ctx, list(d.keys), given[0], list(given[1]))
    return DArrange(given[0], d.type, given[1], d.level, arr=a, d=d)


def _check_closed_splice(t: Typed) -> None:
    for name, _, level in t.free_vars():
        if level:
            raise OpenSplice(f"guest variable {name} escapes into a splice", t.node.pos)


def _elab(t: Typed) -> Derivation:
    n = t.node
    ty = guest_type(t.type)
    lv = t.level
    if len(lv) > 1:
        raise NestedBracketUnsupported("brackets nested inside guest code", n.pos)
    if isinstance(n, Var):
        return DVar(ir.Leaf(ty), ty, (t.binder,), lv, name=n.name, uid=t.binder)
    if isinstance(n, Lit):
        return DLit(E, ty, (), lv, lit=n.lit, transport=True)
    if isinstance(n, Note):
        d = _elab(t.kids[0])
        return DNote(d.ctx, ty, d.keys, lv, text=n.text, d=d)
    if isinstance(n, Esc):
        _check_closed_splice(t.kids[0])
        return DEsc(E, ty, (), lv, term=t.kids[0])
    if isinstance(n, App):
        if _is_splice_app(t):
            esc = _elab(t.kids[0])
            darg = _elab(t.kids[1])
            return DSpliceApp(darg.ctx, ty, darg.keys, lv, darg=darg, esc=esc)
        dfun = _elab(t.kids[0])
        darg = _elab(t.kids[1])
        return DApp(B(darg.ctx, dfun.ctx), ty, darg.keys + dfun.keys, lv, darg=darg, dfun=dfun)
    if isinstance(n, Lam):
        outer = _req(t)
        body = _elab(t.kids[0])
        xt = ir.Leaf(guest_type(t.type.dom))
        d = _fit(body, (B(outer[0], xt), outer[1] + (t.binder,)))
        return DAbs(outer[0], ty, outer[1], lv, name=n.name, uid=t.binder, annot=n.annot, d=d)
    if isinstance(n, Let):
        d1 = _elab(t.kids[0])
        frame = _remove(_req(t.kids[1]), t.binder)
        xt = ir.Leaf(d1.type)
        d2 = _fit(_elab(t.kids[1]), (B(frame[0], xt), frame[1] + (t.binder,)))
        return DLet(B(frame[0], d1.ctx), ty, frame[1] + d1.keys, lv,
                    name=n.name, uid=t.binder, d1=d1, d2=d2)
    if isinstance(n, LetRec):
        ft = ir.Leaf(guest_type(t.kids[0].type))
        s1 = _remove(_req(t.kids[0]), t.binder)
        s2 = _remove(_req(t.kids[1]), t.binder)
        d1 = _fit(_elab(t.kids[0]), (B(s1[0], ft), s1[1] + (t.binder,)))
        d2 = _fit(_elab(t.kids[1]), (B(s2[0], ft), s2[1] + (t.binder,)))
        return DLetRec(B(s2[0], s1[0]), ty, s2[1] + s1[1], lv, name=n.name, uid=t.binder,
                       annot=n.annot, d1=d1, d2=d2)
    if isinstance(n, (PrimOp, If)):
        args = [_elab(k) for k in t.kids]
        name = "ite" if isinstance(n, If) else n.name
        return DPrim(ir.rnest([a.ctx for a in args]), ty, sum((a.keys for a in args), ()), lv,
                     name=name, args=args, from_if=isinstance(n, If))
    if isinstance(n, Brak):
        raise NestedBracketUnsupported("brackets nested inside guest code", n.pos)
    raise TypeError(n)


def elaborate(t: Typed) -> Derivation:
    """Derivation of a bracket body (or of a whole bracket, giving a DBrak).

    A body that is a lambda is absorbed: the result's context is the bound
    variable's leaf instead of a curried closure over the empty context.
    """
    if isinstance(t.node, Brak) and not t.level:
        d = elaborate(t.kids[0])
        return DBrak(E, d.type, (), t.level, d=d)
    if isinstance(t.node, Brak) or len(t.level) > 1:
        raise NestedBracketUnsupported("brackets nested inside guest code", t.node.pos)
    if len(t.level) != 1:
        raise InternalError("elaborate expects a guest-level term")
    if isinstance(t.node, Lam):
        body = _elab(t.kids[0])
        xt = ir.Leaf(guest_type(t.type.dom))
        d = _fit(body, (xt, (t.binder,)))
        return DAbs(xt, guest_type(t.type), (t.binder,), t.level, name=t.node.name,
                    uid=t.binder, annot=t.node.annot, d=d, absorbed=True)
    return _fit(_elab(t), (E, ()))


# ---------------------------------------------------------------------------
# reconstruction and printing

def erase(d: Derivation) -> SurfaceTerm:
    if isinstance(d, DVar):
        return Var(d.name)
    if isinstance(d, DLit):
        return Lit(d.lit)
    if isinstance(d, DNote):
        return Note(d.text, erase(d.d))
    if isinstance(d, DArrange):
        return erase(d.d)
    if isinstance(d, DAbs):
        return Lam(d.name, d.annot, erase(d.d))
    if isinstance(d, DApp):
        return App(erase(d.dfun), erase(d.darg))
    if isinstance(d, DSpliceApp):
        return App(erase(d.esc), erase(d.darg))
    if isinstance(d, DEsc):
        return Esc(d.term.node)
    if isinstance(d, DLet):
        return Let(d.name, erase(d.d1), erase(d.d2))
    if isinstance(d, DLetRec):
        return LetRec(d.name, d.annot, erase(d.d1), erase(d.d2))
    if isinstance(d, DPrim):
        args = [erase(a) for a in d.args]
        return If(*args) if d.from_if else PrimOp(d.name, args)
    if isinstance(d, DBrak):
        return Brak(erase(d.d))
    raise TypeError(d)


def render(d: Derivation, indent: int = 0) -> str:
    """One rule per line, indented by depth, contexts in angle brackets."""
    pad = "  " * indent
    extra = ""
    if isinstance(d, DVar):
        extra = f" {d.name}"
    elif isinstance(d, DLit):
        extra = f" {d.lit}" + (" transport" if d.transport else "")
    elif isinstance(d, (DAbs, DLet, DLetRec)):
        extra = f" {d.name}" + (" absorbed" if isinstance(d, DAbs) and d.absorbed else "")
    elif isinstance(d, DPrim):
        extra = f" {d.name}"
    elif isinstance(d, DArrange):
        extra = f" {render_arrangement(d.arr)}"
    lines = [f"{pad}{d.rule}{extra}  {d.ctx} |- {d.type}"]
    for k in d.kids():
        lines.append(render(k, indent + 1))
    return "\n".join(lines)
