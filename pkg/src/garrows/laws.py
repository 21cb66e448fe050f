"""Property harness for the generalized-arrow laws.

Each law is instantiated at random shapes with randomly generated morphisms,
then both sides are run on random conforming inputs and compared value by
value.  Closures are compared extensionally on 8 sampled arguments.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable

from . import ir
from .backends.bi import bi_interpret
from .backends.evaluate import apply_closure, compile_term
from .errors import EvalError, NonInvertible
from .values import (VClos, Value, constant_term, force, format_value, gen_type_value,
                     gen_value)

ALL, CARTESIAN = "all-backends", "cartesian-backends-only"
B, E = ir.Branch, ir.EMPTY
INT, BOOL = ir.Leaf(ir.INT), ir.Leaf(ir.BOOL)


@dataclass(frozen=True)
class LawCase:
    name: str
    lhs: ir.GaTerm
    rhs: ir.GaTerm
    shape: ir.ShapeTree
    applicability: str = ALL


# ---------------------------------------------------------------------------
# random shapes and morphisms

def gen_shape(rng: random.Random, depth: int = 2) -> ir.ShapeTree:
    r = rng.random()
    if depth == 0 or r < 0.45:
        return rng.choice([INT, INT, BOOL, E])
    return B(gen_shape(rng, depth - 1), gen_shape(rng, depth - 1))


def gen_morphism(dom: ir.ShapeTree, rng: random.Random, depth: int = 2,
                 invertible: bool = False) -> ir.GaTerm:
    """A random well-typed term with domain ``dom``."""
    opts: list[Callable[[], ir.GaTerm]] = [lambda: ir.Id(dom)]
    if depth > 0:
        def comp():
            f = gen_morphism(dom, rng, depth - 1, invertible)
            return ir.Comp(f, gen_morphism(ir.cod(f), rng, depth - 1, invertible))
        opts += [comp, comp]
    if isinstance(dom, ir.Branch):
        l, r = dom.l, dom.r
        opts += [lambda: ir.Swap(l, r)]
        if depth > 0:
            opts += [lambda: ir.First(gen_morphism(l, rng, depth - 1, invertible), r),
                     lambda: ir.Second(gen_morphism(r, rng, depth - 1, invertible), l)]
        if isinstance(l, ir.Branch):
            opts.append(lambda: ir.Assoc(l.l, l.r, r))
        if isinstance(r, ir.Branch):
            opts.append(lambda: ir.Unassoc(l, r.l, r.r))
        if isinstance(l, ir.Empty):
            opts.append(lambda: ir.CancelL(r))
        if isinstance(r, ir.Empty):
            opts.append(lambda: ir.CancelR(l))
        if not invertible and l == INT and r == INT:
            opts.append(lambda: _binop(rng, dom))
        if (not invertible and isinstance(l, ir.Leaf) and isinstance(r, ir.Leaf)
                and isinstance(r.t, ir.ExpT) and r.t.dom == l.t):
            opts.append(lambda: ir.ApplyR(l.t, r.t.cod))
    if ir.shape_size(dom) <= 2:
        opts += [lambda: ir.UncancelL(dom), lambda: ir.UncancelR(dom), lambda: ir.Copy(dom)]
    if dom == INT:
        opts += [lambda: ir.Prim(rng.choice(["succ", "pred", "neg"]), INT, INT)]
    if dom == BOOL:
        opts += [lambda: ir.Prim("not", BOOL, BOOL)]
    if not invertible:
        opts += [lambda: ir.Drop(dom),
                 lambda: ir.Comp(ir.Drop(dom), constant_term(rng.choice([ir.INT, ir.BOOL]), rng))]
        if depth > 0 and ir.shape_size(dom) <= 2:
            def curry():
                arg = rng.choice([ir.INT, ir.BOOL])
                body_dom = B(dom, ir.Leaf(arg))
                body = _to_leaf(gen_morphism(body_dom, rng, depth - 1, invertible), rng)
                return ir.CurryR(body)
            opts.append(curry)
    return rng.choice(opts)()


def _binop(rng, dom):
    name = rng.choice(["add", "sub", "mult", "eq"])
    return ir.Prim(name, dom, BOOL if name == "eq" else INT)


def _to_leaf(f: ir.GaTerm, rng) -> ir.GaTerm:
    """Post-compose so the codomain is a single leaf (needed under curryr)."""
    c = ir.cod(f)
    if isinstance(c, ir.Leaf):
        return f
    ts = ir.leaves(c)
    if ts and isinstance(c, ir.Branch) and isinstance(c.l, ir.Leaf):
        # keep the first leaf: drop the right component
        return ir.compose(f, ir.Second(ir.Drop(c.r), c.l), ir.CancelR(c.l))
    return ir.compose(f, ir.Drop(c), constant_term(ir.INT, rng))


# ---------------------------------------------------------------------------
# the catalog

def law_catalog(shape_seed: int = 0, invertible_only: bool = False,
                instances: int = 3) -> list[LawCase]:
    rng = random.Random(shape_seed)
    inv = invertible_only
    cases: list[LawCase] = []

    def add(name, lhs, rhs, applicability=ALL):
        dl, cl = ir.ga_type_of(lhs)
        dr, cr = ir.ga_type_of(rhs)
        assert (dl, cl) == (dr, cr), f"{name}: sides differ in type"
        cases.append(LawCase(name, lhs, rhs, dl, applicability))

    def mor(dom):
        return gen_morphism(dom, rng, 2, inv)

    for i in range(instances):
        tag = f"[{i}]"
        x, y, z, w = (gen_shape(rng) for _ in range(4))
        f = mor(x)
        add("L1.left-identity" + tag, ir.Comp(ir.Id(x), f), f)
        add("L1.right-identity" + tag, ir.Comp(f, ir.Id(ir.cod(f))), f)
        g = mor(ir.cod(f))
        h = mor(ir.cod(g))
        add("L2.associativity" + tag, ir.Comp(ir.Comp(f, g), h), ir.Comp(f, ir.Comp(g, h)))
        add("L3.first-comp" + tag, ir.First(ir.Comp(f, g), z),
            ir.Comp(ir.First(f, z), ir.First(g, z)))
        add("L3.second-comp" + tag, ir.Second(ir.Comp(f, g), z),
            ir.Comp(ir.Second(f, z), ir.Second(g, z)))
        add("L3.first-id" + tag, ir.First(ir.Id(x), z), ir.Id(B(x, z)))
        add("L3.second-id" + tag, ir.Second(ir.Id(x), z), ir.Id(B(z, x)))
        add("L4.uncancell-cancell" + tag, ir.Comp(ir.UncancelL(x), ir.CancelL(x)), ir.Id(x))
        add("L4.cancell-uncancell" + tag, ir.Comp(ir.CancelL(x), ir.UncancelL(x)), ir.Id(B(E, x)))
        add("L4.uncancelr-cancelr" + tag, ir.Comp(ir.UncancelR(x), ir.CancelR(x)), ir.Id(x))
        add("L4.cancelr-uncancelr" + tag, ir.Comp(ir.CancelR(x), ir.UncancelR(x)), ir.Id(B(x, E)))
        add("L5.assoc-unassoc" + tag, ir.Comp(ir.Assoc(x, y, z), ir.Unassoc(x, y, z)),
            ir.Id(B(B(x, y), z)))
        add("L5.unassoc-assoc" + tag, ir.Comp(ir.Unassoc(x, y, z), ir.Assoc(x, y, z)),
            ir.Id(B(x, B(y, z))))
        add("L6.triangle" + tag, ir.Comp(ir.Assoc(x, E, y), ir.Second(ir.CancelL(y), x)),
            ir.First(ir.CancelR(x), y))
        add("L6.pentagon" + tag,
            ir.Comp(ir.Assoc(B(w, x), y, z), ir.Assoc(w, x, B(y, z))),
            ir.compose(ir.First(ir.Assoc(w, x, y), z), ir.Assoc(w, B(x, y), z),
                       ir.Second(ir.Assoc(x, y, z), w)))
        add("L7.swap-involution" + tag, ir.Comp(ir.Swap(x, y), ir.Swap(y, x)), ir.Id(B(x, y)))
        add("L8.copy-drop-left" + tag,
            ir.compose(ir.Copy(x), ir.First(ir.Drop(x), x), ir.CancelL(x)), ir.Id(x))
        add("L8.copy-drop-right" + tag,
            ir.compose(ir.Copy(x), ir.Second(ir.Drop(x), x), ir.CancelR(x)), ir.Id(x))
        add("L9.copy-swap" + tag, ir.Comp(ir.Copy(x), ir.Swap(x, x)), ir.Copy(x))
        add("L10.copy-assoc" + tag,
            ir.compose(ir.Copy(x), ir.First(ir.Copy(x), x), ir.Assoc(x, x, x)),
            ir.Comp(ir.Copy(x), ir.Second(ir.Copy(x), x)))
        f2 = mor(x)
        g2 = mor(y)
        add("L11.sliding" + tag,
            ir.Comp(ir.First(f2, y), ir.Second(g2, ir.cod(f2))),
            ir.Comp(ir.Second(g2, x), ir.First(f2, ir.cod(g2))), CARTESIAN)
        add("L12.drop-naturality" + tag, ir.Comp(f2, ir.Drop(ir.cod(f2))), ir.Drop(x), CARTESIAN)
    return cases


# ---------------------------------------------------------------------------
# backends as seen by the harness

_UNDEFINED = object()


def values_equal(a: Value, b: Value, shape: ir.ShapeTree, rng: random.Random) -> bool:
    a, b = force(a), force(b)
    if isinstance(shape, ir.Branch):
        return (values_equal(a.l, b.l, shape.l, rng)
                and values_equal(a.r, b.r, shape.r, rng))
    if isinstance(shape, ir.Leaf) and isinstance(shape.t, ir.ExpT):
        return closures_equal(a, b, shape.t, rng)
    if isinstance(a, VClos) or isinstance(b, VClos):
        return False
    return a == b


def closures_equal(a: Value, b: Value, t: ir.ExpT, rng: random.Random,
                   samples: int = 8) -> bool:
    for _ in range(samples):
        arg = gen_type_value(t.dom, rng)
        ra, rb = _attempt(lambda: apply_closure(a, arg)), _attempt(lambda: apply_closure(b, arg))
        if not _outcomes_equal(ra, rb, ir.Leaf(t.cod), rng):
            return False
    return True


def _attempt(fn):
    try:
        return ("ok", fn())
    except EvalError as e:
        return ("error", e.code)


def _outcomes_equal(x, y, shape, rng) -> bool:
    if x[0] != y[0]:
        return False
    if x[0] == "error":
        return x[1] == y[1]
    return values_equal(x[1], y[1], shape, rng)


@dataclass
class Backend:
    name: str
    cartesian: bool
    invertible_only: bool
    observe: Callable[[ir.GaTerm], Callable[[Value], object]]
    equal: Callable[[object, object, ir.GaTerm, random.Random], bool]


def _eval_observe(t):
    run = compile_term(t)
    return lambda v: _attempt(lambda: run(v))


def _eval_equal(x, y, t, rng):
    return _outcomes_equal(x, y, ir.cod(t), rng)


def _bi_observe(t):
    m = bi_interpret(t)

    def obs(v):
        out = _attempt(lambda: m.fwd(v))
        if out[0] == "error":
            return out, _UNDEFINED
        try:
            back = ("ok", m.bwd(out[1]))
        except NonInvertible:
            back = _UNDEFINED
        except EvalError as e:
            back = ("error", e.code)
        return out, back
    return obs


def _bi_equal(x, y, t, rng):
    d, c = ir.ga_type_of(t)
    if not _outcomes_equal(x[0], y[0], c, rng):
        return False
    if x[1] is _UNDEFINED or y[1] is _UNDEFINED:
        return True         # a missing backward direction constrains nothing
    return _outcomes_equal(x[1], y[1], d, rng)


BACKENDS = {
    "eval": Backend("eval", True, False, _eval_observe, _eval_equal),
    "bi": Backend("bi", False, True, _bi_observe, _bi_equal),
}


# ---------------------------------------------------------------------------
# running

@dataclass
class LawResult:
    name: str
    status: str                      # PASS, FAIL or SKIP
    counterexample: str | None = None


@dataclass
class LawReport:
    backend: str
    seed: int
    cases: int
    results: list[LawResult] = field(default_factory=list)

    @property
    def failed(self) -> list[LawResult]:
        return [r for r in self.results if r.status == "FAIL"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def count(self, status: str) -> int:
        return sum(r.status == status for r in self.results)

    def text(self) -> str:
        lines = []
        for r in self.results:
            line = f"LAW {r.name} {r.status}"
            if r.counterexample:
                line += f" {r.counterexample}"
            lines.append(line)
        lines.append(f"SUMMARY backend={self.backend} seed={self.seed} cases={self.cases} "
                     f"pass={self.count('PASS')} fail={self.count('FAIL')} "
                     f"skip={self.count('SKIP')}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"backend": self.backend, "seed": self.seed, "cases": self.cases,
                "passed": self.count("PASS"), "failed": self.count("FAIL"),
                "skipped": self.count("SKIP"),
                "laws": [{"name": r.name, "status": r.status,
                          "counterexample": r.counterexample} for r in self.results]}

    def json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def check_case(case: LawCase, backend: Backend, rng: random.Random, n: int) -> LawResult:
    left, right = backend.observe(case.lhs), backend.observe(case.rhs)
    for _ in range(n):
        v = gen_value(case.shape, rng)
        a, b = left(v), right(v)
        if not backend.equal(a, b, case.lhs, rng):
            return LawResult(case.name, "FAIL",
                             f"input={format_value(v)} lhs={_show(a)} rhs={_show(b)}")
    return LawResult(case.name, "PASS")


def _show(obs) -> str:
    if isinstance(obs, tuple) and len(obs) == 2 and isinstance(obs[0], tuple):
        fwd, back = obs
        return f"{_show(fwd)}/{'undefined' if back is _UNDEFINED else _show(back)}"
    kind, val = obs
    return format_value(val) if kind == "ok" else f"error:{val}"


def run_law_suite(backend: str | Backend = "eval", seed: int = 42,
                  cases_per_law: int = 100) -> LawReport:
    be = BACKENDS[backend] if isinstance(backend, str) else backend
    report = LawReport(be.name, seed, cases_per_law)
    for idx, case in enumerate(law_catalog(seed, be.invertible_only)):
        if case.applicability == CARTESIAN and not be.cartesian:
            report.results.append(LawResult(case.name, "SKIP", CARTESIAN))
            continue
        rng = random.Random(f"{seed}:{idx}")
        report.results.append(check_case(case, be, rng, cases_per_law))
    return report
