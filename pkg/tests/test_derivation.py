import random

import pytest

import arrangement_oracle
from garrows import ir
from garrows.derivation import (AComp, ACont, AExch, AId, ALeft, AuCanL, AuCanR, AWeak, DAbs,
                                DArrange, DBrak, DLit, DPrim, DVar, arr_check, arr_src, arr_tgt,
                                arrange, arrange_sources, elaborate, erase, required_context,
                                type_sources)
from garrows.errors import MissingLeaf
from garrows.flatten import interp_arrangement
from garrows.backends import compile_term
from garrows.frontend import parse, parse_expr, typecheck, typecheck_expr
from garrows.frontend.syntax import Brak, alpha_equivalent
from garrows.laws import gen_shape
from garrows.values import UNIT, VBool, VInt, VPair, gen_value

from helpers import CORPUS

INT, BOOL, E = ir.Leaf(ir.INT), ir.Leaf(ir.BOOL), ir.EMPTY
B = ir.Branch


def brackets(t, out=None):
    out = [] if out is None else out
    if isinstance(t.node, Brak):
        out.append(t)
    for k in t.kids:
        brackets(k, out)
    return out


def head(a):
    while isinstance(a, AComp):
        a = a.first
    return a


class TestArrange:
    def test_identity(self):
        for s in (INT, B(INT, BOOL), E):
            assert arrange(s, s) == AId(s)

    def test_contraction(self):
        assert isinstance(head(arrange(B(INT, INT), INT)), ACont)

    def test_projection(self):
        a = arrange(INT, B(INT, BOOL))
        assert a == AComp(AuCanR(INT), ALeft(AWeak(BOOL), INT))
        run = compile_term(interp_arrangement(a))
        assert run(VPair(VInt(4), VBool(True))) == VInt(4)

    def test_exchange(self):
        assert arrange(B(BOOL, INT), B(INT, BOOL)) == AExch(BOOL, INT)

    def test_missing_leaf(self):
        with pytest.raises(MissingLeaf):
            arrange(BOOL, INT)
        with pytest.raises(MissingLeaf):
            type_sources(B(INT, BOOL), B(INT, INT))

    def test_endpoints(self):
        shapes = arrangement_oracle.all_shapes(4)
        rng = random.Random(1)
        for _ in range(2000):
            n, g = rng.choice(shapes), rng.choice(shapes)
            if not set(ir.leaves(n)) <= set(ir.leaves(g)):
                continue
            a = arrange(n, g)
            assert arr_src(a) == n and arr_tgt(a) == g
            arr_check(a)

    def test_repeated_types_match_left_to_right(self):
        assert type_sources(B(INT, INT), B(INT, B(BOOL, INT))) == [0, 2]
        assert type_sources(B(INT, B(INT, INT)), B(BOOL, INT)) == [1, 1, 1]


def build_expected(needed, leaves, src, k=None):
    """Needed-shaped value from given leaf values, empty positions as unit."""
    k = k if k is not None else [0]
    if isinstance(needed, ir.Branch):
        left = build_expected(needed.l, leaves, src, k)
        return VPair(left, build_expected(needed.r, leaves, src, k))
    if isinstance(needed, ir.Leaf):
        v = leaves[src[k[0]]]
        k[0] += 1
        return v
    return UNIT


def test_shapes_with_empty_leaves():
    rng = random.Random(31)
    checked = 0
    while checked < 3000:
        n, g = gen_shape(rng, 3), gen_shape(rng, 3)
        if not set(ir.leaves(n)) <= set(ir.leaves(g)):
            continue
        run = compile_term(interp_arrangement(arrange(n, g)))
        src = arrangement_oracle.lookup_sources(n, g)
        for _ in range(3):
            v = gen_value(g, rng)
            leaves = arrangement_oracle._given_leaves(v, g, [])
            assert run(v) == build_expected(n, leaves, src), (n, g)
        checked += 1


def test_oracle_catches_a_wrong_source_map(monkeypatch):
    def last_occurrence(needed, given):
        src = type_sources(needed, given)
        gl = ir.leaves(given)
        wrong = [max(j for j, t in enumerate(gl) if t == gl[i]) for i in src]
        return arrange_sources(needed, given, wrong)

    monkeypatch.setattr(arrangement_oracle, "arrange", last_occurrence)
    shapes = arrangement_oracle.all_shapes()
    picks = [i for i, s in enumerate(shapes) if ir.leaves(s).count(ir.INT) >= 2][:3]
    pairs, mismatches = arrangement_oracle.check_givens(picks)
    assert pairs and mismatches


def test_oracle_agrees_on_a_sample():
    pairs, mismatches = arrangement_oracle.check_givens([0, 1, 5, 40, 200, 550])
    assert pairs > 0 and not mismatches


class TestRequiredContext:
    def kids_of(self, src):
        return typecheck_expr(parse_expr(src)).kids[0]

    def test_var_and_literal(self):
        lam = self.kids_of(r"<[ \x -> x + 1 ]>")
        plus = lam.kids[0]
        x, one = plus.kids
        assert required_context(x) == INT
        assert required_context(one) == E

    def test_pow_body(self):
        defs = typecheck(parse((CORPUS / "pow.ml").read_text()))
        body = brackets(defs[0].body)[1].kids[0].kids[0]
        assert required_context(body) == B(INT, INT)


class TestElaborate:
    def test_constant_body(self):
        d = elaborate(typecheck_expr(parse_expr(r"<[ \x -> 1 ]>")))
        assert isinstance(d, DBrak)
        abs_ = d.d
        assert isinstance(abs_, DAbs) and isinstance(abs_.d, DArrange)
        assert isinstance(head(abs_.d.arr), AWeak)
        assert isinstance(abs_.d.d, DLit) and abs_.d.d.transport

    def test_inner_identity(self):
        d = elaborate(typecheck_expr(parse_expr(r"<[ (\x -> x) 1 ]>")))
        inner = [n for n in walk(d) if isinstance(n, DAbs)][0]
        assert isinstance(inner.d, DArrange) and inner.d.arr == AuCanL(INT)
        assert isinstance(inner.d.d, DVar)

    def test_pow_body_contracts_x(self):
        defs = typecheck(parse((CORPUS / "pow.ml").read_text()))
        d = elaborate(brackets(defs[0].body)[1])
        arr = d.d.d
        assert isinstance(arr, DArrange) and isinstance(head(arr.arr), ACont)
        assert arr.arr.s == INT
        assert isinstance(arr.d, DPrim) and arr.d.name == "mult"

    def test_contexts_meet_at_arrangements(self):
        for t in corpus_brackets():
            for n in walk(elaborate(t)):
                if isinstance(n, DArrange):
                    assert arr_src(n.arr) == n.d.ctx
                    assert arr_tgt(n.arr) == n.ctx

    def test_erase_reconstructs(self):
        count = 0
        for t in corpus_brackets():
            assert alpha_equivalent(erase(elaborate(t)), t.node)
            count += 1
        assert count >= 14


def corpus_brackets():
    for p in sorted(CORPUS.glob("*.ml")):
        for d in typecheck(parse(p.read_text())):
            yield from brackets(d.body)


def walk(d):
    yield d
    for v in vars(d).values():
        if isinstance(v, list):
            for x in v:
                if hasattr(x, "ctx"):
                    yield from walk(x)
        elif hasattr(v, "ctx") and hasattr(v, "keys"):
            yield from walk(v)
