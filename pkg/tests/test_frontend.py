import itertools
import random

import pytest

from garrows import ir
from garrows.errors import (EscapeAtLevelZero, GarrowError, SyntaxError_, TypeError_)
from garrows.frontend import parse, parse_expr, show_scheme, typecheck, typecheck_expr
from garrows.frontend.syntax import (App, Brak, Esc, GBool, GFun, GInt, GPair, GUnit, If, Lam,
                                     Let, LetRec, Lit, PrimOp, Var, show_term)

from helpers import CORPUS, bad_programs, source


class TestParse:
    def test_pow(self):
        prog = parse(source("pow.ml"))
        assert [d.name for d in prog] == ["pow"]
        assert prog[0].params == ["n"]
        assert isinstance(prog[0].body, If)
        assert isinstance(prog[0].body.t, Brak)

    def test_empty_program(self):
        assert parse("") == []
        assert parse("-- only a comment\n\n") == []

    def test_precedence(self):
        e = parse_expr("1 + 2 * 3 == 7")
        assert e == PrimOp("eq", [PrimOp("add", [Lit(ir.LInt(1)), PrimOp(
            "mult", [Lit(ir.LInt(2)), Lit(ir.LInt(3))])]), Lit(ir.LInt(7))])

    def test_application_binds_tighter_than_escape_operand(self):
        e = parse_expr(r"<[ \x -> ~f x ]>")
        assert e == Brak(Lam("x", None, App(Esc(Var("f")), Var("x"))))

    def test_continuation_lines(self):
        prog = parse("f x =\n  x + 1\ng = f 2\n")
        assert [d.name for d in prog] == ["f", "g"]

    @pytest.mark.parametrize("text", [
        "f = (1 + 2", "f = <[ 1 ", "= 3", "f = \\ -> 1", "f = 99999999999999999999",
        "f = let x = 1 x", "f = if true then 1",
    ])
    def test_syntax_errors(self, text):
        with pytest.raises(GarrowError) as info:
            typecheck(parse(text))
        assert isinstance(info.value, SyntaxError_) or info.value.code == "Overflow"

    def test_corpus_parses(self):
        for p in sorted(CORPUS.glob("*.ml")):
            assert parse(p.read_text())


class TestTypecheck:
    def schemes(self, name):
        return {d.name: show_scheme(d.scheme) for d in typecheck(parse(source(name)))}

    def test_pow_scheme(self):
        assert self.schemes("pow.ml")["pow"] == "forall c. Int -> <[Int -> Int]>@c"

    def test_guest_comp_scheme(self):
        s = self.schemes("guest_comp.ml")
        assert s["guest_comp"] == \
            "forall c. <[a -> b]>@c -> <[d -> a]>@c -> <[d -> b]>@c"

    def test_escape_at_top_level(self):
        with pytest.raises(EscapeAtLevelZero):
            typecheck(parse("f = ~x"))

    def test_whole_corpus_typechecks(self):
        for p in sorted(CORPUS.glob("*.ml")):
            assert typecheck(parse(p.read_text()))

    @pytest.mark.parametrize("name,text,expect", bad_programs(), ids=lambda x: str(x)[:20])
    def test_negative_corpus(self, name, text, expect):
        with pytest.raises(GarrowError) as info:
            typecheck(parse(text))
        assert info.value.code == expect

    def test_levels(self):
        t = typecheck_expr(parse_expr(r"<[ \x -> x + 1 ]>"))
        assert t.level == ()
        body = t.kids[0]
        assert len(body.level) == 1

    def test_literal_transport(self):
        t = typecheck_expr(parse_expr("<[ 1 ]>"))
        assert t.kids[0].transport
        assert not typecheck_expr(parse_expr("1")).transport

    def test_classifier_shared_by_splices(self):
        defs = typecheck(parse("f a b = <[ ~a + ~b ]>"))
        s = show_scheme(defs[0].scheme)
        assert s == "forall c. <[Int]>@c -> <[Int]>@c -> <[Int]>@c"


# ---------------------------------------------------------------------------
# conservativity over one-level programs

class _Ref:
    """Plain inference for one-level terms: unification, no generalization."""

    def __init__(self):
        self.sub = {}
        self.n = itertools.count()

    def var(self):
        return ("v", next(self.n))

    def find(self, t):
        while isinstance(t, tuple) and t[0] == "v" and t in self.sub:
            t = self.sub[t]
        return t

    def occurs(self, v, t):
        t = self.find(t)
        if t == v:
            return True
        return isinstance(t, tuple) and t[0] in ("fun", "pair") and \
            (self.occurs(v, t[1]) or self.occurs(v, t[2]))

    def unify(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if isinstance(a, tuple) and a[0] == "v":
            if self.occurs(a, b):
                raise ValueError("occurs")
            self.sub[a] = b
            return
        if isinstance(b, tuple) and b[0] == "v":
            self.unify(b, a)
            return
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0] and a[0] != "v":
            self.unify(a[1], b[1])
            self.unify(a[2], b[2])
            return
        raise ValueError("mismatch")

    def ml(self, t):
        if isinstance(t, GInt):
            return "int"
        if isinstance(t, GBool):
            return "bool"
        if isinstance(t, GUnit):
            return "unit"
        if isinstance(t, GFun):
            return ("fun", self.ml(t.dom), self.ml(t.cod))
        if isinstance(t, GPair):
            return ("pair", self.ml(t.l), self.ml(t.r))
        raise ValueError(t)

    def infer(self, e, env):
        if isinstance(e, Var):
            if e.name not in env:
                raise ValueError("unbound")
            return env[e.name]
        if isinstance(e, Lit):
            return {ir.LInt: "int", ir.LBool: "bool", ir.LUnit: "unit"}[type(e.lit)]
        if isinstance(e, Lam):
            a = self.ml(e.annot) if e.annot else self.var()
            return ("fun", a, self.infer(e.body, {**env, e.name: a}))
        if isinstance(e, App):
            f, a, r = self.infer(e.f, env), self.infer(e.a, env), self.var()
            self.unify(f, ("fun", a, r))
            return r
        if isinstance(e, Let):
            a = self.infer(e.bound, env)
            return self.infer(e.body, {**env, e.name: a})
        if isinstance(e, LetRec):
            a = self.ml(e.annot)
            inner = {**env, e.name: a}
            self.unify(self.infer(e.bound, inner), a)
            return self.infer(e.body, inner)
        if isinstance(e, If):
            self.unify(self.infer(e.c, env), "bool")
            t = self.infer(e.t, env)
            self.unify(t, self.infer(e.e, env))
            return t
        if isinstance(e, PrimOp):
            args = [self.infer(a, env) for a in e.args]
            if e.name in ("add", "sub", "mult", "eq"):
                for a in args:
                    self.unify(a, "int")
                return "bool" if e.name == "eq" else "int"
            if e.name == "pair":
                return ("pair", args[0], args[1])
            l, r = self.var(), self.var()
            self.unify(args[0], ("pair", l, r))
            return l if e.name == "fst" else r
        raise ValueError(e)


def reference_accepts(e) -> bool:
    try:
        _Ref().infer(e, {})
        return True
    except ValueError:
        return False


def random_term(rng: random.Random, scope: list[str], depth: int):
    leaves = [lambda: Lit(ir.LInt(rng.randint(0, 3))), lambda: Lit(ir.LBool(rng.random() < .5)),
              lambda: Lit(ir.LUnit())]
    if scope:
        leaves += [lambda: Var(rng.choice(scope))] * 3
    if depth == 0:
        return rng.choice(leaves)()
    fresh = f"x{len(scope)}"
    sub = lambda s=scope: random_term(rng, s, depth - 1)  # noqa: E731
    annots = [None, None, GInt(), GBool(), GFun(GInt(), GInt())]
    nodes = [
        lambda: Lam(fresh, rng.choice(annots), random_term(rng, scope + [fresh], depth - 1)),
        lambda: App(sub(), sub()),
        lambda: App(sub(), sub()),
        lambda: Let(fresh, sub(), random_term(rng, scope + [fresh], depth - 1)),
        lambda: If(sub(), sub(), sub()),
        lambda: PrimOp(rng.choice(["add", "sub", "mult", "eq", "pair"]), [sub(), sub()]),
        lambda: PrimOp(rng.choice(["fst", "snd"]), [sub()]),
        lambda: LetRec(fresh, GFun(GInt(), GInt()), random_term(rng, scope + [fresh], depth - 1),
                       random_term(rng, scope + [fresh], depth - 1)),
    ]
    return rng.choice(nodes + leaves)()


def test_conservative_over_one_level_terms():
    rng = random.Random(21)
    accepted = rejected = 0
    for _ in range(3000):
        e = random_term(rng, [], rng.randint(1, 4))
        want = reference_accepts(e)
        try:
            typecheck_expr(e)
            got = True
        except TypeError_:
            got = False
        assert got == want, show_term(e)
        accepted += got
        rejected += not got
    # both outcomes are exercised
    assert accepted > 200 and rejected > 200


def test_shown_terms_reparse():
    rng = random.Random(4)
    for _ in range(300):
        e = random_term(rng, [], 3)
        assert parse_expr(show_term(e)) == e
