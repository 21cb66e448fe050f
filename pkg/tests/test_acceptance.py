"""Acceptance gate: one line per criterion, PASS or FAIL, at the stated tolerance."""
from __future__ import annotations

import random
import time

import pytest

from garrows import ir, workflows
from garrows.backends import bi_interpret, residualize
from garrows.backends.bi import is_invertible
from garrows.cli import main
from garrows.errors import GarrowError, NonInvertible
from garrows.flatten import stage_entry
from garrows.frontend import parse, parse_expr, typecheck, typecheck_expr
from garrows.frontend.syntax import CName, Code, GFun, TVar
from garrows.frontend.typecheck import alpha_equal
from garrows.laws import gen_morphism, gen_shape, run_law_suite
from garrows.oracle import Oracle
from garrows.values import VInt, gen_value

from arrangement_oracle import exhaustive_check
from helpers import CORPUS, GOLDEN, PROGRAMS, bad_programs, program_id, source


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def test_criterion_1_pow_flattening(report, capsys):
    path = str(CORPUS / "pow.ml")
    start = time.perf_counter()
    outputs = {}
    for n in range(4):
        assert main(["flatten", path, "--entry", "pow", "--args", str(n)]) == 0
        outputs[n] = capsys.readouterr().out.strip()
    elapsed = time.perf_counter() - start
    exact = outputs[0] == "(comp (drop) (constant 1))"
    golden = all(outputs[n] == (GOLDEN / f"pow_{n}.ir").read_text().strip() for n in range(1, 4))
    ok = exact and golden and elapsed < 1.0
    report(1, ok, f"pow 0 exact={exact} pow 1..3 golden={golden} time={elapsed:.3f}s (<1s)")
    assert ok


def test_criterion_2_semantic_adequacy(report):
    text = source("pow.ml")
    oracle = Oracle(parse(text))
    start = time.perf_counter()
    wrong = []
    for n in range(7):
        residual = oracle.residual_of("pow", [VInt(n)])
        for x in range(-3, 4):
            got = workflows.run(text, "pow", [str(n)], str(x), "eval").result
            want = oracle.apply(residual, VInt(x))
            if got != str(x ** n) or want != VInt(x ** n):
                wrong.append((n, x, got, want))
    elapsed = time.perf_counter() - start
    ok = not wrong and elapsed < 1.0
    report(2, ok, f"49 runs mismatches={len(wrong)} time={elapsed:.3f}s (<1s)")
    assert ok, wrong[:5]


def test_criterion_3_law_suite(report):
    start = time.perf_counter()
    ev = run_law_suite("eval", seed=42, cases_per_law=100)
    bi = run_law_suite("bi", seed=42, cases_per_law=100)
    elapsed = time.perf_counter() - start
    cartesian = [r for r in ev.results if r.name.startswith(("L11", "L12"))]
    bi_core = [r for r in bi.results if not r.name.startswith(("L11", "L12"))]
    ok = (ev.ok and bi.ok and ev.count("SKIP") == 0 and cartesian
          and all(r.status == "PASS" for r in cartesian)
          and bi_core and all(r.status == "PASS" for r in bi_core)
          and elapsed < 10.0)
    report(3, ok, f"eval pass={ev.count('PASS')} fail={ev.count('FAIL')} "
                  f"bi pass={bi.count('PASS')} fail={bi.count('FAIL')} "
                  f"skip={bi.count('SKIP')} time={elapsed:.2f}s (<10s)")
    assert ok


def test_criterion_4_arrangement_oracle(report):
    start = time.perf_counter()
    pairs, mismatches = exhaustive_check(seed=0)
    elapsed = time.perf_counter() - start
    ok = pairs > 0 and not mismatches and elapsed < 60.0
    report(4, ok, f"pairs={pairs} values/pair=20 mismatches={len(mismatches)} "
                  f"time={elapsed:.1f}s (<60s)")
    assert ok, mismatches[:5]


def test_criterion_5_non_destructive(report):
    programs = sorted({p[0] for p in PROGRAMS})
    failures = []
    for name, entry, args, gen in PROGRAMS:
        prog = parse(source(name))
        code = stage_entry(typecheck(prog), entry, args).term
        text = residualize(code)
        try:
            reparsed = parse_expr(text)
            typecheck_expr(reparsed)
        except GarrowError as e:
            failures.append(f"{program_id((name, entry))}: {e}")
            continue
        oracle = Oracle(prog)
        reference = oracle.residual_of(entry, args)
        rng = random.Random(f"adequacy:{name}:{entry}")
        for _ in range(20):
            v = gen(rng)
            if Oracle().apply(reparsed, v) != oracle.apply(reference, v):
                failures.append(f"{program_id((name, entry))} on {v}")
                break
    ok = len(programs) >= 10 and not failures
    report(5, ok, f"programs={len(programs)} entries={len(PROGRAMS)} inputs/entry=20 "
                  f"mismatches={len(failures)}")
    assert ok, failures


def _expected_guest_comp():
    x, y, z = TVar(-1), TVar(-2), TVar(-3)
    c = CName("c")
    return GFun(Code(GFun(y, z), c), GFun(Code(GFun(x, y), c), Code(GFun(x, z), c)))


def test_criterion_6_typechecker(report):
    defs = {d.name: d for d in typecheck(parse(source("guest_comp.ml")))}
    scheme = defs["guest_comp"].scheme
    shape_ok = alpha_equal(scheme.type, _expected_guest_comp()) and len(scheme.cvars) == 1
    wrong = []
    bad = bad_programs()
    for name, text, expect in bad:
        try:
            typecheck(parse(text))
            wrong.append(f"{name}: accepted")
        except GarrowError as e:
            if e.code != expect:
                wrong.append(f"{name}: {e.code} != {expect}")
    codes = {expect for _, _, expect in bad}
    designated = {"EscapeAtLevelZero", "ClassifierMismatch"} <= codes
    ok = shape_ok and len(bad) >= 8 and designated and not wrong
    report(6, ok, f"guest_comp scheme matches={shape_ok} negative programs={len(bad)} "
                  f"wrong codes={len(wrong)}")
    assert ok, wrong


def _invertible_corpus() -> list[ir.GaTerm]:
    rng = random.Random("invertible")
    INT = ir.Leaf(ir.INT)
    terms = [
        ir.compose(ir.Prim("succ", INT, INT), ir.Prim("succ", INT, INT)),
        ir.Comp(ir.Swap(INT, ir.Leaf(ir.BOOL)), ir.Second(ir.Prim("neg", INT, INT), ir.Leaf(ir.BOOL))),
        ir.Comp(ir.Copy(INT), ir.First(ir.Prim("pred", INT, INT), INT)),
    ]
    while len(terms) < 200:
        terms.append(gen_morphism(gen_shape(rng), rng, 3, invertible=True))
    for name, entry, args, _ in PROGRAMS:
        code = stage_entry(typecheck(parse(source(name))), entry, args).term
        if is_invertible(code):
            # polymorphic entries are exercised at Int
            terms.append(ir.map_types(code, lambda ty: ir.subst_type(
                ty, {v: ir.INT for v in ir.type_vars(ty)})))
    return terms


def test_criterion_7_bigarrow(report):
    rng = random.Random("bi-roundtrip")
    corpus = _invertible_corpus()
    assert all(is_invertible(t) for t in corpus)
    broken = []
    for t in corpus:
        m = bi_interpret(t)
        d = ir.dom(t)
        for _ in range(20):
            v = gen_value(d, rng)
            if m.bwd(m.fwd(v)) != v:
                broken.append(f"{t} on {v}")
                break
    missing = []
    INT = ir.Leaf(ir.INT)
    for t, probe in ((ir.Drop(INT), "()"), (ir.Constant(ir.LInt(7), ir.INT), "7")):
        m = bi_interpret(t)
        try:
            m.bwd(workflows.parse_literal_arg(probe))
            missing.append(f"{type(t).__name__} bwd returned")
        except NonInvertible:
            pass
        except Exception as e:          # anything else is not the designated error
            missing.append(f"{type(t).__name__} bwd raised {type(e).__name__}")
    ok = not broken and not missing
    report(7, ok, f"invertible terms={len(corpus)} roundtrip failures={len(broken)} "
                  f"drop/constant NonInvertible={not missing}")
    assert ok, broken[:3] + missing
