import json

from garrows import ir
from garrows.backends import compile_term
from garrows.backends.bi import is_invertible
from garrows.values import VInt, VPair
from garrows.laws import (BACKENDS, CARTESIAN, Backend, law_catalog, run_law_suite)


def test_both_sides_share_a_type():
    for inv in (False, True):
        for seed in range(5):
            for case in law_catalog(seed, inv):
                assert ir.ga_type_of(case.lhs) == ir.ga_type_of(case.rhs), case.name
                assert ir.dom(case.lhs) == case.shape


def test_catalog_layout():
    names = [c.name for c in law_catalog(0)]
    assert len(names) == len(set(names))
    groups = {n.split(".")[0] for n in names}
    assert groups == {f"L{i}" for i in range(1, 13)}
    for c in law_catalog(0):
        assert (c.applicability == CARTESIAN) == c.name.startswith(("L11", "L12"))


def test_invertible_catalog_stays_invertible():
    for c in law_catalog(3, invertible_only=True):
        if c.applicability != CARTESIAN:
            assert is_invertible(c.lhs) or c.name.startswith(("L8", "L9", "L10"))


def test_deterministic_reports():
    for backend in ("eval", "bi"):
        a = run_law_suite(backend, seed=7, cases_per_law=20)
        b = run_law_suite(backend, seed=7, cases_per_law=20)
        assert a.text() == b.text()
        assert a.json_text() == b.json_text()


def test_skips_on_non_cartesian_backend():
    report = run_law_suite("bi", seed=1, cases_per_law=10)
    skipped = [r.name for r in report.results if r.status == "SKIP"]
    assert skipped and all(n.startswith(("L11", "L12")) for n in skipped)
    assert run_law_suite("eval", seed=1, cases_per_law=10).count("SKIP") == 0


def _negate(v):
    if isinstance(v, VPair):
        return VPair(_negate(v.l), _negate(v.r))
    return VInt(-v.i) if isinstance(v, VInt) else v


def test_broken_backend_is_caught():
    """Corrupting composites that start with a copy must break the copy laws."""
    def observe(t):
        run = compile_term(t)
        corrupt = isinstance(t, ir.Comp) and isinstance(t.f, ir.Copy)
        return lambda v: ("ok", _negate(run(v)) if corrupt else run(v))

    broken = Backend("broken", True, False, observe, BACKENDS["eval"].equal)
    report = run_law_suite(broken, seed=42, cases_per_law=50)
    failed = {r.name.split("[")[0] for r in report.failed}
    assert failed & {"L8.copy-drop-left", "L8.copy-drop-right", "L10.copy-assoc"}
    assert all(r.counterexample for r in report.failed)


def test_json_shape():
    report = run_law_suite("eval", seed=3, cases_per_law=5)
    data = json.loads(report.json_text())
    assert data["backend"] == "eval" and data["seed"] == 3 and data["cases"] == 5
    assert data["passed"] + data["failed"] + data["skipped"] == len(data["laws"])
    assert all(set(l) == {"name", "status", "counterexample"} for l in data["laws"])


def test_text_summary_line():
    text = run_law_suite("eval", seed=3, cases_per_law=5).text()
    last = text.strip().splitlines()[-1]
    assert last.startswith("SUMMARY backend=eval seed=3 cases=5 pass=")


def test_shape_seed_changes_instances():
    a = [c.lhs for c in law_catalog(1)]
    b = [c.lhs for c in law_catalog(2)]
    assert a != b
