import json

import pytest

from garrows.cli import main

from helpers import BAD, CORPUS, GOLDEN

POW = str(CORPUS / "pow.ml")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_pow(capsys):
    code, out, _ = run(capsys, "run", POW, "--entry", "pow", "--args", "3", "--input", "2")
    assert (code, out.strip()) == (0, "8")


@pytest.mark.parametrize("backend", ["eval", "residual", "bi"])
def test_backends_agree(capsys, backend):
    code, out, _ = run(capsys, "run", POW, "--entry", "pow", "--args", "2", "--input", "-5",
                       "--backend", backend)
    assert (code, out.strip()) == (0, "25")


def test_flatten_matches_golden(capsys):
    code, out, _ = run(capsys, "flatten", POW, "--entry", "pow", "--args", "2")
    assert code == 0
    assert out.strip() == (GOLDEN / "pow_2.ir").read_text().strip()


def test_flatten_dump_derivation(capsys):
    code, _, err = run(capsys, "flatten", POW, "--entry", "pow", "--args", "1",
                       "--dump-derivation")
    assert code == 0 and "Abs x absorbed" in err and "Arrange (cont)" in err


def test_check(capsys):
    code, out, _ = run(capsys, "check", POW)
    assert (code, out.strip()) == (0, "pow : forall c. Int -> <[Int -> Int]>@c")


def test_diagram(capsys):
    code, out, _ = run(capsys, "diagram", POW, "--entry", "pow", "--args", "1")
    assert code == 0 and out.startswith("digraph")


def test_json_envelope(capsys):
    code, out, _ = run(capsys, "run", POW, "--entry", "pow", "--args", "2", "--input", "3",
                       "--format", "json")
    assert code == 0
    assert json.loads(out) == {"ok": True, "result": "9", "diagnostics": []}


def test_type_error_exit_code(capsys):
    code, out, err = run(capsys, "check", str(BAD / "escape_top.ml"))
    assert code == 1 and out == "" and "EscapeAtLevelZero" in err


def test_type_error_json(capsys):
    code, out, _ = run(capsys, "check", str(BAD / "occurs.ml"), "--format", "json")
    body = json.loads(out)
    assert code == 1 and body["ok"] is False and "OccursCheck" in body["diagnostics"][0]


def test_missing_file(capsys):
    code, _, err = run(capsys, "check", str(CORPUS / "missing.ml"))
    assert code == 1 and "cannot read" in err


def test_bad_arguments(capsys):
    assert main(["run"]) == 1
    assert main(["frobnicate"]) == 1
    capsys.readouterr()


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "flatten" in capsys.readouterr().out


def test_runtime_error(capsys):
    code, _, err = run(capsys, "run", POW, "--entry", "pow", "--args", "2", "--input", "true")
    assert code == 1 and "ShapeMismatch" in err


def test_bi_backward_missing_is_reported(capsys):
    code, out, _ = run(capsys, "run", POW, "--entry", "pow", "--args", "0", "--input", "4",
                       "--backend", "bi")
    assert (code, out.strip()) == (0, "1")


def test_laws(capsys):
    code, out, _ = run(capsys, "laws", "--backend", "bi", "--seed", "1", "--cases", "5")
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("SUMMARY backend=bi seed=1 cases=5")


def test_laws_json(capsys):
    code, out, _ = run(capsys, "laws", "--cases", "5", "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["ok"]
    report = json.loads(body["result"])
    assert report["failed"] == 0 and report["cases"] == 5


def test_internal_error_exit_code(capsys, monkeypatch):
    from garrows import workflows

    def boom(*a, **k):
        raise AssertionError("invariant")
    monkeypatch.setattr(workflows, "check", boom)
    code, _, err = run(capsys, "check", POW)
    assert code == 2 and "InternalError" in err
