"""Command-line driver.

Exit status: 0 on success, 1 for user errors (syntax, type, value), 2 for
internal invariant violations.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import workflows
from .backends.evaluate import DEFAULT_FUEL
from .errors import GarrowError, UserError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="garrows",
                                description="Typecheck and flatten two-level programs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, entry=True):
        sp.add_argument("file")
        if entry:
            sp.add_argument("--entry", required=True, help="definition to stage")
            sp.add_argument("--args", nargs="*", default=[], help="level-0 literal arguments")
        sp.add_argument("--format", choices=["ir", "dot", "text", "json"], default=None)

    common(sub.add_parser("check", help="parse and typecheck, print each definition's type"),
           entry=False)
    fl = sub.add_parser("flatten", help="print the combinator term of a code value")
    common(fl)
    fl.add_argument("--dump-derivation", action="store_true",
                    help="print bracket derivations on stderr")
    rn = sub.add_parser("run", help="flatten, then apply a backend to an input value")
    common(rn)
    rn.add_argument("--input", default=None)
    rn.add_argument("--backend", choices=["eval", "residual", "bi"], default="eval")
    rn.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    common(sub.add_parser("diagram", help="print a DOT wiring diagram"))
    lw = sub.add_parser("laws", help="run the law suite")
    lw.add_argument("--backend", choices=["eval", "bi"], default="eval")
    lw.add_argument("--seed", type=int, default=42)
    lw.add_argument("--cases", type=int, default=100)
    lw.add_argument("--format", choices=["text", "json"], default="text")
    return p


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UserError(f"cannot read {path}: {e.strerror}") from None


def _dispatch(ns) -> tuple[workflows.Outcome, bool]:
    if ns.command == "laws":
        return workflows.laws(ns.backend, ns.seed, ns.cases,
                              "json" if ns.format == "json" else "text")
    source = _read(ns.file)
    if ns.command == "check":
        return workflows.check(source), True
    if ns.command == "flatten":
        fmt = "dot" if ns.format == "dot" else "ir"
        return workflows.flatten(source, ns.entry, ns.args, fmt, ns.dump_derivation), True
    if ns.command == "diagram":
        return workflows.diagram(source, ns.entry, ns.args), True
    if ns.command == "run":
        return workflows.run(source, ns.entry, ns.args, ns.input, ns.backend, ns.fuel), True
    raise UserError(f"unknown command {ns.command}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    as_json = ns.format == "json"
    filename = getattr(ns, "file", None)
    try:
        outcome, ok = _dispatch(ns)
        status = 0 if ok else 1
    except GarrowError as e:
        msg = e.render(filename)
        status = 1 if isinstance(e, UserError) else 2
        outcome, ok = workflows.Outcome("", [msg]), False
    except Exception as e:  # invariant violations surface as exit 2
        outcome, ok = workflows.Outcome("", [f"InternalError: {type(e).__name__}: {e}"]), False
        status = 2
    if as_json:
        print(json.dumps({"ok": ok, "result": outcome.result,
                          "diagnostics": outcome.diagnostics}))
    else:
        if outcome.result:
            print(outcome.result)
        for d in outcome.diagnostics:
            print(d, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
