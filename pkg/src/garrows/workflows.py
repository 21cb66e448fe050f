"""Whole-program workflows shared by the command line and the HTTP service."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import ir
from .backends import bi_interpret, eval_interpret, residualize, to_dot
from .backends.evaluate import DEFAULT_FUEL
from .derivation import render as render_derivation
from .errors import UserError
from .flatten import DEFAULT_STEPS, Stager, parse_literal_arg
from .frontend import parse, parse_expr, show_scheme, typecheck, typecheck_expr
from .irtext import render_ir
from .laws import run_law_suite
from .oracle import Oracle, term_value, value_term
from .frontend.syntax import App
from .values import VCode, Value, format_value


@dataclass
class Outcome:
    result: str
    diagnostics: list[str] = field(default_factory=list)


def check(source: str) -> Outcome:
    defs = typecheck(parse(source))
    return Outcome("\n".join(f"{d.name} : {show_scheme(d.scheme)}" for d in defs))


def stage(source: str, entry: str, args: list[str], steps: int = DEFAULT_STEPS):
    """Code value of ``entry`` applied to literal ``args``, plus the stager used."""
    defs = typecheck(parse(source))
    st = Stager(defs, steps)
    if entry not in st.defs:
        raise UserError(f"no definition named {entry}")
    values = [parse_literal_arg(a) for a in args]
    v = st.apply(st.global_value(entry), *values)
    if not isinstance(v, VCode):
        raise UserError(f"{entry} does not evaluate to code (got {format_value(v)})")
    return v.term, st


def _derivation_dump(st: Stager) -> list[str]:
    return [render_derivation(d) for d in st.derivations.values()]


def flatten(source: str, entry: str, args: list[str], fmt: str = "ir",
            dump_derivation: bool = False) -> Outcome:
    term, st = stage(source, entry, args)
    if fmt == "dot":
        text = to_dot(term).rstrip("\n")
    else:
        text = render_ir(term)
    return Outcome(text, _derivation_dump(st) if dump_derivation else [])


def diagram(source: str, entry: str, args: list[str]) -> Outcome:
    return flatten(source, entry, args, fmt="dot")


def run(source: str, entry: str, args: list[str], input_text: str | None,
        backend: str = "eval", fuel: int = DEFAULT_FUEL) -> Outcome:
    term, _ = stage(source, entry, args)
    d, _ = ir.ga_type_of(term)
    value: Value = parse_literal_arg(input_text if input_text is not None else "()")
    if backend == "eval":
        return Outcome(format_value(eval_interpret(term, value, fuel)))
    if backend == "bi":
        return Outcome(format_value(bi_interpret(term, fuel).fwd(value)))
    if backend == "residual":
        text = residualize(term)
        prog = parse_expr(text)
        typecheck_expr(prog)
        out = Oracle().eval(App(prog, value_term(value)))
        return Outcome(format_value(term_value(out)), [f"residual: {text}"])
    raise UserError(f"unknown backend {backend}")


def residual(source: str, entry: str, args: list[str]) -> Outcome:
    term, _ = stage(source, entry, args)
    return Outcome(residualize(term))


def laws(backend: str = "eval", seed: int = 42, cases: int = 100,
         fmt: str = "text") -> tuple[Outcome, bool]:
    if backend not in ("eval", "bi"):
        raise UserError(f"the law suite runs on eval or bi, not {backend}")
    report = run_law_suite(backend, seed, cases)
    text = report.json_text() if fmt == "json" else report.text()
    return Outcome(text.rstrip("\n")), report.ok
