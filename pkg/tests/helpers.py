"""Shared corpus table and value generators for the test modules."""
from __future__ import annotations

import random
from pathlib import Path

from garrows.values import UNIT, VBool, VInt, VPair

HERE = Path(__file__).parent
CORPUS = HERE / "corpus"
BAD = HERE / "bad"
GOLDEN = HERE / "golden"


def source(name: str) -> str:
    return (CORPUS / name).read_text()


def _int(rng):
    return VInt(rng.randint(-20, 20))


def _nat(rng):
    return VInt(rng.randint(0, 10))


def _bool(rng):
    return VBool(rng.random() < 0.5)


def _pair(rng):
    return VPair(VInt(rng.randint(-9, 9)), VBool(rng.random() < 0.5))


def _unit(rng):
    return UNIT


# (file, entry, level-0 args, input generator)
PROGRAMS = [
    ("pow.ml", "pow", [VInt(3)], _int),
    ("guest_id.ml", "guest_id", [], _int),
    ("guest_comp.ml", "main", [], _int),
    ("let_square.ml", "square_sum", [], _int),
    ("letrec_fact.ml", "fact", [], _nat),
    ("pipeline.ml", "main", [VInt(2)], _int),
    ("select.ml", "select", [], _int),
    ("curry.ml", "add10", [], _int),
    ("lift.ml", "offset", [VInt(3)], _int),
    ("pairs.ml", "swap", [], _pair),
    ("pairs.ml", "dup", [], _int),
    ("twice.ml", "main", [], _int),
    ("mkpow.ml", "mkpow", [VInt(3)], _int),
    ("notes.ml", "negate_bool", [], _bool),
    ("constant.ml", "answer", [], _unit),
]


def program_id(case) -> str:
    return f"{case[0]}:{case[1]}"


def bad_programs():
    out = []
    for p in sorted(BAD.glob("*.ml")):
        text = p.read_text()
        expect = text.splitlines()[0].split("expect:")[1].strip()
        out.append((p.name, text, expect))
    return out


def rng_for(tag: str) -> random.Random:
    return random.Random(tag)
