"""Exhaustive check of ``arrange`` against a brute-force leaf lookup.

Every pair (needed, given) of shape trees with at most five leaves over
{Int, Bool} where each needed leaf type occurs in given is arranged,
interpreted as wiring, compiled by the eval backend and run on 20 random
values of the given shape.  The expected output is built directly: the k-th
needed leaf of a type reads the k-th given leaf of that type (the last one
when given has fewer), and duplicated reads share the same value.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from operator import itemgetter

from garrows import ir
from garrows.backends.evaluate import compile_term
from garrows.derivation import arrange
from garrows.flatten import interp_arrangement
from garrows.values import UNIT, gen_value

VALUES_PER_PAIR = 20
MAX_LEAVES = 5


def trees(n: int) -> list[ir.ShapeTree]:
    if n == 1:
        return [ir.Leaf(ir.IntT()), ir.Leaf(ir.BoolT())]
    return [ir.Branch(l, r) for k in range(1, n) for l in trees(k) for r in trees(n - k)]


def all_shapes(max_leaves: int = MAX_LEAVES) -> list[ir.ShapeTree]:
    return [ir.EMPTY] + [t for n in range(1, max_leaves + 1) for t in trees(n)]


def lookup_sources(needed: ir.ShapeTree, given: ir.ShapeTree) -> list[int]:
    return list(_sources(_signature(needed), _signature(given)))


def _signature(s: ir.ShapeTree) -> str:
    return "".join(str(t)[0] for t in ir.leaves(s))


@lru_cache(maxsize=None)
def _sources(needed: str, given: str) -> tuple[int, ...]:
    seen: dict = {}
    out = []
    for t in needed:
        occ = [j for j, u in enumerate(given) if u == t]
        k = seen.get(t, 0)
        seen[t] = k + 1
        out.append(occ[min(k, len(occ) - 1)])
    return tuple(out)


def _paths(s: ir.ShapeTree, prefix: str) -> list[str]:
    if isinstance(s, ir.Branch):
        return _paths(s.l, prefix + ".l") + _paths(s.r, prefix + ".r")
    return [prefix]


def _flattener(s: ir.ShapeTree):
    """Positions of ``s`` read out of a value as a tuple (empty leaves included)."""
    return eval(f"lambda v: ({', '.join(_paths(s, 'v'))},)")


def _given_leaves(v, s: ir.ShapeTree, out: list) -> list:
    if isinstance(s, ir.Branch):
        _given_leaves(v.l, s.l, out)
        _given_leaves(v.r, s.r, out)
    elif isinstance(s, ir.Leaf):
        out.append(v)
    return out


def _expected_fn(needed: ir.ShapeTree, src: list[int]):
    """Map a given value's leaf list to the needed value's positions."""
    if isinstance(needed, ir.Empty):
        return lambda leaves: (UNIT,)
    if len(src) == 1:
        j = src[0]
        return lambda leaves: (leaves[j],)
    return itemgetter(*src)


def check_givens(indices: list[int], seed: int = 0) -> tuple[int, list[str]]:
    """Check every needed tree against the givens at ``indices``."""
    shapes = all_shapes()
    read = [_flattener(s) for s in shapes]
    kinds = [frozenset(ir.leaves(s)) for s in shapes]
    sigs = [_signature(s) for s in shapes]
    pairs = 0
    mismatches: list[str] = []
    for gi in indices:
        given = shapes[gi]
        rng = random.Random(f"{seed}:{gi}")
        values = [gen_value(given, rng) for _ in range(VALUES_PER_PAIR)]
        leaves = [_given_leaves(v, given, []) for v in values]
        for ni, needed in enumerate(shapes):
            if not kinds[ni] <= kinds[gi]:
                continue
            pairs += 1
            run = compile_term(interp_arrangement(arrange(needed, given)))
            got = list(map(read[ni], map(run, values)))
            want = list(map(_expected_fn(needed, _sources(sigs[ni], sigs[gi])), leaves))
            if got != want:
                mismatches.append(f"needed={needed} given={given}")
    return pairs, mismatches


def exhaustive_check(seed: int = 0, workers: int | None = None) -> tuple[int, list[str]]:
    """(pairs checked, mismatching pairs) over the full enumeration."""
    n = len(all_shapes())
    workers = workers or min(8, os.cpu_count() or 1)
    if workers <= 1:
        return check_givens(list(range(n)), seed)
    chunks = [list(range(i, n, workers)) for i in range(workers)]
    pairs, bad = 0, []
    with ProcessPoolExecutor(workers) as pool:
        for p, b in pool.map(check_givens, chunks, [seed] * workers):
            pairs += p
            bad += b
    return pairs, bad
