"""Wiring-diagram backend emitting Graphviz DOT.

Structural combinators only re-route wires; computing combinators become
nodes.  The bodies of ``first``/``second``/``curryr`` sit in clusters.  Output
is a pure function of the term, so equal terms give identical bytes.
"""
from __future__ import annotations

from .. import ir

Wire = tuple[str, ir.GuestType]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Diagram:
    def __init__(self):
        self.count = 0
        self.clusters = 0
        self.buffers: list[list[str]] = [[]]
        self.edges: list[str] = []

    def node(self, label: str, shape: str = "box") -> str:
        name = f"n{self.count}"
        self.count += 1
        self.buffers[-1].append(f"{name} [label={_q(label)}, shape={shape}];")
        return name

    def wire(self, w: Wire, dst: str) -> None:
        self.edges.append(f"{w[0]} -> {dst} [label={_q(str(w[1]))}];")

    def consume(self, ws: list[Wire], dst: str) -> None:
        for w in ws:
            self.wire(w, dst)

    def open(self) -> None:
        self.buffers.append([])

    def close(self, label: str) -> None:
        body = self.buffers.pop()
        name = f"cluster_{self.clusters}"
        self.clusters += 1
        lines = [f"subgraph {name} {{", f"label={_q(label)};"] + body + ["}"]
        self.buffers[-1].extend(lines)

    def gate(self, label: str, ins: list[Wire], outs: list[ir.GuestType],
             shape: str = "box") -> list[Wire]:
        n = self.node(label, shape)
        self.consume(ins, n)
        return [(n, t) for t in outs]

    def walk(self, t: ir.GaTerm, ws: list[Wire]) -> list[Wire]:
        if isinstance(t, (ir.Id, ir.CancelL, ir.CancelR, ir.UncancelL, ir.UncancelR,
                          ir.Assoc, ir.Unassoc)):
            return ws
        if isinstance(t, ir.Comp):
            return self.walk(t.g, self.walk(t.f, ws))
        if isinstance(t, (ir.First, ir.Second)):
            d, _ = ir.ga_type_of(t.f)
            if isinstance(t, ir.First):
                k = len(ir.leaves(d))
                mine, rest = ws[:k], ws[k:]
            else:
                k = len(ir.leaves(t.z))
                rest, mine = ws[:k], ws[k:]
            self.open()
            if isinstance(t.f, ir.Id):
                out = self.gate("id", mine, [w[1] for w in mine], "point")
            else:
                out = self.walk(t.f, mine)
            self.close("first" if isinstance(t, ir.First) else "second")
            return out + rest if isinstance(t, ir.First) else rest + out
        if isinstance(t, ir.Swap):
            k = len(ir.leaves(t.x))
            return ws[k:] + ws[:k]
        if isinstance(t, ir.Copy):
            types = [w[1] for w in ws]
            return self.gate("copy", ws, types + types, "triangle")
        if isinstance(t, ir.Drop):
            return self.gate("drop", ws, [], "invtriangle")
        if isinstance(t, ir.Constant):
            return self.gate(f"constant {t.lit}", ws, [t.t], "ellipse")
        if isinstance(t, ir.Prim):
            return self.gate(t.name, ws, ir.leaves(t.out))
        if isinstance(t, ir.CurryR):
            _, c = ir.ga_type_of(t)
            out = self.gate("curry", ws, ir.leaves(c), "house")
            d, _ = ir.ga_type_of(t.f)
            self.open()
            inner = [(self.node("arg", "point"), ty) for ty in ir.leaves(d)]
            result = self.walk(t.f, inner)
            self.consume(result, self.node("ret", "point"))
            self.close("curry body")
            return out
        if isinstance(t, ir.ApplyR):
            return self.gate("apply", ws, [t.y], "house")
        if isinstance(t, ir.LoopR):
            loop = self.node("loop", "doublecircle")
            zs = ir.leaves(t.z)
            fed = [(loop, ty) for ty in zs]
            out = self.walk(t.f, ws + fed)
            k = len(out) - len(zs)
            self.consume(out[k:], loop)
            return out[:k]
        if isinstance(t, ir.Merge):
            return self.gate("merge", ws, [t.x], "invtriangle")
        if isinstance(t, ir.Never):
            return self.gate("never", ws, [t.x], "ellipse")
        if isinstance(t, ir.InjL):
            return self.gate("inl", ws, [ir.SumT(t.x, t.y)])
        if isinstance(t, ir.InjR):
            return self.gate("inr", ws, [ir.SumT(t.x, t.y)])
        raise TypeError(f"not a GaTerm: {t!r}")


def to_dot(t: ir.GaTerm, name: str = "garrow") -> str:
    d, c = ir.ga_type_of(t)
    g = _Diagram()
    inputs = []
    for i, ty in enumerate(ir.leaves(d)):
        g.buffers[0].append(f"in{i} [label={_q(f'in{i}')}, shape=plaintext];")
        inputs.append((f"in{i}", ty))
    outs = g.walk(t, inputs)
    for i, w in enumerate(outs):
        g.buffers[0].append(f"out{i} [label={_q(f'out{i}')}, shape=plaintext];")
        g.wire(w, f"out{i}")
    lines = [f"digraph {name} {{", "rankdir=LR;"]
    lines += ["  " + ln for ln in g.buffers[0]]
    lines += ["  " + e for e in g.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"
