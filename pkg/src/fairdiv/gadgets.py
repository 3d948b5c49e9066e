"""Generators for hardness-reduction instances.

Circuits over INPUT/TRUE/NOT/OR gates compile to bi-valued symmetric
multigraphs whose EFX0 orientations encode satisfying assignments: every
signal is a heavy edge whose direction is its truth value, fan-out goes
through duplication gadgets, and the circuit output is forced true by
identifying its edge with the output edge of a TRUE gadget (the direction of
which is forced in every EFX0 orientation).  Partition sets compile to tiny
chores multigraphs whose EF1/EFX0 orientations encode equipartitions.

These generators are exercised by small-scale biconditional suites against
the brute-force oracles, not by proofs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import Edge, Multigraph, parse_rational
from .efx_multigraph import BiValuedGraph, classify_components

INPUT = "input"
TRUE = "true"
NOT = "not"
OR = "or"

_ARITY = {INPUT: 0, TRUE: 0, NOT: 1, OR: 2}


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    inputs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Circuit:
    """A combinational circuit; gates reference earlier gates only, AND is
    rejected (callers rewrite it with NOT/OR)."""

    gates: tuple[Gate, ...]
    output: str

    def __post_init__(self):
        seen: set[str] = set()
        for gate in self.gates:
            if gate.kind == "and":
                raise ValueError("AND gates are not supported; rewrite via NOT/OR")
            if gate.kind not in _ARITY:
                raise ValueError(f"unknown gate kind {gate.kind!r}")
            if len(gate.inputs) != _ARITY[gate.kind]:
                raise ValueError(f"gate {gate.id!r} has wrong arity")
            if gate.id in seen:
                raise ValueError(f"duplicate gate id {gate.id!r}")
            for ref in gate.inputs:
                if ref not in seen:
                    raise ValueError(f"gate {gate.id!r} references undefined {ref!r}")
            seen.add(gate.id)
        if self.output not in seen:
            raise ValueError(f"output gate {self.output!r} is not defined")

    def variables(self) -> list[str]:
        return [g.id for g in self.gates if g.kind == INPUT]

    def gate(self, gid: str) -> Gate:
        return next(g for g in self.gates if g.id == gid)


def parse_circuit(text: str) -> Circuit:
    """One gate per line: `id = INPUT | TRUE | NOT x | OR x y`; last line
    `OUTPUT id`.  Blank lines and #-comments are skipped."""
    gates: list[Gate] = []
    output: str | None = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        upper_tokens = line.split()
        if upper_tokens[0].upper() == "OUTPUT":
            if len(upper_tokens) != 2:
                raise ValueError(f"malformed OUTPUT line: {raw!r}")
            output = upper_tokens[1]
            continue
        if "=" not in line:
            raise ValueError(f"malformed gate line: {raw!r}")
        name, rhs = (part.strip() for part in line.split("=", 1))
        tokens = rhs.split()
        kind = tokens[0].lower()
        gates.append(Gate(name, kind, tuple(tokens[1:])))
    if output is None:
        raise ValueError("missing OUTPUT line")
    return Circuit(tuple(gates), output)


def evaluate_circuit(c: Circuit, assignment: dict[str, bool]) -> bool:
    values: dict[str, bool] = {}
    for gate in c.gates:
        if gate.kind == INPUT:
            values[gate.id] = assignment[gate.id]
        elif gate.kind == TRUE:
            values[gate.id] = True
        elif gate.kind == NOT:
            values[gate.id] = not values[gate.inputs[0]]
        else:
            values[gate.id] = values[gate.inputs[0]] or values[gate.inputs[1]]
    return values[c.output]


def circuit_satisfiable(c: Circuit) -> Optional[dict[str, bool]]:
    """First satisfying assignment with False < True, or None."""
    names = c.variables()
    for bits in itertools.product((False, True), repeat=len(names)):
        assignment = dict(zip(names, bits))
        if evaluate_circuit(c, assignment):
            return assignment
    return None


# ---------------------------------------------------------------------------
# Circuit -> bi-valued multigraph


@dataclass(frozen=True)
class _Signal:
    """A heavy signal edge: directing it toward `t` means the signal is true."""

    edge_id: str
    t: int
    f: int


class _GadgetBuilder:
    def __init__(self, alpha: Fraction, beta: Fraction, q: int):
        self.alpha = alpha
        self.beta = beta
        self.q = q
        self.vertex_count = 0
        self.colors: list[int] = []
        self.edges: list[Edge] = []

    def vertex(self, color: int) -> int:
        self.vertex_count += 1
        self.colors.append(color)
        return self.vertex_count - 1

    def _edge(self, u: int, v: int, weight: Fraction) -> str:
        eid = f"e{len(self.edges) + 1}"
        self.edges.append(Edge(eid, u, v, weight, weight))
        assert self.colors[u] != self.colors[v], "gadget wiring must stay bipartite"
        return eid

    def heavy(self, u: int, v: int) -> str:
        return self._edge(u, v, self.alpha)

    def light(self, u: int, v: int, count: int = 1) -> list[str]:
        return [self._edge(u, v, self.beta) for _ in range(count)]

    def fresh_signal(self) -> _Signal:
        t = self.vertex(0)
        f = self.vertex(1)
        return _Signal(self.heavy(t, f), t, f)

    def duplicate(self, signal: _Signal) -> _Signal:
        """Duplication gadget: a parallel-truth copy of a signal edge, wired
        by two crossing light edges."""
        c = self.vertex(0)
        d = self.vertex(1)
        copy = _Signal(self.heavy(c, d), c, d)
        self.light(signal.t, d)
        self.light(signal.f, c)
        return copy

    def true_gadget(self, merge: _Signal | None = None) -> _Signal:
        """TRUE gadget; its output edge is forced toward v9 in every EFX0
        orientation.  With `merge`, that output edge is the given signal."""
        if merge is None:
            v9 = self.vertex(0)
            v8 = self.vertex(1)
            out = _Signal(self.heavy(v8, v9), v9, v8)
        else:
            v9, v8 = merge.t, merge.f
            out = merge
        v1 = self.vertex(1)
        v2 = self.vertex(0)
        v3 = self.vertex(1)
        v4 = self.vertex(0)
        v5 = self.vertex(1)
        v6 = self.vertex(0)
        v7 = self.vertex(0)
        self.heavy(v1, v7)
        self.heavy(v5, v6)
        self.heavy(v2, v3)
        self.heavy(v3, v4)
        self.light(v1, v2)
        self.light(v2, v3)
        self.light(v3, v4)
        self.light(v4, v5)
        self.light(v6, v1, count=self.q)
        self.light(v7, v8)
        return out

    def not_gadget(self, x: _Signal) -> _Signal:
        """NOT gadget: two mirrored light/heavy paths force the output edge
        opposite to the input edge."""
        v1, w5 = x.t, x.f
        v2 = self.vertex(1 - self.colors[v1])
        v3 = self.vertex(self.colors[v1])
        v4 = self.vertex(1 - self.colors[v1])
        v5 = self.vertex(self.colors[v1])
        w4 = self.vertex(1 - self.colors[w5])
        w3 = self.vertex(self.colors[w5])
        w2 = self.vertex(1 - self.colors[w5])
        w1 = self.vertex(self.colors[w5])
        out = _Signal(self.heavy(v5, w1), v5, w1)
        for (p, r) in ((v2, v3), (v3, v4), (w4, w3), (w3, w2)):
            self.heavy(p, r)
            self.light(p, r)
        self.light(v1, v2)
        self.light(v4, v5)
        self.light(w5, w4)
        self.light(w2, w1)
        return out

    def or_gadget(self, x: _Signal, y: _Signal) -> _Signal:
        a, a_prime = x.t, x.f
        b, b_prime = y.t, y.f
        v = self.vertex(0)
        w = self.vertex(1)
        u = self.vertex(0)
        v_prime = self.vertex(1)
        u_prime = self.vertex(1)
        c = self.vertex(0)
        c_prime = self.vertex(1)
        out = _Signal(self.heavy(c, c_prime), c, c_prime)
        self.heavy(v, w)
        self.heavy(w, u)
        self.heavy(v, v_prime)
        self.heavy(u, u_prime)
        self.light(a_prime, v)
        self.light(w, c)
        self.light(u, b_prime)
        self.light(a, c_prime)
        self.light(b, c_prime)
        return out


def build_circuit_gadget(c: Circuit, q: int, alpha, beta) -> BiValuedGraph:
    """Compile a circuit into a bi-valued symmetric multigraph whose EFX0
    orientations correspond to satisfying assignments.

    Requires q >= 2 and alpha > q*beta.  The result is bipartite and every
    heavy component's heavy edges induce an NTOM (both asserted).
    """
    alpha = parse_rational(alpha)
    beta = parse_rational(beta)
    if q < 2:
        raise ValueError("multiplicity q must be at least 2")
    if not alpha > q * beta:
        raise ValueError("reduction needs alpha > q*beta")
    builder = _GadgetBuilder(alpha, beta, q)
    signals: dict[str, _Signal] = {}
    for gate in c.gates:
        if gate.kind == INPUT:
            signals[gate.id] = builder.fresh_signal()
        elif gate.kind == TRUE:
            signals[gate.id] = builder.true_gadget()
        elif gate.kind == NOT:
            feed = builder.duplicate(signals[gate.inputs[0]])
            signals[gate.id] = builder.not_gadget(feed)
        else:
            feed_x = builder.duplicate(signals[gate.inputs[0]])
            feed_y = builder.duplicate(signals[gate.inputs[1]])
            signals[gate.id] = builder.or_gadget(feed_x, feed_y)
    if c.gate(c.output).kind != TRUE:
        builder.true_gadget(merge=signals[c.output])
    bg = BiValuedGraph(
        Multigraph(builder.vertex_count, tuple(builder.edges)), alpha, beta)
    for comp in classify_components(bg):
        assert comp.classification in ("ntom", "trivial"), \
            "every heavy component of a circuit gadget must induce an NTOM"
    return bg


# ---------------------------------------------------------------------------
# Partition -> chores multigraph


def _validate_partition_set(values: Sequence[int]) -> list[int]:
    vals = list(values)
    if not vals or any((not isinstance(v, int)) or v <= 0 for v in vals):
        raise ValueError("partition set must be a non-empty list of positive integers")
    return vals


def build_partition_selfloop_gadget(values: Sequence[int],
                                    criterion: str = "ef1") -> Multigraph:
    """Two vertices joined by one edge per set value (weight -value), plus a
    self-loop at each vertex: loop weight below every value for the EF1
    variant, zero for the EFX0 variant."""
    vals = _validate_partition_set(values)
    if criterion == "ef1":
        loop_weight = Fraction(-(max(vals) + 1))
    elif criterion == "efx0":
        loop_weight = Fraction(0)
    else:
        raise ValueError("criterion must be 'ef1' or 'efx0'")
    edges = [Edge(f"s{k + 1}", 0, 1, Fraction(-v), Fraction(-v))
             for k, v in enumerate(vals)]
    edges.append(Edge("loop_a", 0, 0, loop_weight, loop_weight))
    edges.append(Edge("loop_b", 1, 1, loop_weight, loop_weight))
    return Multigraph(2, tuple(edges))


def build_partition_triangle_gadget(values: Sequence[int]) -> Multigraph:
    """Three vertices, no self-loops: one a-b edge per set value (weight
    -value) and two edges of weight -sum between c and each of a, b."""
    vals = _validate_partition_set(values)
    total = Fraction(-sum(vals))
    edges = [Edge(f"s{k + 1}", 0, 1, Fraction(-v), Fraction(-v))
             for k, v in enumerate(vals)]
    edges.extend([
        Edge("ca1", 2, 0, total, total),
        Edge("ca2", 2, 0, total, total),
        Edge("cb1", 2, 1, total, total),
        Edge("cb2", 2, 1, total, total),
    ])
    return Multigraph(3, tuple(edges))
