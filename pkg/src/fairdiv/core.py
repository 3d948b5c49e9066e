"""Exact data model: instances, multigraphs, allocations, orientations.

Utilities are exact rationals (`fractions.Fraction`), never floats: the whole
library compares sums for equality and strict inequality, and floating point
would corrupt tie-breaking.  JSON input accepts integers and "p/q" strings;
output always uses strings so values round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction

GOODS_AGENT = "goods-agent"
CHORES_AGENT = "chores-agent"
MIXED_AGENT = "mixed-agent"


def parse_rational(value) -> Fraction:
    """Parse an integer or a decimal-integer / "p/q" string into a Fraction."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip().replace("−", "-")  # tolerate unicode minus
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def rational_str(value: Fraction) -> str:
    """Serialize a Fraction as "p" or "p/q" (always lowest terms)."""
    return str(value)


@dataclass(frozen=True)
class Instance:
    """An additive fair-division instance: agents x items with exact utilities.

    ``utilities[i][j]`` is agent i's utility for item ``items[j]``.  The
    optional ``forbidden`` set marks (agent, item-index) pairs whose utility
    the checkers treat as strictly below every rational (used to model
    "unsuitable" items); algebraic operations ignore the flag.
    """

    n: int
    items: tuple[str, ...]
    utilities: tuple[tuple[Fraction, ...], ...]
    forbidden: frozenset[tuple[int, int]] = frozenset()

    @staticmethod
    def from_rows(rows: Sequence[Sequence], items: Sequence[str] | None = None,
                  forbidden: Iterable[tuple[int, int]] = ()) -> "Instance":
        n = len(rows)
        if n == 0:
            raise ValueError("instance needs at least one agent")
        m = len(rows[0])
        if items is None:
            items = tuple(f"o{j + 1}" for j in range(m))
        matrix = tuple(tuple(parse_rational(v) for v in row) for row in rows)
        return Instance(n, tuple(items), matrix, frozenset(forbidden))

    @property
    def m(self) -> int:
        return len(self.items)

    def item_index(self, item: str) -> int:
        try:
            return self.items.index(item)
        except ValueError:
            raise KeyError(f"unknown item id {item!r}") from None

    def utility(self, agent: int, item: str) -> Fraction:
        return self.utilities[agent][self.item_index(item)]

    def is_forbidden(self, agent: int, item: str) -> bool:
        return (agent, self.item_index(item)) in self.forbidden

    def row(self, agent: int) -> tuple[Fraction, ...]:
        return self.utilities[agent]

    def to_json_dict(self) -> dict:
        out = {
            "agents": self.n,
            "items": list(self.items),
            "utilities": [[rational_str(v) for v in row] for row in self.utilities],
        }
        if self.forbidden:
            out["forbidden"] = sorted([i, j] for (i, j) in self.forbidden)
        return out

    @staticmethod
    def from_json_dict(data: Mapping) -> "Instance":
        n = data["agents"]
        items = tuple(data["items"])
        matrix = tuple(tuple(parse_rational(v) for v in row) for row in data["utilities"])
        forbidden = frozenset((int(i), int(j)) for i, j in data.get("forbidden", []))
        inst = Instance(n, items, matrix, forbidden)
        problems = validate_instance(inst)
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
        return inst


@dataclass(frozen=True)
class Edge:
    """One multigraph edge.  ``a == b`` makes it a self-loop; ``weight_a`` is
    the utility of the edge to endpoint ``a`` and ``weight_b`` to ``b``."""

    id: str
    a: int
    b: int
    weight_a: Fraction
    weight_b: Fraction

    def is_self_loop(self) -> bool:
        return self.a == self.b

    def endpoints(self) -> tuple[int, int]:
        return (self.a, self.b)

    def other(self, v: int) -> int:
        if v == self.a:
            return self.b
        if v == self.b:
            return self.a
        raise ValueError(f"vertex {v} is not an endpoint of edge {self.id}")

    def weight_at(self, v: int) -> Fraction:
        if v == self.a:
            return self.weight_a
        if v == self.b:
            return self.weight_b
        raise ValueError(f"vertex {v} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class Multigraph:
    """A multigraph with labeled, per-endpoint-weighted edges.

    Vertices are agents, edges are items; parallel edges and self-loops are
    allowed.  ``symmetric`` means both endpoints agree on every edge weight.
    """

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise ValueError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if not (0 <= e.a < self.vertex_count and 0 <= e.b < self.vertex_count):
                raise ValueError(f"edge {e.id!r} endpoint out of range")

    @staticmethod
    def build(vertex_count: int,
              edges: Iterable[tuple] | Iterable[Edge]) -> "Multigraph":
        """Build from (id, a, b, weight) symmetric or (id, a, b, wa, wb) tuples."""
        out = []
        for entry in edges:
            if isinstance(entry, Edge):
                out.append(entry)
                continue
            if len(entry) == 4:
                eid, a, b, w = entry
                w = parse_rational(w)
                out.append(Edge(eid, a, b, w, w))
            else:
                eid, a, b, wa, wb = entry
                out.append(Edge(eid, a, b, parse_rational(wa), parse_rational(wb)))
        return Multigraph(vertex_count, tuple(out))

    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def is_symmetric(self) -> bool:
        return all(e.weight_a == e.weight_b for e in self.edges)

    def multiplicity(self) -> int:
        """Maximum number of parallel edges between any endpoint pair."""
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            key = (min(e.a, e.b), max(e.a, e.b))
            counts[key] = counts.get(key, 0) + 1
        return max(counts.values(), default=0)

    def incident(self, v: int) -> list[Edge]:
        return [e for e in self.edges if e.a == v or e.b == v]

    def edges_between(self, i: int, j: int) -> list[Edge]:
        """Edges between two distinct vertices (never self-loops)."""
        if i == j:
            raise ValueError("use self_loops_at for i == j")
        pair = {i, j}
        return [e for e in self.edges if {e.a, e.b} == pair]

    def self_loops_at(self, v: int) -> list[Edge]:
        return [e for e in self.edges if e.a == v and e.b == v]

    def to_json_dict(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": [
                {"id": e.id, "a": e.a, "b": e.b,
                 "wa": rational_str(e.weight_a), "wb": rational_str(e.weight_b)}
                for e in self.edges
            ],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "Multigraph":
        edges = tuple(
            Edge(d["id"], int(d["a"]), int(d["b"]),
                 parse_rational(d["wa"]), parse_rational(d["wb"]))
            for d in data["edges"]
        )
        return Multigraph(int(data["vertices"]), edges)


@dataclass(frozen=True)
class Allocation:
    """An ordered list of disjoint bundles, one per agent.

    Bundles are sets of item *ids* (not indices) so that reductions can delete
    items without reindexing.  A complete allocation covers every item; set
    ``partial=True`` to mark one that deliberately does not.
    """

    bundles: tuple[frozenset[str], ...]
    partial: bool = False

    @staticmethod
    def of(bundles: Sequence[Iterable[str]], partial: bool = False) -> "Allocation":
        return Allocation(tuple(frozenset(b) for b in bundles), partial)

    @property
    def n(self) -> int:
        return len(self.bundles)

    def owner_of(self, item: str) -> int | None:
        for i, bundle in enumerate(self.bundles):
            if item in bundle:
                return i
        return None

    def all_items(self) -> frozenset[str]:
        out: set[str] = set()
        for b in self.bundles:
            out |= b
        return frozenset(out)

    def validate_for(self, inst: Instance) -> list[str]:
        problems = []
        if len(self.bundles) != inst.n:
            problems.append(f"expected {inst.n} bundles, got {len(self.bundles)}")
        seen: set[str] = set()
        item_set = set(inst.items)
        for i, bundle in enumerate(self.bundles):
            for item in bundle:
                if item not in item_set:
                    problems.append(f"bundle {i} has unknown item {item!r}")
                if item in seen:
                    problems.append(f"item {item!r} allocated twice")
                seen.add(item)
        if not self.partial and seen != item_set:
            missing = sorted(item_set - seen)
            if missing:
                problems.append(f"unallocated items: {missing}")
        return problems

    def to_json_dict(self) -> dict:
        out = {"bundles": [sorted(b) for b in self.bundles]}
        if self.partial:
            out["partial"] = True
        return out

    @staticmethod
    def from_json_dict(data: Mapping) -> "Allocation":
        return Allocation.of(data["bundles"], bool(data.get("partial", False)))


@dataclass(frozen=True)
class Orientation:
    """Assignment of each edge to one of its endpoints (the receiving agent)."""

    assign: tuple[tuple[str, int], ...]
    partial: bool = False

    @staticmethod
    def of(mapping: Mapping[str, int], partial: bool = False) -> "Orientation":
        return Orientation(tuple(sorted(mapping.items())), partial)

    def as_dict(self) -> dict[str, int]:
        return dict(self.assign)

    def validate_for(self, g: Multigraph) -> list[str]:
        problems = []
        edge_map = g.edge_map()
        assigned = self.as_dict()
        for eid, v in assigned.items():
            e = edge_map.get(eid)
            if e is None:
                problems.append(f"unknown edge id {eid!r}")
            elif v not in (e.a, e.b):
                problems.append(f"edge {eid!r} assigned to non-endpoint {v}")
        if not self.partial:
            missing = sorted(set(edge_map) - set(assigned))
            if missing:
                problems.append(f"unoriented edges: {missing}")
        return problems

    def to_allocation(self, g: Multigraph) -> Allocation:
        """The allocation of the induced graphical instance (edge ids as items)."""
        bundles: list[set[str]] = [set() for _ in range(g.vertex_count)]
        for eid, v in self.assign:
            bundles[v].add(eid)
        return Allocation.of(bundles, partial=self.partial)

    def to_json_dict(self) -> dict:
        out = {"assign": {eid: v for eid, v in self.assign}}
        if self.partial:
            out["partial"] = True
        return out

    @staticmethod
    def from_json_dict(data: Mapping) -> "Orientation":
        return Orientation.of({k: int(v) for k, v in data["assign"].items()},
                              bool(data.get("partial", False)))


def validate_instance(inst: Instance) -> list[str]:
    """Diagnostic validation; returns a list of violations (empty = valid)."""
    problems = []
    if inst.n < 1:
        problems.append("agent count must be >= 1")
    if len(inst.utilities) != inst.n:
        problems.append(f"expected {inst.n} utility rows, got {len(inst.utilities)}")
    m = len(inst.items)
    for i, row in enumerate(inst.utilities):
        if len(row) != m:
            problems.append(f"row length mismatch: agent {i} has {len(row)} entries, expected {m}")
    seen: set[str] = set()
    for item in inst.items:
        if item in seen:
            problems.append(f"duplicate item id {item}")
        seen.add(item)
    for (i, j) in inst.forbidden:
        if not (0 <= i < inst.n and 0 <= j < m):
            problems.append(f"forbidden pair ({i}, {j}) out of range")
    return problems


def bundle_utility(inst: Instance, agent: int, bundle: Iterable[str]) -> Fraction:
    """Additive utility of a bundle: the sum of per-item utilities."""
    if not (0 <= agent < inst.n):
        raise ValueError(f"unknown agent index {agent}")
    total = Fraction(0)
    for item in bundle:
        total += inst.utility(agent, item)
    return total


def graphical_to_instance(g: Multigraph) -> Instance:
    """Translate a multigraph into the induced fair-division instance.

    One agent per vertex and one item per edge; an edge has its endpoint
    weight as utility to each endpoint and zero to everyone else, so each
    column has at most two nonzero entries (exactly one for a self-loop).
    """
    matrix = [[Fraction(0)] * len(g.edges) for _ in range(g.vertex_count)]
    for j, e in enumerate(g.edges):
        if e.is_self_loop():
            matrix[e.a][j] = e.weight_a
        else:
            matrix[e.a][j] = e.weight_a
            matrix[e.b][j] = e.weight_b
    items = tuple(e.id for e in g.edges)
    return Instance(g.vertex_count, items, tuple(tuple(row) for row in matrix))


def is_goods_agent(inst: Instance, agent: int) -> bool:
    return all(v >= 0 for v in inst.utilities[agent])


def is_chores_agent(inst: Instance, agent: int) -> bool:
    return all(v <= 0 for v in inst.utilities[agent])


def agent_class(inst: Instance, agent: int) -> str:
    """Classify an agent; an all-zero row reports goods-agent (both flags are
    available through is_goods_agent / is_chores_agent)."""
    goods = is_goods_agent(inst, agent)
    chores = is_chores_agent(inst, agent)
    if goods:
        return GOODS_AGENT
    if chores:
        return CHORES_AGENT
    return MIXED_AGENT


def is_goods_instance(inst: Instance) -> bool:
    return all(is_goods_agent(inst, i) for i in range(inst.n))


def is_chores_instance(inst: Instance) -> bool:
    return all(is_chores_agent(inst, i) for i in range(inst.n))


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path: str | None = None, pretty: bool = False) -> str:
    text = json.dumps(obj, indent=2 if pretty else None, sort_keys=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
