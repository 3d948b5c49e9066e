"""Polynomial-time EF1 and EFX0 orientation deciders for graphs of chores.

The EFX0 decider is a chain of reductions: subdivide subjective edges to get
an objective instance, translate that to a constrained vertex-cover problem
over the dummy edges, and solve the cover via 2SAT.  Every produced
orientation is re-verified against the structural acceptance predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import Edge, Multigraph, Orientation

_ZERO = Fraction(0)


# ---------------------------------------------------------------------------
# 2SAT


@dataclass(frozen=True)
class TwoSatFormula:
    """CNF with 1- or 2-literal clauses.  A literal is a signed 1-based
    variable index: +k is variable k-1, -k its negation."""

    variable_count: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if not 1 <= len(clause) <= 2:
                raise ValueError(f"clause size must be 1 or 2: {clause}")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ValueError(f"literal out of range: {lit}")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(
            any((lit > 0) == assignment[abs(lit) - 1] for lit in clause)
            for clause in self.clauses
        )


def _literal_node(lit: int) -> int:
    # node 2v is the negative literal of variable v, node 2v+1 the positive
    var = abs(lit) - 1
    return 2 * var + (1 if lit > 0 else 0)


def solve_2sat(f: TwoSatFormula) -> Optional[list[bool]]:
    """Satisfying assignment via the implication-graph SCC method, or None.

    Deterministic: nodes are explored in index order, so the returned
    assignment is a pure function of the formula.
    """
    node_count = 2 * f.variable_count
    adj: list[list[int]] = [[] for _ in range(node_count)]
    for clause in f.clauses:
        l1 = clause[0]
        l2 = clause[1] if len(clause) == 2 else clause[0]
        adj[_literal_node(-l1)].append(_literal_node(l2))
        adj[_literal_node(-l2)].append(_literal_node(l1))

    # Tarjan, iteratively; SCCs are emitted in reverse topological order.
    comp = [-1] * node_count
    low = [0] * node_count
    num = [-1] * node_count
    counter = 0
    scc_count = 0
    stack: list[int] = []
    on_stack = [False] * node_count
    for root in range(node_count):
        if num[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, idx = work.pop()
            if idx == 0:
                num[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(idx, len(adj[v])):
                w = adj[v][k]
                if num[w] == -1:
                    work.append((v, k + 1))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], num[w])
            if advanced:
                continue
            if low[v] == num[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = scc_count
                    if w == v:
                        break
                scc_count += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    assignment: list[bool] = []
    for v in range(f.variable_count):
        neg, pos = comp[2 * v], comp[2 * v + 1]
        if neg == pos:
            return None
        assignment.append(pos < neg)
    assert f.satisfied_by(assignment)
    return assignment


# ---------------------------------------------------------------------------
# (P, D)-vertex covers


@dataclass(frozen=True)
class PdCoverInstance:
    """A graph plus disjoint vertex groups P (pick at most one per group) and
    a forbidden vertex set D; asks for a vertex cover obeying both."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    groups: tuple[frozenset[int], ...]
    excluded: frozenset[int]

    def __post_init__(self):
        seen: set[int] = set()
        for group in self.groups:
            if seen & group:
                raise ValueError("groups must be pairwise disjoint")
            seen |= group
        for (i, j) in self.edges:
            if not (0 <= i < self.vertex_count and 0 <= j < self.vertex_count):
                raise ValueError("edge endpoint out of range")
        if any(not 0 <= v < self.vertex_count for v in self.excluded):
            raise ValueError("excluded vertex out of range")

    def is_cover(self, cover: set[int]) -> bool:
        if any(i not in cover and j not in cover for (i, j) in self.edges):
            return False
        if any(len(cover & group) > 1 for group in self.groups):
            return False
        return not (cover & self.excluded)


def find_pd_vertex_cover(pd: PdCoverInstance) -> Optional[set[int]]:
    """Constrained vertex cover via 2SAT; the result is re-verified against
    all three cover conditions before being returned."""
    clauses: list[tuple[int, ...]] = []
    for (i, j) in pd.edges:
        clauses.append((i + 1, j + 1))          # cover each edge
    for group in pd.groups:
        members = sorted(group)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                clauses.append((-(members[a] + 1), -(members[b] + 1)))
    for v in sorted(pd.excluded):
        clauses.append((-(v + 1),))
    formula = TwoSatFormula(pd.vertex_count, tuple(clauses))
    assignment = solve_2sat(formula)
    if assignment is None:
        return None
    cover = {v for v in range(pd.vertex_count) if assignment[v]}
    assert pd.is_cover(cover), "2SAT produced a non-cover; construction bug"
    return cover


# ---------------------------------------------------------------------------
# EF1 orientations


def _check_chores_graph(g: Multigraph) -> None:
    if g.multiplicity() > 1:
        raise ValueError("orientation deciders require multiplicity 1")
    for e in g.edges:
        if e.weight_a > 0 or e.weight_b > 0:
            raise ValueError(f"edge {e.id!r} has positive weight; chores only")


def _negative_edge_components(vertex_count: int, edges: Sequence[Edge]
                              ) -> list[tuple[set[int], list[Edge]]]:
    """Connected components under the given edges only; every vertex appears
    (isolated vertices form singleton components)."""
    adj: dict[int, list[Edge]] = {v: [] for v in range(vertex_count)}
    for e in edges:
        adj[e.a].append(e)
        if not e.is_self_loop():
            adj[e.b].append(e)
    seen: set[int] = set()
    out = []
    for start in range(vertex_count):
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            for e in adj[v]:
                w = e.other(v)
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comp_edges = sorted({e.id: e for v in comp for e in adj[v]}.values(),
                            key=lambda e: e.id)
        out.append((comp, comp_edges))
    return out


def _orient_tree_away_from(root: int, edges: Sequence[Edge]) -> dict[str, int]:
    """Orient a tree's edges so every non-root vertex receives its parent
    edge (the root receives nothing)."""
    adj: dict[int, list[Edge]] = {}
    for e in edges:
        adj.setdefault(e.a, []).append(e)
        adj.setdefault(e.b, []).append(e)
    assign: dict[str, int] = {}
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for e in sorted(adj.get(v, []), key=lambda e: e.id):
            w = e.other(v)
            if w in seen:
                continue
            assign[e.id] = w
            seen.add(w)
            queue.append(w)
    return assign


def _orient_unicyclic(vertices: set[int], edges: Sequence[Edge]) -> dict[str, int]:
    """|E| = |V| case: orient the unique cycle cyclically and the branches
    away from it, so every vertex receives exactly one edge."""
    degree: dict[int, int] = {v: 0 for v in vertices}
    for e in edges:
        degree[e.a] += 1
        degree[e.b] += 1  # self-loop counts twice, so it is never stripped
    remaining = {e.id: e for e in edges}
    changed = True
    while changed:
        changed = False
        for e in sorted(remaining.values(), key=lambda e: e.id):
            if e.is_self_loop():
                continue
            if degree[e.a] == 1 or degree[e.b] == 1:
                del remaining[e.id]
                degree[e.a] -= 1
                degree[e.b] -= 1
                changed = True
    cycle_edges = list(remaining.values())
    assign: dict[str, int] = {}
    cycle_vertices: set[int] = set()
    if len(cycle_edges) == 1 and cycle_edges[0].is_self_loop():
        loop = cycle_edges[0]
        assign[loop.id] = loop.a
        cycle_vertices = {loop.a}
    else:
        adj: dict[int, list[Edge]] = {}
        for e in cycle_edges:
            adj.setdefault(e.a, []).append(e)
            adj.setdefault(e.b, []).append(e)
        start = min(adj)
        edge = min(adj[start], key=lambda e: (e.other(start), e.id))
        current = start
        while True:
            cycle_vertices.add(current)
            nxt = edge.other(current)
            assign[edge.id] = nxt
            if nxt == start:
                break
            e1, e2 = adj[nxt]
            edge = e2 if e1.id == edge.id else e1
            current = nxt
    # branches hang off the cycle as trees; orient them away from it
    branch_edges = [e for e in edges if e.id not in assign]
    adj: dict[int, list[Edge]] = {}
    for e in branch_edges:
        adj.setdefault(e.a, []).append(e)
        adj.setdefault(e.b, []).append(e)
    seen = set(cycle_vertices)
    queue = sorted(cycle_vertices)
    while queue:
        v = queue.pop(0)
        for e in sorted(adj.get(v, []), key=lambda e: e.id):
            w = e.other(v)
            if w in seen:
                continue
            assign[e.id] = w
            seen.add(w)
            queue.append(w)
    return assign


def ef1_orient_graph(g: Multigraph) -> Optional[Orientation]:
    """EF1 orientation of a chores graph (multiplicity 1), or None.

    An orientation is EF1 exactly when every vertex receives at most one
    edge of strictly negative utility to it, so feasibility is a per-component
    edge count condition over the strictly negative edges.
    """
    _check_chores_graph(g)
    assign: dict[str, int] = {}
    zeroish: list[Edge] = []
    negative: list[Edge] = []
    for e in g.edges:
        if e.weight_a == 0 or e.weight_b == 0:
            zeroish.append(e)
        else:
            negative.append(e)
    for e in zeroish:
        if e.weight_a == 0:
            assign[e.id] = e.a
        else:
            assign[e.id] = e.b
    for comp, comp_edges in _negative_edge_components(g.vertex_count, negative):
        if not comp_edges:
            continue
        involved = {v for e in comp_edges for v in (e.a, e.b)}
        if len(comp_edges) > len(involved):
            return None
        if len(comp_edges) == len(involved):
            assign.update(_orient_unicyclic(involved, comp_edges))
        else:
            assign.update(_orient_tree_away_from(min(involved), comp_edges))
    return Orientation.of(assign)


# ---------------------------------------------------------------------------
# EFX0 orientations


@dataclass(frozen=True)
class ObjectiveChoresGraph:
    """A chores graph in which every edge is a dummy (zero to both endpoints)
    or negative (strictly negative to both); no subjective edges."""

    g: Multigraph

    def __post_init__(self):
        _check_chores_graph(self.g)
        for e in self.g.edges:
            if not self._objective(e):
                raise ValueError(f"edge {e.id!r} is subjective; not an objective instance")

    @staticmethod
    def _objective(e: Edge) -> bool:
        if e.is_self_loop():
            return True
        return (e.weight_a == 0) == (e.weight_b == 0)

    def dummy_edges(self) -> list[Edge]:
        return [e for e in self.g.edges if e.weight_a == 0 and e.weight_b == 0]

    def negative_edges(self) -> list[Edge]:
        return [e for e in self.g.edges if not (e.weight_a == 0 and e.weight_b == 0)]


def is_objective_efx0(og: ObjectiveChoresGraph, pi: Orientation) -> bool:
    """Structural EFX0 acceptance test for objective instances: each vertex
    receives a unique edge, or receives only dummy edges."""
    received: dict[int, list[Edge]] = {}
    edge_map = og.g.edge_map()
    for eid, v in pi.assign:
        received.setdefault(v, []).append(edge_map[eid])
    dummies = {e.id for e in og.dummy_edges()}
    for v, edges in received.items():
        if len(edges) <= 1:
            continue
        if any(e.id not in dummies for e in edges):
            return False
    return True


def efx_orient_objective(og: ObjectiveChoresGraph) -> Optional[Orientation]:
    """EFX0 orientation of an objective chores graph, or None.

    Pipeline: count negative edges per negative component (fail fast beyond
    |V(K)|), build the constrained cover instance over the dummy edges, solve
    it, then orient dummies toward cover vertices and negative edges so each
    vertex receives at most one.
    """
    g = og.g
    negative = og.negative_edges()
    components = _negative_edge_components(g.vertex_count, negative)
    exact_minus_one: list[tuple[set[int], list[Edge]]] = []
    exact_equal: list[tuple[set[int], list[Edge]]] = []
    for comp, comp_edges in components:
        if len(comp_edges) > len(comp):
            return None
        if len(comp_edges) == len(comp):
            exact_equal.append((comp, comp_edges))
        else:
            exact_minus_one.append((comp, comp_edges))

    dummies = og.dummy_edges()
    pd = PdCoverInstance(
        vertex_count=g.vertex_count,
        edges=tuple((e.a, e.b) for e in dummies),
        groups=tuple(frozenset(comp) for comp, _ in exact_minus_one),
        excluded=frozenset(v for comp, _ in exact_equal for v in comp),
    )
    cover = find_pd_vertex_cover(pd)
    if cover is None:
        return None

    assign: dict[str, int] = {}
    for e in dummies:
        if e.a in cover and e.b in cover:
            assign[e.id] = min(e.a, e.b)
        elif e.a in cover:
            assign[e.id] = e.a
        else:
            assign[e.id] = e.b
    for comp, comp_edges in exact_equal:
        assign.update(_orient_unicyclic(comp, comp_edges))
    for comp, comp_edges in exact_minus_one:
        if not comp_edges:
            continue
        covered = sorted(cover & comp)
        root = covered[0] if covered else min(comp)
        assign.update(_orient_tree_away_from(root, comp_edges))
    pi = Orientation.of(assign)
    assert is_objective_efx0(og, pi), "constructed orientation failed the acceptance predicate"
    return pi


def subdivide_subjective(g: Multigraph
                         ) -> tuple[ObjectiveChoresGraph,
                                    dict[str, tuple[str, int, int]]]:
    """Split every subjective edge (zero to one endpoint, negative to the
    other) through a fresh vertex into a dummy half on the zero side and a
    negative half on the other.  Returns the objective graph and a map from
    each subdivided edge id to (dummy-half id, zero endpoint, negative
    endpoint) for lifting orientations back."""
    _check_chores_graph(g)
    next_vertex = g.vertex_count
    new_edges: list[Edge] = []
    subdivided: dict[str, tuple[str, int, int]] = {}
    for e in g.edges:
        if e.is_self_loop() or (e.weight_a == 0) == (e.weight_b == 0):
            new_edges.append(e)
            continue
        if e.weight_a == 0:
            i, j, beta = e.a, e.b, e.weight_b
        else:
            i, j, beta = e.b, e.a, e.weight_a
        k = next_vertex
        next_vertex += 1
        dummy_id, negative_id = f"{e.id}#d", f"{e.id}#n"
        new_edges.append(Edge(dummy_id, i, k, _ZERO, _ZERO))
        new_edges.append(Edge(negative_id, j, k, beta, beta))
        subdivided[e.id] = (dummy_id, i, j)
    return ObjectiveChoresGraph(Multigraph(next_vertex, tuple(new_edges))), subdivided


def efx_orient_chores(g: Multigraph) -> Optional[Orientation]:
    """EFX0 orientation of a chores graph (multiplicity 1), or None.

    Subjective edges are subdivided into an objective instance; the
    objective decider runs on the result and its orientation is lifted back
    by copying the dummy half's direction.
    """
    og, subdivided = subdivide_subjective(g)
    pi_obj = efx_orient_objective(og)
    if pi_obj is None:
        return None
    obj_assign = pi_obj.as_dict()
    assign: dict[str, int] = {}
    for e in g.edges:
        if e.id in subdivided:
            dummy_id, i, j = subdivided[e.id]
            assign[e.id] = i if obj_assign[dummy_id] == i else j
        else:
            assign[e.id] = obj_assign[e.id]
    return Orientation.of(assign)
