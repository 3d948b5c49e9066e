"""Constructive EFX0 orientation of bi-valued symmetric multigraphs of goods.

A heavy component whose heavy edges form a non-trivial odd multitree (NTOM:
at least two vertices, tree skeleton, every parallel class odd) is the
obstruction: when no heavy component is an NTOM, an EFX0 orientation always
exists and is assembled here in stages -- orient each non-trivial heavy
component so every member holds a heavy edge, feed one light edge to each
stray vertex, finish all remaining pairs with an envy-free two-bundle split,
and finally orient the leftover light matching.  The finished orientation is
re-checked; a verification failure is a bug, not a condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import oracle
from .core import Edge, Multigraph, Orientation

_ZERO = Fraction(0)

TYPE1 = "type1"       # non-trivial, heavy edges form a non-odd multitree
TYPE2 = "type2"       # non-trivial, heavy edges do not form a multitree
TRIVIAL = "trivial"   # single vertex, no heavy edges
NTOM = "ntom"


@dataclass(frozen=True)
class BiValuedGraph:
    """A symmetric multigraph whose edge weights take exactly the two values
    alpha > beta >= 0 (heavy / light)."""

    g: Multigraph
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        if not self.alpha > self.beta >= 0:
            raise ValueError("need alpha > beta >= 0")
        for e in self.g.edges:
            if e.weight_a != e.weight_b:
                raise ValueError(f"edge {e.id!r} is not symmetric")
            if e.weight_a not in (self.alpha, self.beta):
                raise ValueError(f"edge {e.id!r} weight is neither alpha nor beta")

    def is_heavy(self, e: Edge) -> bool:
        return e.weight_a == self.alpha

    def heavy_edges(self) -> list[Edge]:
        return [e for e in self.g.edges if self.is_heavy(e)]

    def light_edges(self) -> list[Edge]:
        return [e for e in self.g.edges if not self.is_heavy(e)]


@dataclass(frozen=True)
class HeavyComponent:
    vertices: frozenset[int]
    classification: str
    ntom: bool
    witness_pair: tuple[int, int] | None = None   # type1: even parallel class
    witness_edge: str | None = None               # type2: self-loop / cycle edge


def _connected_components(vertex_count: int, edges: Sequence[Edge]) -> list[set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in range(vertex_count)}
    for e in edges:
        adj[e.a].add(e.b)
        adj[e.b].add(e.a)
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
            for w in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        out.append(comp)
    return out


def classify_components(bg: BiValuedGraph) -> list[HeavyComponent]:
    """Partition vertices by heavy-edge connectivity and classify each part.

    A component is trivial when it has no heavy edges; a heavy self-loop or a
    cycle in the parallel-class skeleton makes it type2; a tree skeleton with
    some even parallel class makes it type1; a tree skeleton with all classes
    odd is the NTOM obstruction.
    """
    heavy = bg.heavy_edges()
    out = []
    for comp in _connected_components(bg.g.vertex_count, heavy):
        comp_heavy = [e for e in heavy if e.a in comp]
        loops = sorted(e.id for e in comp_heavy if e.is_self_loop())
        if not comp_heavy:
            out.append(HeavyComponent(frozenset(comp), TRIVIAL, False))
            continue
        if loops:
            out.append(HeavyComponent(frozenset(comp), TYPE2, False,
                                      witness_edge=loops[0]))
            continue
        classes: dict[tuple[int, int], list[Edge]] = {}
        for e in comp_heavy:
            classes.setdefault((min(e.a, e.b), max(e.a, e.b)), []).append(e)
        skeleton_edges = len(classes)
        if skeleton_edges > len(comp) - 1:
            # skeleton has a cycle: witness any heavy edge outside a spanning tree
            tree_pairs = _skeleton_tree_pairs(comp, classes)
            extra = min(e.id for pair, es in classes.items()
                        if pair not in tree_pairs for e in es)
            out.append(HeavyComponent(frozenset(comp), TYPE2, False,
                                      witness_edge=extra))
            continue
        even_pairs = sorted(pair for pair, es in classes.items() if len(es) % 2 == 0)
        if even_pairs:
            out.append(HeavyComponent(frozenset(comp), TYPE1, False,
                                      witness_pair=even_pairs[0]))
        else:
            out.append(HeavyComponent(frozenset(comp), NTOM, True))
    return out


def _skeleton_tree_pairs(comp: set[int], classes: dict[tuple[int, int], list[Edge]]
                         ) -> set[tuple[int, int]]:
    """Pairs used by a BFS spanning tree of the parallel-class skeleton."""
    adj: dict[int, list[int]] = {v: [] for v in comp}
    for (a, b) in classes:
        adj[a].append(b)
        adj[b].append(a)
    root = min(comp)
    seen = {root}
    queue = [root]
    tree: set[tuple[int, int]] = set()
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                tree.add((min(v, w), max(v, w)))
                queue.append(w)
    return tree


def _heavy_spanning_tree(comp: set[int], heavy: list[Edge],
                         required: Edge | None = None) -> list[Edge]:
    """BFS spanning tree out of heavy edges, optionally forced to contain one
    specific edge; deterministic (smallest ids first)."""
    adj: dict[int, list[Edge]] = {v: [] for v in comp}
    for e in heavy:
        if e.is_self_loop():
            continue
        adj[e.a].append(e)
        adj[e.b].append(e)
    tree: list[Edge] = []
    if required is not None:
        seen = {required.a, required.b}
        tree.append(required)
        queue = [min(required.a, required.b), max(required.a, required.b)]
    else:
        root = min(comp)
        seen = {root}
        queue = [root]
    while queue:
        v = queue.pop(0)
        for e in sorted(adj[v], key=lambda e: e.id):
            w = e.other(v)
            if w not in seen:
                seen.add(w)
                tree.append(e)
                queue.append(w)
    assert seen == comp, "heavy component must be heavy-connected"
    return tree


def _orient_tree_away(tree: Sequence[Edge], roots: set[int]) -> dict[str, int]:
    """Orient tree edges so each vertex outside `roots` receives the edge on
    its path from the roots."""
    adj: dict[int, list[Edge]] = {}
    for e in tree:
        adj.setdefault(e.a, []).append(e)
        adj.setdefault(e.b, []).append(e)
    assign: dict[str, int] = {}
    seen = set(roots)
    queue = sorted(roots)
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


def orient_type1(bg: BiValuedGraph, comp: HeavyComponent
                 ) -> tuple[dict[str, int], tuple[int, int]]:
    """Orient a type1 component: split an even heavy parallel class evenly
    between its endpoints (plus half the light edges there), then send the
    heavy spanning tree away from that special pair."""
    if comp.classification != TYPE1 or comp.witness_pair is None:
        raise ValueError("orient_type1 needs a type1 component")
    v, w = comp.witness_pair
    heavy = [e for e in bg.heavy_edges() if e.a in comp.vertices]
    pair_heavy = sorted((e for e in heavy if {e.a, e.b} == {v, w}), key=lambda e: e.id)
    pair_light = sorted((e for e in bg.light_edges() if {e.a, e.b} == {v, w}),
                        key=lambda e: e.id)
    assert len(pair_heavy) >= 2 and len(pair_heavy) % 2 == 0
    assign: dict[str, int] = {}
    half = len(pair_heavy) // 2
    for k, e in enumerate(pair_heavy):
        assign[e.id] = v if k < half else w
    for k, e in enumerate(pair_light[: 2 * (len(pair_light) // 2)]):
        assign[e.id] = v if k % 2 == 0 else w
    tree = _heavy_spanning_tree(set(comp.vertices), heavy, required=pair_heavy[0])
    for eid, receiver in _orient_tree_away(tree, {v, w}).items():
        assign[eid] = receiver
    _assert_component_holds_heavy(bg, comp.vertices, assign)
    return assign, (v, w)


def orient_type2(bg: BiValuedGraph, comp: HeavyComponent) -> dict[str, int]:
    """Orient a type2 component: spanning tree away from a root that also
    receives one extra heavy edge (a self-loop or a skeleton-cycle edge), so
    every member receives exactly one heavy edge."""
    if comp.classification != TYPE2 or comp.witness_edge is None:
        raise ValueError("orient_type2 needs a type2 component")
    heavy = [e for e in bg.heavy_edges() if e.a in comp.vertices]
    tree = _heavy_spanning_tree(set(comp.vertices), heavy)
    loops = sorted((e for e in heavy if e.is_self_loop()), key=lambda e: e.id)
    if loops:
        extra = loops[0]
        root = extra.a
    else:
        tree_pairs = {(min(e.a, e.b), max(e.a, e.b)) for e in tree}
        extra = min((e for e in heavy
                     if (min(e.a, e.b), max(e.a, e.b)) not in tree_pairs),
                    key=lambda e: e.id)
        root = min(extra.a, extra.b)
    assign: dict[str, int] = {extra.id: root}
    for eid, receiver in _orient_tree_away(tree, {root}).items():
        assign[eid] = receiver
    _assert_component_holds_heavy(bg, comp.vertices, assign)
    return assign


def _assert_component_holds_heavy(bg: BiValuedGraph, vertices: frozenset[int],
                                  assign: dict[str, int]) -> None:
    """Every component vertex must end up holding at least alpha."""
    received = {v: Fraction(0) for v in vertices}
    edge_map = bg.g.edge_map()
    for eid, v in assign.items():
        received[v] += edge_map[eid].weight_a
    assert all(value >= bg.alpha for value in received.values())


def two_agent_efx_split(weights: Sequence[Fraction]
                        ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """A two-bundle split of non-negative weights that is EFX0 from a single
    valuation regardless of which side that agent receives: removing any item
    from either side leaves it worth no more than the other side.

    Brute force over all splits with item 0 pinned to the first side; the
    first satisfying split in mask order is returned (one always exists).
    """
    m = len(weights)
    if m > 20:
        raise ValueError("two-agent split capped at 20 items")
    if any(x < 0 for x in weights):
        raise ValueError("weights must be non-negative")
    if m == 0:
        return (), ()
    for mask in range(2 ** (m - 1)):
        side_a = [0] + [j for j in range(1, m) if not mask >> (j - 1) & 1]
        side_b = [j for j in range(1, m) if mask >> (j - 1) & 1]
        sum_a = sum((weights[j] for j in side_a), _ZERO)
        sum_b = sum((weights[j] for j in side_b), _ZERO)
        if all(sum_a - weights[j] <= sum_b for j in side_a) and \
           all(sum_b - weights[j] <= sum_a for j in side_b):
            return tuple(side_a), tuple(side_b)
    raise AssertionError("no EFX0 two-bundle split found; this cannot happen")


def orient_all_but_matching(bg: BiValuedGraph
                            ) -> tuple[Orientation, list[str]]:
    """Envy-free partial orientation of a connected graph with a non-trivial
    heavy component and no NTOM: all heavy edges oriented, the unoriented
    edges a light matching across the special pairs (PEF on each)."""
    comps = classify_components(bg)
    if any(c.ntom for c in comps):
        raise ValueError("graph contains an NTOM heavy component")
    if all(c.classification == TRIVIAL for c in comps):
        raise ValueError("graph has no non-trivial heavy component")
    if len(_connected_components(bg.g.vertex_count, list(bg.g.edges))) > 1:
        raise ValueError("orient_all_but_matching expects a connected graph")

    assign: dict[str, int] = {}
    special_pairs: list[tuple[int, int]] = []
    processed: set[int] = set()
    for comp in comps:
        if comp.classification == TYPE1:
            part, pair = orient_type1(bg, comp)
            assign.update(part)
            special_pairs.append(pair)
            processed |= comp.vertices
        elif comp.classification == TYPE2:
            assign.update(orient_type2(bg, comp))
            processed |= comp.vertices

    # feed one light edge to each vertex of a trivial component, walking out
    # from the processed set in ascending vertex order
    pending = {v for comp in comps if comp.classification == TRIVIAL
               for v in comp.vertices}
    incident: dict[int, list[Edge]] = {v: [] for v in range(bg.g.vertex_count)}
    for e in bg.g.edges:
        if not e.is_self_loop():
            incident[e.a].append(e)
            incident[e.b].append(e)
    while pending:
        progressed = False
        for v in sorted(pending):
            feeders = sorted(
                (e for e in incident[v] if e.other(v) in processed),
                key=lambda e: (e.other(v), e.id))
            if not feeders:
                continue
            assign[feeders[0].id] = v
            processed.add(v)
            pending.remove(v)
            progressed = True
            break
        assert progressed, "graph must be connected"

    # finish every pair except the special ones with an envy-free split
    special = set(special_pairs)
    pairs = sorted({(min(e.a, e.b), max(e.a, e.b))
                    for e in bg.g.edges if not e.is_self_loop()})
    for (i, j) in pairs:
        if (i, j) in special or (j, i) in special:
            continue
        unoriented = sorted((e for e in bg.g.edges_between(i, j)
                             if e.id not in assign), key=lambda e: e.id)
        if not unoriented:
            continue
        pre = [e for e in bg.g.edges_between(i, j) if assign.get(e.id) is not None]
        receivers = {assign[e.id] for e in pre}
        holder = min(receivers) if receivers else min(i, j)
        other = j if holder == i else i
        side_holder, side_other = two_agent_efx_split(
            [e.weight_a for e in unoriented])
        sum_h = sum((unoriented[k].weight_a for k in side_holder), _ZERO)
        sum_o = sum((unoriented[k].weight_a for k in side_other), _ZERO)
        if sum_h > sum_o:
            side_holder, side_other = side_other, side_holder
        for k in side_holder:
            assign[unoriented[k].id] = holder
        for k in side_other:
            assign[unoriented[k].id] = other

    # absorb all self-loops
    for e in bg.g.edges:
        if e.is_self_loop() and e.id not in assign:
            assign[e.id] = e.a

    leftovers = sorted(e.id for e in bg.g.edges if e.id not in assign)
    pi = Orientation.of(assign, partial=bool(leftovers))
    return pi, leftovers


def finalize_matching(bg: BiValuedGraph, partial: Orientation,
                      matching: list[str]) -> Orientation:
    """Orient each leftover matching edge toward the endpoint that did not
    receive an outside edge (ties toward the larger index, because the edge
    goes to the *other* endpoint of the renamed pair)."""
    assign = partial.as_dict()
    edge_map = bg.g.edge_map()
    for eid in matching:
        e = edge_map[eid]
        def got_outside(vertex: int) -> bool:
            return any(
                assign.get(f.id) == vertex
                for f in bg.g.incident(vertex)
                if not (not f.is_self_loop() and {f.a, f.b} == {e.a, e.b}))
        o_a, o_b = got_outside(e.a), got_outside(e.b)
        if o_a and not o_b:
            keeper = e.a
        elif o_b and not o_a:
            keeper = e.b
        else:
            keeper = min(e.a, e.b)
        assign[eid] = e.other(keeper) if not e.is_self_loop() else e.a
    return Orientation.of(assign)


def orient_trivial_case(bg: BiValuedGraph) -> Orientation:
    """All heavy components trivial (all edges effectively light): balance
    in-degrees by reversing directed paths from lighter-loaded vertices to
    heavier ones until no gap of two or more remains, then verify EFX0."""
    assign: dict[str, int] = {}
    for e in bg.g.edges:
        assign[e.id] = e.a if e.is_self_loop() else min(e.a, e.b)
    if bg.beta == 0:
        return Orientation.of(assign)

    indegree = [0] * bg.g.vertex_count
    for v in assign.values():
        indegree[v] += 1

    def reverse_path() -> bool:
        order = sorted(range(bg.g.vertex_count), key=lambda v: (-indegree[v], v))
        for x in order:
            for y in range(bg.g.vertex_count):
                if indegree[x] - indegree[y] < 2:
                    continue
                path = _directed_path(bg.g, assign, y, x)
                if path is None:
                    continue
                for (eid, giver) in path:
                    assign[eid] = giver
                indegree[x] -= 1
                indegree[y] += 1
                return True
        return False

    while reverse_path():
        pass
    pi = Orientation.of(assign)
    judge = oracle.OrientationJudge(bg.g)
    if judge.efx0_ok(judge.receivers_of(pi)):
        return pi
    fallback = oracle.first_orientation_satisfying(bg.g, "efx0")
    assert fallback is not None, "trivial-case orientation must exist"
    return fallback


def _directed_path(g: Multigraph, assign: dict[str, int], source: int,
                   target: int) -> list[tuple[str, int]] | None:
    """Shortest directed path (edges pointing at their receivers) from source
    to target; returns [(edge id, new receiver), ...] for reversal."""
    parents: dict[int, tuple[int, str]] = {}
    seen = {source}
    queue = [source]
    while queue:
        v = queue.pop(0)
        if v == target:
            break
        for e in sorted(g.incident(v), key=lambda e: e.id):
            if e.is_self_loop() or assign.get(e.id) is None:
                continue
            w = e.other(v)
            if assign[e.id] != w or w in seen:
                continue
            seen.add(w)
            parents[w] = (v, e.id)
            queue.append(w)
    if target not in parents and target != source:
        return None
    path = []
    v = target
    while v != source:
        prev, eid = parents[v]
        path.append((eid, prev))
        v = prev
    return list(reversed(path))


def _induced_subgraph(bg: BiValuedGraph, vertices: set[int]
                      ) -> tuple[BiValuedGraph, dict[int, int]]:
    mapping = {v: k for k, v in enumerate(sorted(vertices))}
    edges = [Edge(e.id, mapping[e.a], mapping[e.b], e.weight_a, e.weight_b)
             for e in bg.g.edges if e.a in vertices and e.b in vertices]
    sub = BiValuedGraph(Multigraph(len(mapping), tuple(edges)), bg.alpha, bg.beta)
    inverse = {k: v for v, k in mapping.items()}
    return sub, inverse


ORIENTED = "oriented"
NTOM_BLOCKED = "ntom-blocked"


def efx_orient_bivalued(bg: BiValuedGraph) -> tuple[str, Optional[Orientation]]:
    """Full pipeline: `ntom-blocked` if some heavy component is an NTOM
    (existence is then undecided here), otherwise an EFX0 orientation."""
    comps = classify_components(bg)
    if any(c.ntom for c in comps):
        return NTOM_BLOCKED, None
    assign: dict[str, int] = {}
    for component in _connected_components(bg.g.vertex_count, list(bg.g.edges)):
        sub, inverse = _induced_subgraph(bg, component)
        sub_comps = classify_components(sub)
        if all(c.classification == TRIVIAL for c in sub_comps):
            pi = orient_trivial_case(sub)
        else:
            partial, matching = orient_all_but_matching(sub)
            pi = finalize_matching(sub, partial, matching)
        for eid, v in pi.assign:
            assign[eid] = inverse[v]
    pi = Orientation.of(assign)
    judge = oracle.OrientationJudge(bg.g)
    assert judge.efx0_ok(judge.receivers_of(pi)), "pipeline produced a non-EFX0 orientation"
    return ORIENTED, pi
