"""Brute-force ground truth for every decision and optimum in the library.

The enumerators here are deliberately plain transcriptions of definitions:
lexicographic scans with fixed order, guarded by an explicit state budget, so
witnesses are reproducible.  `search_orientation` is the one exception: a
complete backtracking search over the same space with sound envy pruning,
used where 2^|E| is out of naive reach (hardness gadgets); it is
differentially validated against the naive enumeration on small inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .chores import TwoSatFormula
from .core import Allocation, Instance, Multigraph, Orientation

DEFAULT_MAX_STATES = 2 ** 22

_ZERO = Fraction(0)


class BudgetExceeded(Exception):
    """Raised when a brute-force search space exceeds its budget."""


@dataclass(frozen=True)
class SearchBudget:
    max_states: int = DEFAULT_MAX_STATES
    on_exceed: str = "error"  # "error" (tests) or "unknown" (CLI verdict)

    def __post_init__(self):
        if self.max_states <= 0:
            raise ValueError("max_states must be positive")
        if self.on_exceed not in ("error", "unknown"):
            raise ValueError("on_exceed must be 'error' or 'unknown'")


def _check_budget(states: int, budget: SearchBudget | None) -> None:
    limit = (budget or SearchBudget()).max_states
    if states > limit:
        raise BudgetExceeded(f"search space of {states} states exceeds budget {limit}")


# ---------------------------------------------------------------------------
# Orientation fairness transcriptions (graphical semantics, exact rationals)


class OrientationJudge:
    """Definitional EF1/EFX0 tests for full orientations of one multigraph.

    Precomputes incidence so that per-orientation checks cost O(V + E).
    `receivers` is a list aligned with g.edges giving each edge's vertex.
    """

    def __init__(self, g: Multigraph):
        self.g = g
        self.n = g.vertex_count
        integral = all(e.weight_a.denominator == 1 and e.weight_b.denominator == 1
                       for e in g.edges)
        if integral:  # plain ints are much faster to enumerate over
            self.edges = [(e.a, e.b, int(e.weight_a), int(e.weight_b))
                          for e in g.edges]
            self.zero = 0
        else:
            self.edges = [(e.a, e.b, e.weight_a, e.weight_b) for e in g.edges]
            self.zero = _ZERO
        self.all_nonpositive = all(
            e.weight_a <= 0 and e.weight_b <= 0 for e in g.edges)
        self.all_nonnegative = all(
            e.weight_a >= 0 and e.weight_b >= 0 for e in g.edges)

    def receivers_of(self, pi: Orientation) -> list[int]:
        assign = pi.as_dict()
        return [assign[e.id] for e in self.g.edges]

    def _bundles(self, receivers: Sequence[int]) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for idx, r in enumerate(receivers):
            out[r].append(idx)
        return out

    def _value_to(self, agent: int, edge_idx: int):
        a, b, wa, wb = self.edges[edge_idx]
        if agent == a:
            return wa
        if agent == b:
            return wb
        return self.zero

    def ef1_ok(self, receivers: Sequence[int]) -> bool:
        """EF1 over every ordered pair, removing any single item from the
        envied bundle or the envier's own bundle."""
        bundles = self._bundles(receivers)
        for i in range(self.n):
            own_items = [self._value_to(i, idx) for idx in bundles[i]]
            own = sum(own_items, self.zero)
            own_drop = own - min(own_items) if own_items else None
            for j in range(self.n):
                if i == j:
                    continue
                other_items = [self._value_to(i, idx) for idx in bundles[j]]
                uij = sum(other_items, self.zero)
                if own >= uij:
                    continue
                if other_items and own >= uij - max(other_items):
                    continue
                if own_drop is not None and own_drop >= uij:
                    continue
                return False
        return True

    def efx0_ok(self, receivers: Sequence[int]) -> bool:
        """EFX0: on a goods graph, removals from the envied bundle must all
        alleviate envy; on a chores graph, removals from the envier's own
        bundle must.  Either-signed graphs are rejected."""
        if self.all_nonnegative:
            return self._efx0_goods(receivers)
        if self.all_nonpositive:
            return self._efx0_chores(receivers)
        raise ValueError("EFX0 orientation test needs a pure goods or chores graph")

    def _efx0_goods(self, receivers: Sequence[int]) -> bool:
        bundles = self._bundles(receivers)
        for i in range(self.n):
            own = sum((self._value_to(i, idx) for idx in bundles[i]), self.zero)
            for j in range(self.n):
                if i == j:
                    continue
                other_items = [self._value_to(i, idx) for idx in bundles[j]]
                if not other_items:
                    continue
                uij = sum(other_items, self.zero)
                if own < uij - min(other_items):
                    return False
        return True

    def _efx0_chores(self, receivers: Sequence[int]) -> bool:
        bundles = self._bundles(receivers)
        for i in range(self.n):
            own_items = [self._value_to(i, idx) for idx in bundles[i]]
            if not own_items:
                continue
            own = sum(own_items, self.zero)
            worst_case = own - max(own_items)
            for j in range(self.n):
                if i == j:
                    continue
                uij = sum((self._value_to(i, idx) for idx in bundles[j]), self.zero)
                if worst_case < uij:
                    return False
        return True


# ---------------------------------------------------------------------------
# Naive enumerations


def _orientation_choices(g: Multigraph) -> list[tuple[int, ...]]:
    return [(e.a,) if e.is_self_loop() else (e.a, e.b) for e in g.edges]


def orientation_state_count(g: Multigraph) -> int:
    states = 1
    for choices in _orientation_choices(g):
        states *= len(choices)
    return states


def enumerate_orientations(g: Multigraph, visit: Callable[[Orientation], bool],
                           budget: SearchBudget | None = None
                           ) -> Optional[Orientation]:
    """Lexicographic scan over per-edge endpoint choices; the first satisfying
    orientation is returned (deterministic)."""
    _check_budget(orientation_state_count(g), budget)
    ids = [e.id for e in g.edges]
    for combo in itertools.product(*_orientation_choices(g)):
        pi = Orientation.of(dict(zip(ids, combo)))
        if visit(pi):
            return pi
    return None


def first_orientation_satisfying(g: Multigraph, criterion: str,
                                 budget: SearchBudget | None = None
                                 ) -> Optional[Orientation]:
    """Naive existence scan for `ef1` / `efx0` using the definitional judge."""
    judge = OrientationJudge(g)
    _check_budget(orientation_state_count(g), budget)
    ids = [e.id for e in g.edges]
    test = judge.ef1_ok if criterion == "ef1" else judge.efx0_ok
    for combo in itertools.product(*_orientation_choices(g)):
        if test(combo):
            return Orientation.of(dict(zip(ids, combo)))
    return None


def brute_exists_allocation(inst: Instance, predicate: Callable[[Allocation], bool],
                            budget: SearchBudget | None = None
                            ) -> Optional[Allocation]:
    """First complete allocation satisfying the predicate, in lexicographic
    per-item owner order, or None."""
    _check_budget(inst.n ** inst.m, budget)
    for owners in itertools.product(range(inst.n), repeat=inst.m):
        bundles: list[list[str]] = [[] for _ in range(inst.n)]
        for j, owner in enumerate(owners):
            bundles[owner].append(inst.items[j])
        alloc = Allocation.of(bundles)
        if predicate(alloc):
            return alloc
    return None


def mms_predicate(inst: Instance) -> Callable[[Allocation], bool]:
    """Predicate testing an allocation against per-agent exact MMS thresholds."""
    from .checks import mms_threshold
    from .core import bundle_utility

    thresholds = [mms_threshold(inst, i)[0] for i in range(inst.n)]

    def ok(alloc: Allocation) -> bool:
        return all(bundle_utility(inst, i, alloc.bundles[i]) >= thresholds[i]
                   for i in range(inst.n))

    return ok


def brute_equipartition(values: Sequence[int]
                        ) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Split indices into two halves of equal sum, or None (odd total or no
    split).  The first value always lands in the first half; remaining picks
    are greedy-lexicographic, so the witness is canonical."""
    if not values:
        raise ValueError("empty partition set")
    if len(values) > 24:
        raise ValueError("partition sets larger than 24 exceed the size guard")
    if any(v <= 0 for v in values):
        raise ValueError("partition sets must be positive integers")
    total = sum(values)
    if total % 2 != 0:
        return None
    target = total // 2

    from functools import lru_cache

    vals = tuple(values)

    @lru_cache(maxsize=None)
    def reachable(idx: int, t: int) -> bool:
        if t == 0:
            return True
        if t < 0 or idx == len(vals):
            return False
        return reachable(idx + 1, t - vals[idx]) or reachable(idx + 1, t)

    t = target - vals[0]
    if t < 0 or not reachable(1, t):
        return None
    side_a = [0]
    for idx in range(1, len(vals)):
        if t >= vals[idx] and reachable(idx + 1, t - vals[idx]):
            side_a.append(idx)
            t -= vals[idx]
    assert t == 0
    side_b = tuple(i for i in range(len(vals)) if i not in set(side_a))
    return tuple(side_a), side_b


def brute_2sat(f: TwoSatFormula) -> Optional[tuple[bool, ...]]:
    """Full truth-table scan; first satisfying assignment with False < True."""
    if f.variable_count > 20:
        raise ValueError("2SAT truth-table scan capped at 20 variables")
    clauses = [tuple(c) for c in f.clauses]
    for assignment in itertools.product((False, True), repeat=f.variable_count):
        ok = True
        for clause in clauses:
            sat = False
            for lit in clause:
                if (lit > 0) == assignment[abs(lit) - 1]:
                    sat = True
                    break
            if not sat:
                ok = False
                break
        if ok:
            return assignment
    return None


# ---------------------------------------------------------------------------
# Pruned complete search (for gadget-scale graphs)


def search_orientation(g: Multigraph, criterion: str,
                       max_states: int = 2 ** 26) -> Optional[Orientation]:
    """Complete backtracking search for an `ef1` or `efx0` orientation.

    Explores the same space as the naive enumeration but prunes a branch as
    soon as some vertex provably (strongly) envies another in every
    completion: a vertex's own bundle and everything it thinks of its
    neighbours' bundles are fixed once all its incident edges are decided,
    and for goods-EFX0 the violation value only grows as the envied bundle
    grows.  Connected components are decided independently (a pair across
    components reduces to comparing against an empty bundle, which for
    chores is folded in as a per-vertex condition).  Decisions agree with
    the naive enumeration (tested); the witness may differ because edges
    are reordered to settle vertices early.
    """
    judge = OrientationJudge(g)
    if criterion == "efx0":
        if judge.all_nonnegative:
            mode = "efx0-goods"
        elif judge.all_nonpositive:
            mode = "efx0-chores"
        else:
            raise ValueError("EFX0 search needs a pure goods or chores graph")
    elif criterion == "ef1":
        if not judge.all_nonpositive:
            raise ValueError("EF1 search implemented for chores graphs")
        mode = "ef1-chores"
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    # split into connected components and decide each on its own
    parent = list(range(g.vertex_count))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        ra, rb = find(e.a), find(e.b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for v in range(g.vertex_count):
        groups.setdefault(find(v), []).append(v)
    components = sorted(groups.values(), key=min)

    assign: dict[str, int] = {}
    for component in components:
        members = set(component)
        comp_edges = [e for e in g.edges if e.a in members]
        if not comp_edges:
            continue
        mapping = {v: k for k, v in enumerate(sorted(members))}
        inverse = {k: v for v, k in mapping.items()}
        sub = Multigraph(len(members), tuple(
            type(e)(e.id, mapping[e.a], mapping[e.b], e.weight_a, e.weight_b)
            for e in comp_edges))
        outside = g.vertex_count > len(members)
        part = _search_component(sub, mode, outside, max_states)
        if part is None:
            return None
        for eid, v in part.items():
            assign[eid] = inverse[v]
    pi = Orientation.of(assign)
    final = judge.receivers_of(pi)
    assert (judge.ef1_ok(final) if mode == "ef1-chores" else judge.efx0_ok(final))
    return pi


def _search_component(g: Multigraph, mode: str, outside_zero_bundle: bool,
                      max_states: int) -> Optional[dict[str, int]]:
    """Backtracking core on one connected graph.  `outside_zero_bundle`
    marks that the full graph has further vertices, so every vertex must
    also tolerate comparison against an empty bundle (chores modes)."""
    judge = OrientationJudge(g)
    n = g.vertex_count
    # settle vertices early: BFS vertex order, then each vertex's unseen edges
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for idx, e in enumerate(g.edges):
        adjacency[e.a].append(idx)
        if not e.is_self_loop():
            adjacency[e.b].append(idx)
    visited: list[int] = []
    seen_v = [False] * n
    for start in range(n):
        if seen_v[start]:
            continue
        queue = [start]
        seen_v[start] = True
        while queue:
            v = queue.pop(0)
            visited.append(v)
            for idx in adjacency[v]:
                e = g.edges[idx]
                w = e.other(v) if not e.is_self_loop() else v
                if not seen_v[w]:
                    seen_v[w] = True
                    queue.append(w)
    order: list[int] = []
    placed = [False] * len(g.edges)
    for v in visited:
        for idx in sorted(adjacency[v], key=lambda i: g.edges[i].id):
            if not placed[idx]:
                placed[idx] = True
                order.append(idx)

    edges = g.edges
    remaining = [len(set(adjacency[v])) for v in range(n)]
    received: list[list[int]] = [[] for _ in range(n)]
    settled = [r == 0 for r in remaining]
    goods = mode == "efx0-goods"

    def value_to(agent: int, idx: int):
        return judge._value_to(agent, idx)

    def source_ok(i: int) -> bool:
        """All (i -> j) conditions, exact once i is settled (chores), or the
        monotone lower bound of them (goods)."""
        own_items = [value_to(i, idx) for idx in received[i]]
        own = sum(own_items, _ZERO)
        if goods:
            for j in _neighbors(i):
                if not _goods_pair_ok(i, j, own):
                    return False
            return True
        # chores: i's view of every bundle is final
        if not own_items:
            return True
        if mode == "ef1-chores":
            slack = own - min(own_items)
        else:
            slack = own - max(own_items)
        worst = None
        seen_j = set()
        for idx in adjacency[i]:
            r = receivers.get(idx)
            if r is not None and r != i:
                seen_j.add(r)
                uij = _pair_value(i, r)
                worst = uij if worst is None else max(worst, uij)
        if outside_zero_bundle or len(seen_j) < n - 1:
            worst = _ZERO if worst is None else max(worst, _ZERO)
        if worst is None:
            return True
        return slack >= worst

    receivers: dict[int, int] = {}

    def _neighbors(i: int):
        out = set()
        for idx in adjacency[i]:
            e = edges[idx]
            if not e.is_self_loop():
                out.add(e.other(i))
        return sorted(out)

    def _pair_value(i: int, j: int):
        total = _ZERO
        for idx in adjacency[i]:
            if receivers.get(idx) == j:
                total += value_to(i, idx)
        return total

    def _goods_pair_ok(i: int, j: int, own) -> bool:
        # sound even while j's bundle is partial: the violation value is
        # monotone non-decreasing in j's received set
        items = [value_to(i, idx) for idx in received[j]]
        if not items:
            return True
        return own >= sum(items, _ZERO) - min(items)

    states = 0

    def rec(k: int) -> Optional[dict[int, int]]:
        nonlocal states
        states += 1
        if states > max_states:
            raise BudgetExceeded(f"pruned search exceeded {max_states} states")
        if k == len(order):
            return dict(receivers)
        idx = order[k]
        e = edges[idx]
        options = (e.a,) if e.is_self_loop() else (e.a, e.b)
        for target in options:
            receivers[idx] = target
            received[target].append(idx)
            touched = [e.a] if e.is_self_loop() else [e.a, e.b]
            for v in touched:
                remaining[v] -= 1
            newly = [v for v in touched if remaining[v] == 0]
            for v in newly:
                settled[v] = True
            ok = all(source_ok(v) for v in newly)
            if ok and goods:
                ok = all(
                    _goods_pair_ok(i, target,
                                   sum((value_to(i, x) for x in received[i]), _ZERO))
                    for i in _neighbors(target) if settled[i])
            if ok:
                result = rec(k + 1)
                if result is not None:
                    return result
            for v in newly:
                settled[v] = False
            for v in touched:
                remaining[v] += 1
            received[target].pop()
            del receivers[idx]
        return None

    solution = rec(0)
    if solution is None:
        return None
    return {edges[idx].id: v for idx, v in solution.items()}
