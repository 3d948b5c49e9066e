"""EF1 allocation algorithms: round-robin, double round-robin, and the
envy-cycle elimination family.

All ties (argmax item, cycle choice, zero-in-degree vertex) break by smallest
index so fixtures are reproducible; cycle selection is shortest-then-
lexicographic starting from the smallest envious vertex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import Allocation, Instance, bundle_utility, is_chores_agent, is_goods_agent

_ZERO = Fraction(0)


def _validate_order(inst: Instance, order: Sequence[int]) -> list[int]:
    if sorted(order) != list(range(inst.n)):
        raise ValueError(f"picking order {order!r} is not a permutation of agents")
    return list(order)


def _pick_best(inst: Instance, agent: int, remaining: list[int]) -> int:
    best = remaining[0]
    for j in remaining[1:]:
        if inst.utilities[agent][j] > inst.utilities[agent][best]:
            best = j
    return best


def picking_run(inst: Instance, order: Sequence[int]) -> Allocation:
    """The bare picking loop: agents take their best remaining item in cyclic
    order, with no instance-type guard.  Used directly only to reproduce the
    mixed-instance counterexample; the EF1 guarantee needs round_robin."""
    order = _validate_order(inst, order)
    bundles: list[list[str]] = [[] for _ in range(inst.n)]
    remaining = list(range(inst.m))
    turn = 0
    while remaining:
        agent = order[turn % inst.n]
        j = _pick_best(inst, agent, remaining)
        bundles[agent].append(inst.items[j])
        remaining.remove(j)
        turn += 1
    return Allocation.of(bundles)


def round_robin(inst: Instance, order: Sequence[int]) -> Allocation:
    """Agents pick their best remaining item in cyclic picking order.

    Valid for all-goods or all-chores additive instances; mixed instances are
    rejected (use double_round_robin).
    """
    goods = all(is_goods_agent(inst, i) for i in range(inst.n))
    chores = all(is_chores_agent(inst, i) for i in range(inst.n))
    if not goods and not chores:
        raise ValueError("round_robin needs an all-goods or all-chores instance; "
                         "use double_round_robin for mixed instances")
    return picking_run(inst, order)


def double_round_robin(inst: Instance) -> Allocation:
    """Objective chores first in forward order, everything else in reverse.

    The chores phase is padded with zero-utility dummy items up to a multiple
    of n (the EF1 argument needs every agent to pick equally often there);
    dummies never appear in the output.  In the second phase an agent whose
    best remaining item has non-positive utility passes their turn -- a
    non-objective chore may still be a chore to them, and forcing the pick
    breaks EF1.
    """
    objective_chores = [j for j in range(inst.m)
                        if all(inst.utilities[i][j] <= 0 for i in range(inst.n))]
    others = [j for j in range(inst.m) if j not in set(objective_chores)]

    pad = (-len(objective_chores)) % inst.n
    bundles: list[list[str]] = [[] for _ in range(inst.n)]

    # phase 1: objective chores (plus dummies), picking order 0..n-1
    remaining = list(objective_chores) + ["dummy"] * pad
    turn = 0
    while remaining:
        agent = turn % inst.n
        best = None
        for entry in remaining:
            value = _ZERO if entry == "dummy" else inst.utilities[agent][entry]
            if best is None or value > best[1]:
                best = (entry, value)
        remaining.remove(best[0])
        if best[0] != "dummy":
            bundles[agent].append(inst.items[best[0]])
        turn += 1

    # phase 2: remaining items, reversed picking order, pass on non-positive
    remaining2 = list(others)
    turn = 0
    while remaining2:
        agent = inst.n - 1 - (turn % inst.n)
        j = _pick_best(inst, agent, remaining2)
        if inst.utilities[agent][j] > 0:
            bundles[agent].append(inst.items[j])
            remaining2.remove(j)
        turn += 1
    return Allocation.of(bundles)


# ---------------------------------------------------------------------------
# Envy graphs and cycle elimination


def envy_edges(inst: Instance, bundles: list[set[str]],
               vertices: Sequence[int] | None = None,
               top_trading: bool = False) -> dict[int, list[int]]:
    """Adjacency of the (top-trading) envy graph restricted to `vertices`."""
    verts = list(range(inst.n)) if vertices is None else list(vertices)
    values = {i: {j: bundle_utility(inst, i, bundles[j]) for j in verts}
              for i in verts}
    adj: dict[int, list[int]] = {i: [] for i in verts}
    for i in verts:
        best = max(values[i].values()) if top_trading else None
        for j in verts:
            if i == j:
                continue
            if values[i][j] > values[i][i]:
                if top_trading and values[i][j] != best:
                    continue
                adj[i].append(j)
    return adj


def _find_cycle(adj: dict[int, list[int]]) -> list[int] | None:
    """Shortest-then-lexicographic cycle whose smallest vertex is minimal."""
    for start in sorted(adj):
        best: list[int] | None = None
        stack: list[list[int]] = [[start]]
        while stack:
            path = stack.pop()
            v = path[-1]
            for w in sorted(adj[v], reverse=True):
                if w == start and len(path) > 1:
                    cycle = path[:]
                    if best is None or (len(cycle), cycle) < (len(best), best):
                        best = cycle
                elif w > start and w not in path:
                    if best is None or len(path) + 1 < len(best):
                        stack.append(path + [w])
        if best is not None:
            return best
    return None


def _total_envy(inst: Instance, bundles: list[set[str]]) -> Fraction:
    total = _ZERO
    for i in range(inst.n):
        own = bundle_utility(inst, i, bundles[i])
        for j in range(inst.n):
            if i != j:
                gap = bundle_utility(inst, i, bundles[j]) - own
                if gap > 0:
                    total += gap
    return total


def _shift_along(bundles: list[set[str]], cycle: list[int]) -> None:
    """Each agent on the cycle takes the bundle of the agent they point to."""
    saved = [bundles[v] for v in cycle]
    for k, v in enumerate(cycle):
        bundles[v] = saved[(k + 1) % len(cycle)]


def _eliminate_cycles(inst: Instance, bundles: list[set[str]],
                      vertices: Sequence[int] | None = None,
                      top_trading: bool = False) -> None:
    while True:
        adj = envy_edges(inst, bundles, vertices, top_trading)
        cycle = _find_cycle(adj)
        if cycle is None:
            return
        before = _total_envy(inst, bundles)
        _shift_along(bundles, cycle)
        after = _total_envy(inst, bundles)
        assert after < before, "cycle shift must strictly decrease total envy"


def _zero_in_degree(adj: dict[int, list[int]]) -> int:
    indegree = {v: 0 for v in adj}
    for v, outs in adj.items():
        for w in outs:
            indegree[w] += 1
    return min(v for v, d in indegree.items() if d == 0)


def _zero_out_degree(adj: dict[int, list[int]]) -> int:
    # chores go to a non-envious agent: their new envy is then removable by
    # dropping the chore they just received, keeping the allocation EF1
    return min(v for v, outs in adj.items() if not outs)


def envy_cycle_elimination(inst: Instance) -> Allocation:
    """Goods only: allocate each item to an unenvied agent, shifting bundles
    along envy cycles whenever none exists."""
    if not all(is_goods_agent(inst, i) for i in range(inst.n)):
        raise ValueError("envy_cycle_elimination needs an all-goods instance")
    bundles: list[set[str]] = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        _eliminate_cycles(inst, bundles)
        agent = _zero_in_degree(envy_edges(inst, bundles))
        bundles[agent].add(inst.items[j])
    return Allocation.of(bundles)


def top_trading_ece(inst: Instance) -> Allocation:
    """Chores only: like envy-cycle elimination, but only cycles in the
    top-trading envy graph are shifted."""
    if not all(is_chores_agent(inst, i) for i in range(inst.n)):
        raise ValueError("top_trading_ece needs an all-chores instance")
    bundles: list[set[str]] = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        _eliminate_cycles(inst, bundles, top_trading=True)
        agent = _zero_out_degree(envy_edges(inst, bundles, top_trading=True))
        bundles[agent].add(inst.items[j])
    return Allocation.of(bundles)


def double_ece(inst: Instance) -> Allocation:
    """Mixed manna: non-objective-chore items via envy-cycle elimination
    restricted to agents who see the item as a good, then objective chores
    via top-trading elimination."""
    objective_chores = [j for j in range(inst.m)
                        if all(inst.utilities[i][j] <= 0 for i in range(inst.n))]
    chore_set = set(objective_chores)
    bundles: list[set[str]] = [set() for _ in range(inst.n)]
    for j in range(inst.m):
        if j in chore_set:
            continue
        eligible = [i for i in range(inst.n) if inst.utilities[i][j] >= 0]
        _eliminate_cycles(inst, bundles, vertices=eligible)
        agent = _zero_in_degree(envy_edges(inst, bundles, vertices=eligible))
        bundles[agent].add(inst.items[j])
    for j in objective_chores:
        _eliminate_cycles(inst, bundles, top_trading=True)
        agent = _zero_out_degree(envy_edges(inst, bundles, top_trading=True))
        bundles[agent].add(inst.items[j])
    return Allocation.of(bundles)
