"""Exact max-min partition search with branch-and-bound pruning.

This is the engine behind MMS thresholds and witness partitions.  It
enumerates assignments item-by-item with two prunes:

* bound vs. best-so-far: the final minimum can never exceed the mean of the
  final bundle values, nor the current lowest bundle value plus all remaining
  positive utility;
* canonical bundle-symmetry breaking: an item may only open the next unused
  bundle, so each set partition is visited once (the first processed item
  always lands in bundle 0).

Items are processed in decreasing absolute value (ties by original index),
which tightens the bound early.  All arithmetic is exact; results are
deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

_ZERO = Fraction(0)

# desk-scale guard: m * ceil(log2 n) <= 34
_GUARD_LIMIT = 34


def _ceil_log2(n: int) -> int:
    if n <= 1:
        return 0
    return (n - 1).bit_length()


def check_partition_guard(m: int, n: int) -> None:
    if m * _ceil_log2(n) > _GUARD_LIMIT:
        raise ValueError(
            f"instance too large for exact MMS: m={m}, n={n} exceeds the desk-scale guard"
        )


def max_min_partition(values: Sequence[Fraction], n: int
                      ) -> tuple[Fraction, list[list[int]]]:
    """Exact max over all n-bundle partitions of the min bundle utility.

    Returns (threshold, partition); the partition is a list of n lists of
    item indices (possibly empty) achieving the threshold.
    """
    if n < 1:
        raise ValueError("need at least one bundle")
    check_partition_guard(len(values), n)
    m = len(values)
    if n == 1:
        return sum(values, _ZERO), [list(range(m))]
    if m == 0:
        return _ZERO, [[] for _ in range(n)]

    order = sorted(range(m), key=lambda j: (-abs(values[j]), j))
    total = sum(values, _ZERO)
    mean = total / n
    pos_suffix = [_ZERO] * (m + 1)
    for k in range(m - 1, -1, -1):
        v = values[order[k]]
        pos_suffix[k] = pos_suffix[k + 1] + (v if v > 0 else _ZERO)

    sums = [_ZERO] * n
    assign = [0] * m
    best_value: Fraction | None = None
    best_partition: list[list[int]] = []

    def current_min(used: int) -> Fraction:
        low = min(sums[:used]) if used else _ZERO
        return low if used == n else min(low, _ZERO)

    def rec(k: int, used: int) -> None:
        nonlocal best_value, best_partition
        if k == m:
            value = current_min(used)
            if best_value is None or value > best_value:
                best_value = value
                bundles: list[list[int]] = [[] for _ in range(n)]
                for pos in range(m):
                    bundles[assign[pos]].append(order[pos])
                best_partition = [sorted(b) for b in bundles]
            return
        if best_value is not None:
            if min(mean, current_min(used) + pos_suffix[k]) <= best_value:
                return
        j = order[k]
        for b in range(min(used + 1, n)):
            sums[b] += values[j]
            assign[k] = b
            rec(k + 1, max(used, b + 1))
            sums[b] -= values[j]

    rec(0, 0)
    assert best_value is not None
    return best_value, best_partition


def find_partition(values: Sequence[Fraction], n: int, target: Fraction,
                   accept: Callable[[list[list[int]]], bool] | None = None,
                   max_bundle_size: int | None = None,
                   oversized_allowance: int = 0,
                   forced_singleton: int | None = None,
                   ) -> list[list[int]] | None:
    """First n-bundle partition (canonical order) with min bundle >= target.

    Optional constraints:
      accept            -- predicate on the complete partition (list of sorted
                           index lists, in bundle order)
      max_bundle_size   -- cap on bundle sizes; `oversized_allowance` bundles
                           may exceed it
      forced_singleton  -- this item index must form a bundle on its own
    Returns the partition (n lists of indices) or None.
    """
    m = len(values)
    item_pool = list(range(m))
    singleton_tail: list[list[int]] = []
    if forced_singleton is not None:
        if n == 0 or values[forced_singleton] < target:
            return None
        item_pool = [j for j in item_pool if j != forced_singleton]
        singleton_tail = [[forced_singleton]]
    slots = n - len(singleton_tail)
    if slots == 0:
        if item_pool:
            return None
        return singleton_tail if accept is None or accept(singleton_tail) else None

    order = sorted(item_pool, key=lambda j: (-abs(values[j]), j))
    pos_suffix = [_ZERO] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        v = values[order[k]]
        pos_suffix[k] = pos_suffix[k + 1] + (v if v > 0 else _ZERO)

    sums = [_ZERO] * slots
    sizes = [0] * slots
    assign = [0] * len(order)

    def rec(k: int, used: int, oversized: int) -> list[list[int]] | None:
        if k == len(order):
            if any(sums[b] < target for b in range(used)):
                return None
            if used < slots and target > 0:
                return None  # an empty bundle cannot meet a positive target
            bundles: list[list[int]] = [[] for _ in range(slots)]
            for pos in range(len(order)):
                bundles[assign[pos]].append(order[pos])
            result = [sorted(b) for b in bundles] + singleton_tail
            if accept is not None and not accept(result):
                return None
            return result
        # feasibility prunes
        for b in range(used):
            if sums[b] + pos_suffix[k] < target:
                return None
        if used < slots and target > 0 and pos_suffix[k] < target:
            return None
        j = order[k]
        for b in range(min(used + 1, slots)):
            new_oversized = oversized
            if max_bundle_size is not None and sizes[b] == max_bundle_size:
                new_oversized = oversized + 1  # bundle crosses the cap now
                if new_oversized > oversized_allowance:
                    continue
            sums[b] += values[j]
            sizes[b] += 1
            assign[k] = b
            found = rec(k + 1, max(used, b + 1), new_oversized)
            sums[b] -= values[j]
            sizes[b] -= 1
            if found is not None:
                return found
        return None

    return rec(0, 0, 0)
