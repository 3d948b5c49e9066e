"""Fairness checkers with witnesses: EF, PROP, EF1, EFX0, EFX-, MMS, PO, PEF.

Every checker is an exact transcription of the corresponding definition over
rational utilities.  Items flagged forbidden count as chores of unbounded
magnitude: utilities are compared as (-forbidden_count, rational_sum) pairs,
ordered lexicographically, which is the limit semantics of "an arbitrarily
large negative value".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Allocation, Instance, Multigraph, Orientation, bundle_utility
from .partition import check_partition_guard, max_min_partition

EF = "ef"
PROP = "prop"
EF1 = "ef1"
EFX0 = "efx0"
EFX_MINUS = "efx-"
MMS = "mms"
PO = "po"

CRITERIA = (EF, PROP, EF1, EFX0, EFX_MINUS, MMS, PO)

PO_GUARD_STATES = 2 ** 22

ExtValue = tuple[Fraction, Fraction]  # (-forbidden_count, rational value)

_ZERO_EXT: ExtValue = (Fraction(0), Fraction(0))


@dataclass(frozen=True)
class Witness:
    """Re-checkable evidence for a failed criterion."""

    envier: int | None = None
    envied: int | None = None
    item: str | None = None
    agent: int | None = None
    threshold: str | None = None
    value: str | None = None
    dominating: Allocation | None = None

    def to_json_dict(self) -> dict:
        out: dict = {}
        for key in ("envier", "envied", "item", "agent", "threshold", "value"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if self.dominating is not None:
            out["dominating"] = self.dominating.to_json_dict()
        return out


@dataclass(frozen=True)
class FairnessReport:
    criterion: str
    holds: bool
    witness: Witness | None = None
    note: str | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"criterion": self.criterion, "holds": self.holds}
        out["witness"] = self.witness.to_json_dict() if self.witness else None
        if self.note:
            out["note"] = self.note
        return out


def ext_item_value(inst: Instance, agent: int, item: str) -> ExtValue:
    j = inst.item_index(item)
    if (agent, j) in inst.forbidden:
        return (Fraction(-1), inst.utilities[agent][j])
    return (Fraction(0), inst.utilities[agent][j])


def ext_bundle_value(inst: Instance, agent: int, bundle: Iterable[str]) -> ExtValue:
    neg = Fraction(0)
    val = Fraction(0)
    for item in bundle:
        a, b = ext_item_value(inst, agent, item)
        neg += a
        val += b
    return (neg, val)


def _ext_sub(x: ExtValue, y: ExtValue) -> ExtValue:
    return (x[0] - y[0], x[1] - y[1])


def _ext_str(v: ExtValue) -> str:
    if v[0] == 0:
        return str(v[1])
    return f"{v[1]}{v[0]}*inf"  # e.g. "-1-2*inf" for two forbidden items


def _is_good_to(inst: Instance, agent: int, item: str) -> bool:
    ev = ext_item_value(inst, agent, item)
    return ev >= _ZERO_EXT


def _is_chore_to(inst: Instance, agent: int, item: str) -> bool:
    ev = ext_item_value(inst, agent, item)
    return ev <= _ZERO_EXT


def _require_complete(inst: Instance, alloc: Allocation, criterion: str) -> None:
    problems = alloc.validate_for(inst)
    if problems:
        raise ValueError(f"allocation invalid for instance: {problems}")
    if alloc.partial and criterion != EFX0:
        raise ValueError(
            f"criterion {criterion!r} requires a complete allocation "
            "(only efx0 supports partial checks)")


def check(inst: Instance, alloc: Allocation, criterion: str) -> FairnessReport:
    """Decide one comparison-based criterion, with a witness on failure."""
    if criterion == MMS:
        return check_mms(inst, alloc)
    if criterion == PO:
        return check_po(inst, alloc)
    if criterion not in (EF, PROP, EF1, EFX0, EFX_MINUS):
        raise ValueError(f"unknown criterion {criterion!r}")
    _require_complete(inst, alloc, criterion)

    note = None
    if alloc.partial and criterion == EFX0:
        note = "partial allocation"
    goods_inst = _pure_goods(inst)
    chores_inst = not goods_inst and _pure_chores(inst)
    mixed = not (goods_inst or chores_inst)
    if mixed and criterion in (EFX0, EFX_MINUS):
        extra = "strong-envy check on a mixed instance (extension)"
        note = f"{note}; {extra}" if note else extra

    own = [ext_bundle_value(inst, i, alloc.bundles[i]) for i in range(inst.n)]

    if criterion == PROP:
        for i in range(inst.n):
            share = ext_bundle_value(inst, i, inst.items)
            threshold = (share[0] / inst.n, share[1] / inst.n)
            if own[i] < threshold:
                return FairnessReport(PROP, False, Witness(
                    agent=i, threshold=_ext_str(threshold), value=_ext_str(own[i])), note)
        return FairnessReport(PROP, True, None, note)

    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            other = ext_bundle_value(inst, i, alloc.bundles[j])
            if criterion == EF:
                if own[i] < other:
                    return FairnessReport(EF, False, Witness(envier=i, envied=j), note)
                continue
            if criterion == EF1:
                if own[i] >= other:
                    continue
                ok = any(own[i] >= _ext_sub(other, ext_item_value(inst, i, o))
                         for o in sorted(alloc.bundles[j]))
                ok = ok or any(_ext_sub(own[i], ext_item_value(inst, i, o)) >= other
                               for o in sorted(alloc.bundles[i]))
                if not ok:
                    return FairnessReport(EF1, False, Witness(envier=i, envied=j), note)
                continue
            # EFX0 / EFX-.  On a pure goods instance only removals from the
            # envied bundle count; on a pure chores instance only removals
            # from the envier's own bundle.  Mixed instances use the
            # strong-envy condition (both clauses, weak sign qualification).
            strict = criterion == EFX_MINUS
            if goods_inst or mixed:
                for o in sorted(alloc.bundles[j]):
                    ev = ext_item_value(inst, i, o)
                    qualifies = ev > _ZERO_EXT if strict else (
                        True if goods_inst else ev >= _ZERO_EXT)
                    if qualifies and own[i] < _ext_sub(other, ev):
                        return FairnessReport(criterion, False,
                                              Witness(envier=i, envied=j, item=o), note)
            if chores_inst or mixed:
                for o in sorted(alloc.bundles[i]):
                    ev = ext_item_value(inst, i, o)
                    qualifies = ev < _ZERO_EXT if strict else (
                        True if chores_inst else ev <= _ZERO_EXT)
                    if qualifies and _ext_sub(own[i], ev) < other:
                        return FairnessReport(criterion, False,
                                              Witness(envier=i, envied=j, item=o), note)
    return FairnessReport(criterion, True, None, note)


def _pure_goods(inst: Instance) -> bool:
    return not inst.forbidden and all(v >= 0 for row in inst.utilities for v in row)


def _pure_chores(inst: Instance) -> bool:
    return all(v <= 0 for row in inst.utilities for v in row)


def mms_threshold(inst: Instance, agent: int) -> tuple[Fraction, Allocation]:
    """Exact MMS threshold of one agent with a maximizing witness partition.

    Guarded at desk scale; raises ValueError beyond it or if the instance
    carries forbidden flags (unsupported for threshold computations).
    """
    if inst.forbidden:
        raise ValueError("MMS thresholds are not defined here for forbidden items")
    check_partition_guard(inst.m, inst.n)
    value, bundles = max_min_partition(inst.row(agent), inst.n)
    witness = Allocation.of([[inst.items[j] for j in b] for b in bundles])
    return value, witness


@dataclass(frozen=True)
class MmsProfile:
    """Per-agent MMS thresholds with maximizing witness partitions."""

    thresholds: tuple[Fraction, ...]
    witnesses: tuple[Allocation, ...]

    def to_json_dict(self) -> dict:
        return {
            "thresholds": [str(t) for t in self.thresholds],
            "witnesses": [w.to_json_dict() for w in self.witnesses],
        }


def mms_profile(inst: Instance) -> MmsProfile:
    pairs = [mms_threshold(inst, i) for i in range(inst.n)]
    return MmsProfile(tuple(t for t, _ in pairs), tuple(w for _, w in pairs))


def check_mms(inst: Instance, alloc: Allocation) -> FairnessReport:
    _require_complete(inst, alloc, MMS)
    for i in range(inst.n):
        threshold, _ = mms_threshold(inst, i)
        value = bundle_utility(inst, i, alloc.bundles[i])
        if value < threshold:
            return FairnessReport(MMS, False, Witness(
                agent=i, threshold=str(threshold), value=str(value)))
    return FairnessReport(MMS, True)


def _enumerate_allocations(inst: Instance):
    """All complete allocations, lexicographic by per-item owner digits."""
    for owners in itertools.product(range(inst.n), repeat=inst.m):
        bundles: list[list[str]] = [[] for _ in range(inst.n)]
        for j, owner in enumerate(owners):
            bundles[owner].append(inst.items[j])
        yield Allocation.of(bundles)


def check_po(inst: Instance, alloc: Allocation) -> FairnessReport:
    """Pareto optimality by exhaustive dominance search (guarded)."""
    _require_complete(inst, alloc, PO)
    if inst.n ** inst.m > PO_GUARD_STATES:
        raise ValueError("instance too large for exhaustive PO check")
    base = [ext_bundle_value(inst, i, alloc.bundles[i]) for i in range(inst.n)]
    for candidate in _enumerate_allocations(inst):
        strict = False
        dominated = True
        for i in range(inst.n):
            v = ext_bundle_value(inst, i, candidate.bundles[i])
            if v < base[i]:
                dominated = False
                break
            if v > base[i]:
                strict = True
        if dominated and strict:
            return FairnessReport(PO, False, Witness(dominating=candidate))
    return FairnessReport(PO, True)


def check_pef(g: Multigraph, pi: Orientation, i: int, j: int) -> bool:
    """Private envy-freeness between two vertices: restricted to the
    non-self-loop edges between them, neither envies the other."""
    if i == j:
        raise ValueError("PEF is defined for distinct vertices")
    received = pi.as_dict()
    mine = Fraction(0)
    theirs_to_me = Fraction(0)
    theirs = Fraction(0)
    mine_to_them = Fraction(0)
    for e in g.edges_between(i, j):
        owner = received.get(e.id)
        if owner == i:
            mine += e.weight_at(i)
            mine_to_them += e.weight_at(j)
        elif owner == j:
            theirs_to_me += e.weight_at(i)
            theirs += e.weight_at(j)
    return mine >= theirs_to_me and theirs >= mine_to_them
