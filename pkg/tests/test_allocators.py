"""Allocation algorithms: worked examples, EF1 guarantees, determinism."""

import pytest

from fairdiv import allocators
from fairdiv.checks import check
from fairdiv.core import Allocation, Instance


def bundles_of(alloc):
    return [sorted(b) for b in alloc.bundles]


def test_round_robin_paper_example():
    inst = Instance.from_rows([[1, 2, 0, 5], [2, 1, 0, 2], [1, 1, 1, 0]])
    alloc = allocators.round_robin(inst, [0, 1, 2])
    assert bundles_of(alloc) == [["o3", "o4"], ["o1"], ["o2"]]
    assert check(inst, alloc, "ef1").holds


def test_round_robin_single_agent():
    inst = Instance.from_rows([[5, 1, 2]])
    assert bundles_of(allocators.round_robin(inst, [0])) == [["o1", "o2", "o3"]]


def test_round_robin_tie_break():
    inst = Instance.from_rows([[3, 2, 1, 0], [3, 2, 1, 0]])
    alloc = allocators.round_robin(inst, [0, 1])
    assert bundles_of(alloc) == [["o1", "o3"], ["o2", "o4"]]


def test_round_robin_rejects_mixed():
    inst = Instance.from_rows([[2, -3], [2, -3]])
    with pytest.raises(ValueError, match="double_round_robin"):
        allocators.round_robin(inst, [0, 1])


def test_round_robin_order_validation():
    inst = Instance.from_rows([[1], [1]])
    with pytest.raises(ValueError, match="permutation"):
        allocators.round_robin(inst, [0, 0])


def test_picking_run_reproduces_mixed_counterexample():
    inst = Instance.from_rows([[2, -3, -3, -3], [2, -3, -3, -3]])
    alloc = allocators.picking_run(inst, [0, 1])
    assert bundles_of(alloc) == [["o1", "o3"], ["o2", "o4"]]
    assert not check(inst, alloc, "ef1").holds


def test_double_round_robin_mixed():
    inst = Instance.from_rows([[2, -3, -3, -3], [2, -3, -3, -3]])
    alloc = allocators.double_round_robin(inst)
    # faithful simulation: the padding dummy is the best phase-1 pick
    assert bundles_of(alloc) == [["o3"], ["o1", "o2", "o4"]]
    assert check(inst, alloc, "ef1").holds


def test_double_round_robin_pure_cases():
    goods = Instance.from_rows([[4, 3, 2, 1], [1, 2, 3, 4]])
    assert allocators.double_round_robin(goods) == \
        allocators.round_robin(goods, [1, 0])
    chores = Instance.from_rows([[-4, -3, -2, -1], [-1, -2, -3, -4]])
    assert allocators.double_round_robin(chores) == \
        allocators.round_robin(chores, [0, 1])


def test_ece_identical_utilities():
    inst = Instance.from_rows([[1, 1, 1], [1, 1, 1]])
    alloc = allocators.envy_cycle_elimination(inst)
    assert sorted(len(b) for b in alloc.bundles) == [1, 2]
    assert check(inst, alloc, "ef1").holds


def test_ece_single_agent():
    inst = Instance.from_rows([[1, 0, 2]])
    assert bundles_of(allocators.envy_cycle_elimination(inst)) == [["o1", "o2", "o3"]]


def test_ece_sop_goods_is_efx0():
    inst = Instance.from_rows([[4, 3, 2, 1], [4, 3, 2, 1]])
    alloc = allocators.envy_cycle_elimination(inst)
    assert check(inst, alloc, "efx0").holds


def test_ece_rejects_chores():
    inst = Instance.from_rows([[-1, 1], [1, 1]])
    with pytest.raises(ValueError):
        allocators.envy_cycle_elimination(inst)


def test_ttece_examples():
    pair = Instance.from_rows([[-1, -1], [-1, -1]])
    alloc = allocators.top_trading_ece(pair)
    assert sorted(len(b) for b in alloc.bundles) == [1, 1]

    single = Instance.from_rows([[-1, -2]])
    assert bundles_of(allocators.top_trading_ece(single)) == [["o1", "o2"]]

    six = Instance.from_rows([[-1] * 6] * 3)
    alloc = allocators.top_trading_ece(six)
    assert sorted(len(b) for b in alloc.bundles) == [2, 2, 2]
    assert check(six, alloc, "ef1").holds

    goods = Instance.from_rows([[1, -1], [-1, -1]])
    with pytest.raises(ValueError):
        allocators.top_trading_ece(goods)


def test_double_ece_examples():
    mixed = Instance.from_rows([[2, -3, -3, -3], [2, -3, -3, -3]])
    alloc = allocators.double_ece(mixed)
    assert check(mixed, alloc, "ef1").holds

    goods = Instance.from_rows([[3, 1, 2], [1, 3, 2]])
    assert allocators.double_ece(goods) == allocators.envy_cycle_elimination(goods)
    chores = Instance.from_rows([[-3, -1, -2], [-1, -3, -2]])
    assert allocators.double_ece(chores) == allocators.top_trading_ece(chores)


def test_every_algorithm_returns_ef1_on_randoms(rng):
    for _ in range(120):
        n, m = rng.randint(1, 4), rng.randint(0, 8)
        sign = rng.choice(("goods", "chores", "mixed"))
        lo, hi = {"goods": (0, 5), "chores": (-5, 0), "mixed": (-5, 5)}[sign]
        inst = Instance.from_rows(
            [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)])
        outputs = [allocators.double_round_robin(inst), allocators.double_ece(inst)]
        if sign != "mixed":
            order = list(range(n))
            rng.shuffle(order)
            outputs.append(allocators.round_robin(inst, order))
        if sign == "goods":
            outputs.append(allocators.envy_cycle_elimination(inst))
        if sign == "chores":
            outputs.append(allocators.top_trading_ece(inst))
        for alloc in outputs:
            assert not alloc.validate_for(inst)
            assert check(inst, alloc, "ef1").holds, (sign, inst.utilities)


def test_no_dummy_leakage():
    inst = Instance.from_rows([[-1, -1, -1], [-1, -1, -1]])
    alloc = allocators.double_round_robin(inst)
    assert alloc.all_items() == frozenset(inst.items)


def test_determinism(rng):
    for _ in range(20):
        n, m = rng.randint(2, 4), rng.randint(1, 6)
        inst = Instance.from_rows(
            [[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)])
        assert allocators.double_ece(inst) == allocators.double_ece(inst)
        assert allocators.double_round_robin(inst) == \
            allocators.double_round_robin(inst)
