"""Brute-force oracles: worked examples, determinism, and cross-validation
of the pruned search against the naive enumeration."""

from fractions import Fraction

import pytest

from fairdiv import oracle
from fairdiv.chores import TwoSatFormula
from fairdiv.core import Edge, Instance, Multigraph, graphical_to_instance
from fairdiv.checks import check


def k4_chores():
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]
    return Multigraph.build(4, [(f"e{i}", a, b, -1) for i, (a, b) in enumerate(pairs)])


def test_enumerate_orientations_k4_ef1_none():
    g = k4_chores()
    judge = oracle.OrientationJudge(g)
    assert oracle.enumerate_orientations(
        g, lambda pi: judge.ef1_ok(judge.receivers_of(pi))) is None


def test_enumerate_orientations_first_witness():
    g = Multigraph.build(2, [("e1", 0, 1, 1)])
    pi = oracle.enumerate_orientations(g, lambda _pi: True)
    assert pi.as_dict() == {"e1": 0}  # lexicographically first: endpoint a


def test_enumerate_orientations_ntom_family():
    for q in (1, 2, 3):
        edges = [("h", 0, 1, q + 1)]
        for k in range(q):
            edges.append((f"la{k}", 0, 0, 1))
            edges.append((f"lb{k}", 1, 1, 1))
        g = Multigraph.build(2, edges)
        assert oracle.first_orientation_satisfying(g, "efx0") is None


def test_enumeration_budget():
    g = Multigraph.build(2, [(f"e{k}", 0, 1, 1) for k in range(8)])
    with pytest.raises(oracle.BudgetExceeded):
        oracle.enumerate_orientations(g, lambda _pi: False,
                                      oracle.SearchBudget(max_states=100))


def test_brute_exists_allocation_examples():
    inst = Instance.from_rows([[1, 2, 3, 4, 5, 6], [1, 10, 6, 0, 0, 0],
                               [10, 1, 1, 1, 1, 1]])
    assert oracle.brute_exists_allocation(inst, oracle.mms_predicate(inst)) is not None

    lone = Instance.from_rows([[1], [1]])
    assert oracle.brute_exists_allocation(
        lone, lambda alloc: check(lone, alloc, "ef").holds) is None


def test_brute_exists_k4_goods_efx_orientation_none():
    g = Multigraph.build(4, [("h12", 0, 1, 1), ("h34", 2, 3, 1),
                             ("l13", 0, 2, 0), ("l14", 0, 3, 0),
                             ("l23", 1, 2, 0), ("l24", 1, 3, 0)])
    inst = graphical_to_instance(g)
    endpoints = {e.id: {e.a, e.b} for e in g.edges}

    def efx_orientation(alloc):
        for i, bundle in enumerate(alloc.bundles):
            if any(i not in endpoints[item] for item in bundle):
                return False
        return check(inst, alloc, "efx0").holds

    assert oracle.brute_exists_allocation(inst, efx_orientation) is None


def test_brute_equipartition():
    assert oracle.brute_equipartition([1, 1]) == ((0,), (1,))
    split = oracle.brute_equipartition([3, 1, 2])
    assert split == ((0,), (1, 2))
    assert oracle.brute_equipartition([1]) is None
    assert oracle.brute_equipartition([2, 2, 3]) is None
    with pytest.raises(ValueError):
        oracle.brute_equipartition([])
    with pytest.raises(ValueError):
        oracle.brute_equipartition([0, 1])


def test_brute_2sat_examples():
    empty = TwoSatFormula(0, ())
    assert oracle.brute_2sat(empty) == ()
    contra = TwoSatFormula(1, ((1,), (-1,)))
    assert oracle.brute_2sat(contra) is None
    disj = TwoSatFormula(2, ((1, 2),))
    assert oracle.brute_2sat(disj) == (False, True)


def test_judges_agree_with_general_checker(rng):
    """The orientation judge's EF1/EFX0 answers transcribe the definitions;
    they must agree with the general allocation checker on induced instances."""
    for _ in range(120):
        n = rng.randint(2, 5)
        sign = rng.choice((1, -1))
        edges = []
        for k in range(rng.randint(1, 7)):
            a, b = rng.randrange(n), rng.randrange(n)
            w = sign * rng.randint(0, 3)
            edges.append(Edge(f"e{k}", a, b, Fraction(w), Fraction(w)))
        g = Multigraph(n, tuple(edges))
        inst = graphical_to_instance(g)
        judge = oracle.OrientationJudge(g)
        import itertools
        for combo in itertools.product(*[(e.a,) if e.is_self_loop() else (e.a, e.b)
                                         for e in g.edges]):
            bundles = [[] for _ in range(n)]
            for idx, r in enumerate(combo):
                bundles[r].append(g.edges[idx].id)
            from fairdiv.core import Allocation
            alloc = Allocation.of(bundles)
            assert judge.ef1_ok(combo) == check(inst, alloc, "ef1").holds
            assert judge.efx0_ok(combo) == check(inst, alloc, "efx0").holds


def test_pruned_search_matches_naive(rng):
    for _ in range(150):
        n = rng.randint(2, 6)
        sign = rng.choice((1, -1))
        edges = []
        for k in range(rng.randint(1, 9)):
            a, b = rng.randrange(n), rng.randrange(n)
            w = sign * rng.randint(0, 3)
            edges.append(Edge(f"e{k}", a, b, Fraction(w), Fraction(w)))
        g = Multigraph(n, tuple(edges))
        naive_efx = oracle.first_orientation_satisfying(g, "efx0")
        pruned_efx = oracle.search_orientation(g, "efx0")
        assert (naive_efx is None) == (pruned_efx is None)
        if sign == -1:
            naive_ef1 = oracle.first_orientation_satisfying(g, "ef1")
            pruned_ef1 = oracle.search_orientation(g, "ef1")
            assert (naive_ef1 is None) == (pruned_ef1 is None)


def test_search_orientation_rejects_mixed_signs():
    g = Multigraph.build(2, [("e1", 0, 1, 1), ("e2", 0, 1, -1)])
    with pytest.raises(ValueError):
        oracle.search_orientation(g, "efx0")
