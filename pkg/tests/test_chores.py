"""Chores orientation deciders: 2SAT, PD covers, EF1/EFX0 pipelines,
differential testing against the oracle."""

from fractions import Fraction

import pytest

from fairdiv import chores, oracle
from fairdiv.chores import (ObjectiveChoresGraph, PdCoverInstance,
                            TwoSatFormula, ef1_orient_graph, efx_orient_chores,
                            efx_orient_objective, find_pd_vertex_cover,
                            is_objective_efx0, solve_2sat)
from fairdiv.core import Edge, Multigraph


def graph(n, specs):
    return Multigraph.build(n, specs)


def k4_minus_ones():
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]
    return graph(4, [(f"e{i}", a, b, -1) for i, (a, b) in enumerate(pairs)])


# --- EF1 --------------------------------------------------------------------


def test_ef1_k4_none():
    assert ef1_orient_graph(k4_minus_ones()) is None


def test_ef1_c4_cyclic():
    c4 = graph(4, [(f"e{i}", a, b, -1)
                   for i, (a, b) in enumerate([(0, 1), (1, 2), (2, 3), (3, 0)])])
    pi = ef1_orient_graph(c4)
    assert pi is not None
    judge = oracle.OrientationJudge(c4)
    assert judge.ef1_ok(judge.receivers_of(pi))
    received = [0, 0, 0, 0]
    for _, v in pi.assign:
        received[v] += 1
    assert received == [1, 1, 1, 1]


def test_ef1_zero_side_edge():
    g = graph(2, [("e1", 0, 1, 0, -1)])
    pi = ef1_orient_graph(g)
    assert pi.as_dict() == {"e1": 0}


def test_ef1_rejects_positive():
    with pytest.raises(ValueError, match="positive"):
        ef1_orient_graph(graph(2, [("e1", 0, 1, 1)]))


def test_ef1_rejects_multiplicity():
    with pytest.raises(ValueError, match="multiplicity"):
        ef1_orient_graph(graph(2, [("e1", 0, 1, -1), ("e2", 0, 1, -1)]))


def test_ef1_self_loop_component():
    g = graph(1, [("loop", 0, 0, -1)])
    pi = ef1_orient_graph(g)
    assert pi.as_dict() == {"loop": 0}


# --- 2SAT -------------------------------------------------------------------


def test_2sat_examples():
    assert solve_2sat(TwoSatFormula(2, ())) == [False, False]
    assert solve_2sat(TwoSatFormula(1, ((1,), (-1,)))) is None
    model = solve_2sat(TwoSatFormula(2, ((1, 2), (-1, 2))))
    assert model is not None and model[1] is True


def test_2sat_against_brute(rng):
    for _ in range(300):
        n_vars = rng.randint(1, 6)
        clauses = []
        for _ in range(rng.randint(0, 10)):
            size = rng.choice((1, 2))
            clause = tuple(rng.choice((1, -1)) * rng.randint(1, n_vars)
                           for _ in range(size))
            clauses.append(clause)
        formula = TwoSatFormula(n_vars, tuple(clauses))
        fast = solve_2sat(formula)
        slow = oracle.brute_2sat(formula)
        assert (fast is None) == (slow is None)
        if fast is not None:
            assert formula.satisfied_by(fast)


# --- PD covers --------------------------------------------------------------


def test_pd_cover_examples():
    empty = PdCoverInstance(3, (), (), frozenset({0, 1, 2}))
    assert find_pd_vertex_cover(empty) == set()

    one_edge = PdCoverInstance(2, ((0, 1),), (frozenset({0, 1}),), frozenset())
    cover = find_pd_vertex_cover(one_edge)
    assert cover is not None and len(cover) == 1

    blocked = PdCoverInstance(2, ((0, 1),), (), frozenset({0, 1}))
    assert find_pd_vertex_cover(blocked) is None


def test_pd_cover_matches_subset_brute(rng):
    import itertools
    for _ in range(120):
        n = rng.randint(1, 6)
        edges = tuple(
            (rng.randrange(n), rng.randrange(n))
            for _ in range(rng.randint(0, 6)))
        pool = list(range(n))
        rng.shuffle(pool)
        groups = []
        while pool and rng.random() < 0.5:
            size = min(len(pool), rng.randint(1, 3))
            groups.append(frozenset(pool[:size]))
            pool = pool[size:]
        excluded = frozenset(v for v in pool if rng.random() < 0.3)
        pd = PdCoverInstance(n, edges, tuple(groups), excluded)
        fast = find_pd_vertex_cover(pd)
        slow = None
        for size in range(n + 1):
            for combo in itertools.combinations(range(n), size):
                if pd.is_cover(set(combo)):
                    slow = set(combo)
                    break
            if slow is not None:
                break
        assert (fast is None) == (slow is None)
        if fast is not None:
            assert pd.is_cover(fast)


def test_pd_cover_validation():
    with pytest.raises(ValueError, match="disjoint"):
        PdCoverInstance(3, (), (frozenset({0, 1}), frozenset({1, 2})), frozenset())


# --- EFX0 objective ---------------------------------------------------------


def test_efx_objective_path():
    g = graph(3, [("e1", 0, 1, -1), ("e2", 1, 2, -1)])
    pi = efx_orient_objective(ObjectiveChoresGraph(g))
    assert pi is not None
    assert is_objective_efx0(ObjectiveChoresGraph(g), pi)


def test_efx_objective_pigeonhole_fail_fast():
    g = graph(3, [("e1", 0, 1, -1), ("e2", 1, 2, -1), ("e3", 0, 2, -1),
                  ("loop", 0, 0, -1)])
    assert efx_orient_objective(ObjectiveChoresGraph(g)) is None


def test_efx_objective_triangle_pendant_dummy():
    g = graph(5, [("t1", 0, 1, -1), ("t2", 1, 2, -1), ("t3", 0, 2, -1),
                  ("p", 2, 3, -1), ("d", 3, 4, 0)])
    fast = efx_orient_objective(ObjectiveChoresGraph(g))
    slow = oracle.first_orientation_satisfying(g, "efx0")
    assert (fast is None) == (slow is None)
    if fast is not None:
        judge = oracle.OrientationJudge(g)
        assert judge.efx0_ok(judge.receivers_of(fast))


def test_efx_objective_rejects_subjective():
    with pytest.raises(ValueError, match="subjective"):
        ObjectiveChoresGraph(graph(2, [("e1", 0, 1, 0, -1)]))


def test_objective_predicate_matches_general_checker(rng):
    """Unique-edge-or-all-dummies must coincide with the EFX0 definition."""
    import itertools
    from fairdiv.core import Allocation, graphical_to_instance
    from fairdiv.checks import check
    for _ in range(60):
        n = rng.randint(2, 4)
        edges = []
        used = set()
        for k in range(rng.randint(1, 6)):
            a, b = rng.randrange(n), rng.randrange(n)
            key = (min(a, b), max(a, b))
            if key in used:
                continue
            used.add(key)
            w = rng.choice((0, -1, -2))
            edges.append(Edge(f"e{k}", a, b, Fraction(w), Fraction(w)))
        g = Multigraph(n, tuple(edges))
        og = ObjectiveChoresGraph(g)
        inst = graphical_to_instance(g)
        for combo in itertools.product(*[(e.a,) if e.is_self_loop() else (e.a, e.b)
                                         for e in g.edges]):
            from fairdiv.core import Orientation
            pi = Orientation.of({e.id: v for e, v in zip(g.edges, combo)})
            bundles = [[] for _ in range(n)]
            for e, v in zip(g.edges, combo):
                bundles[v].append(e.id)
            report = check(inst, Allocation.of(bundles), "efx0")
            assert is_objective_efx0(og, pi) == report.holds


# --- EFX0 general (subdivision) --------------------------------------------


def test_efx_chores_single_subjective_edge():
    g = graph(2, [("e1", 0, 1, 0, -1)])
    pi = efx_orient_chores(g)
    assert pi is not None


def test_efx_chores_k4_none():
    assert efx_orient_chores(k4_minus_ones()) is None


def test_efx_chores_two_components_joined_by_dummies():
    # two negative 4-vertex components joined by dummy edges
    negative = [("n1", 0, 1, -1), ("n2", 1, 2, -1), ("n3", 2, 0, -1),
                ("n4", 2, 3, -1),
                ("m1", 4, 5, -1), ("m2", 5, 6, -1), ("m3", 6, 7, -1),
                ("m4", 7, 4, -1)]
    dummies = [("d1", 3, 4, 0), ("d2", 0, 7, 0), ("d3", 2, 5, 0)]
    g = graph(8, negative + dummies)
    fast = efx_orient_chores(g)
    slow = oracle.search_orientation(g, "efx0")
    assert (fast is None) == (slow is None)


def test_subdivision_equivalence_both_directions(rng):
    """Oracle-level: G has an EFX0 orientation iff its subdivided objective
    graph does (both directions, on random small graphs)."""
    from fairdiv.chores import subdivide_subjective
    for _ in range(50):
        n = rng.randint(2, 4)
        used = set()
        edges = []
        for k in range(rng.randint(1, 6)):
            a, b = rng.randrange(n), rng.randrange(n)
            key = (min(a, b), max(a, b))
            if key in used:
                continue
            used.add(key)
            wa = Fraction(rng.choice((0, -1, -2)))
            wb = wa if a == b else Fraction(rng.choice((0, -1, -2)))
            edges.append(Edge(f"e{k}", a, b, wa, wb))
        g = Multigraph(n, tuple(edges))
        og, _mapping = subdivide_subjective(g)
        left = oracle.first_orientation_satisfying(g, "efx0") is not None
        right = oracle.first_orientation_satisfying(og.g, "efx0") is not None
        assert left == right


def test_subdivision_preserves_decidability(rng):
    """Existence for G iff existence for the subdivided objective graph."""
    for _ in range(80):
        n = rng.randint(2, 5)
        used = set()
        edges = []
        for k in range(rng.randint(1, 8)):
            a, b = rng.randrange(n), rng.randrange(n)
            key = (min(a, b), max(a, b))
            if key in used:
                continue
            used.add(key)
            wa = Fraction(rng.choice((0, -1, -2)))
            wb = wa if a == b else Fraction(rng.choice((0, -1, -2)))
            edges.append(Edge(f"e{k}", a, b, wa, wb))
        g = Multigraph(n, tuple(edges))
        direct = oracle.first_orientation_satisfying(g, "efx0")
        fast = efx_orient_chores(g)
        assert (fast is None) == (direct is None)
        if fast is not None:
            judge = oracle.OrientationJudge(g)
            assert judge.efx0_ok(judge.receivers_of(fast))


def test_ef1_differential(rng):
    for _ in range(120):
        n = rng.randint(2, 6)
        used = set()
        edges = []
        for k in range(rng.randint(1, 9)):
            a, b = rng.randrange(n), rng.randrange(n)
            key = (min(a, b), max(a, b))
            if key in used:
                continue
            used.add(key)
            wa = Fraction(rng.choice((0, -1, -2)))
            wb = wa if a == b else Fraction(rng.choice((0, -1, -2)))
            edges.append(Edge(f"e{k}", a, b, wa, wb))
        g = Multigraph(n, tuple(edges))
        fast = ef1_orient_graph(g)
        slow = oracle.first_orientation_satisfying(g, "ef1")
        assert (fast is None) == (slow is None)
        if fast is not None:
            judge = oracle.OrientationJudge(g)
            assert judge.ef1_ok(judge.receivers_of(fast))
