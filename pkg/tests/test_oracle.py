import pytest

from rainbowfactor.core import DegreeRule, DirectedKGraph, GraphSystem, PatternF, RuleKind, min_star_degree
from rainbowfactor.fb import build_fb_graph, count_perfect_matchings
from rainbowfactor.generators import (InstanceKind, InstanceSpec, extremal_classes, gen_complete,
                                      gen_extremal, gen_random_min_degree, raise_min_degree)
from rainbowfactor.oracle import (Factor, Infeasible, Timeout, count_block_factors, direct_rainbow_factor,
                                  exact_rainbow_factor)
from rainbowfactor.verify import is_rainbow_factor

K3 = PatternF.clique(3)


# ---------------------------------------------------------------- oracle

def test_single_triangle(triangles):
    out = exact_rainbow_factor(triangles, K3)
    assert isinstance(out, Factor) and len(out.packing) == 1
    assert is_rainbow_factor(triangles, K3, out.packing)


def test_empty_system_has_empty_factor():
    out = exact_rainbow_factor(GraphSystem(()), K3)
    assert out.status == "factor" and len(out.packing) == 0


def test_extremal_n6_infeasible():
    s = gen_extremal(3, 6)
    assert isinstance(exact_rainbow_factor(s, K3), Infeasible)
    assert isinstance(direct_rainbow_factor(s, K3), Infeasible)


def test_budget_gives_timeout():
    assert isinstance(exact_rainbow_factor(gen_extremal(3, 12), K3, budget=2), Timeout)


def test_size_mismatch():
    with pytest.raises(ValueError):
        exact_rainbow_factor(gen_complete(4, 2, 3), K3)


def test_exact_and_direct_agree_on_small_random_systems():
    for seed in range(15):
        s = gen_random_min_degree(6, 2, 6, DegreeRule(), 3, seed, p_delete=0.8)
        a = exact_rainbow_factor(s, K3)
        b = direct_rainbow_factor(s, K3)
        if a.status == "factor":
            assert is_rainbow_factor(s, K3, a.packing)
            assert b.status == "factor" and is_rainbow_factor(s, K3, b.packing)


def test_block_count_matches_matchings_complete():
    s = gen_complete(6, 2, 6)
    assert count_block_factors(s, K3) == count_perfect_matchings(build_fb_graph(s, K3)) == 20


def test_directed_patterns_with_oracle():
    arcs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    g = DirectedKGraph.digraph(6, arcs)
    s = GraphSystem((g,) * 6)
    assert exact_rainbow_factor(s, PatternF.transitive_tournament(3)).status == "infeasible"
    out = exact_rainbow_factor(s, PatternF.parse("tour:3:01,12,20"))
    assert out.status == "factor" and is_rainbow_factor(s, PatternF.parse("tour:3:01,12,20"), out.packing)


# ---------------------------------------------------------------- generators

def test_extremal_classes():
    assert extremal_classes(3, 6) == [[0, 1, 2], [3, 4], [5]]
    assert extremal_classes(2, 4) == [[0, 1, 2], [3]]
    with pytest.raises(ValueError):
        extremal_classes(3, 7)


@pytest.mark.parametrize("kind", ["identical", "space"])
@pytest.mark.parametrize("t,n", [(3, 6), (3, 9), (2, 4)])
def test_extremal_degree_and_infeasible(kind, t, n):
    s = gen_extremal(t, n, kind)
    F = PatternF.clique(t)
    assert s.m == (n // t) * t * (t - 1) // 2
    assert min(min_star_degree(g, DegreeRule()) for g in s) == n - n // t - 1
    assert exact_rainbow_factor(s, F).status == "infeasible"


def test_extremal_t_equals_n():
    s = gen_extremal(4, 4)
    assert min_star_degree(s[0], DegreeRule()) == 2
    assert exact_rainbow_factor(s, PatternF.clique(4)).status == "infeasible"


def test_raise_min_degree_reaches_target():
    s = raise_min_degree(gen_extremal(3, 9), 6, seed=1)
    assert all(min_star_degree(g, DegreeRule()) >= 6 for g in s)
    assert all(g.edges >= gen_extremal(3, 9)[0].edges for g in s)


def test_random_generator_extremes():
    full = gen_random_min_degree(5, 2, 2, DegreeRule(), 4, seed=0)
    assert all(len(g.edges) == 10 for g in full)
    empty = gen_random_min_degree(5, 2, 2, DegreeRule(), 0, seed=0, p_delete=1.0)
    assert all(not g.edges for g in empty)


def test_random_generator_postcondition():
    s = gen_random_min_degree(9, 2, 9, DegreeRule(), 7, seed=42)
    assert all(min_star_degree(g, DegreeRule()) >= 7 for g in s)


@pytest.mark.parametrize("rule,k,extra", [
    (DegreeRule(RuleKind.OUT), 2, {}),
    (DegreeRule(RuleKind.SEMI), 2, {}),
    (DegreeRule(RuleKind.STANDARD, 2), 3, {}),
    (DegreeRule(RuleKind.PARTITE), 2, {"partition": ((0, 1, 2), (3, 4, 5))}),
])
def test_random_generator_rules(rule, k, extra):
    s = gen_random_min_degree(6, k, 3, rule, 2, seed=7, **extra)
    assert all(min_star_degree(g, rule) >= 2 for g in s)


def test_random_generator_is_seeded():
    a = gen_random_min_degree(8, 2, 3, DegreeRule(), 5, seed=3)
    b = gen_random_min_degree(8, 2, 3, DegreeRule(), 5, seed=3)
    assert a == b


def test_random_generator_rejects_bad_targets():
    with pytest.raises(ValueError):
        gen_random_min_degree(5, 2, 1, DegreeRule(), 5, seed=0)
    with pytest.raises(ValueError):
        gen_random_min_degree(5, 2, 1, DegreeRule(RuleKind.PARTITE), 1, seed=0)


def test_instance_spec_kinds():
    assert InstanceSpec(InstanceKind.COMPLETE, 6, K3).build() == gen_complete(6, 2, 6)
    assert InstanceSpec(InstanceKind.IDENTICAL_EXTREMAL, 6, K3).build() == gen_extremal(3, 6)
    pc = InstanceSpec(InstanceKind.COMPLETE, 6, PatternF.partite_clique(3)).build()
    assert pc.partition == ((0, 1), (2, 3), (4, 5))
    with pytest.raises(ValueError):
        InstanceSpec(InstanceKind.COMPLETE, 7, K3).build()


def test_complete_systems_are_feasible():
    for F in (K3, PatternF.transitive_tournament(3), PatternF.single_edge(2), PatternF.single_edge(3),
              PatternF.partite_clique(3)):
        s = InstanceSpec(InstanceKind.COMPLETE, 6, F).build()
        out = exact_rainbow_factor(s, F)
        assert out.status == "factor" and is_rainbow_factor(s, F, out.packing)
