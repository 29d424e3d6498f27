import pytest

from rainbowfactor.core import DirectedKGraph, GraphSystem, PatternF
from rainbowfactor.fb import (FbGraph, FbView, RainbowPacking, build_fb_graph, count_perfect_matchings,
                              is_balanced, matching_to_packing, packing_to_matching)
from rainbowfactor.generators import gen_complete

from conftest import identical


def test_triangles_reduce_to_one_edge(triangles):
    g = build_fb_graph(triangles, PatternF.clique(3))
    assert g.edges == (((0, 1, 2), (0, 1, 2)),)
    assert g.is_balanced()


def test_two_matchings_give_four_edges():
    pm = DirectedKGraph.undirected(4, [(0, 1), (2, 3)])
    g = build_fb_graph(identical(pm, 2), PatternF.single_edge(2))
    assert len(g.edges) == 4
    assert g.by_block == [[(0, 1), (2, 3)], [(0, 1), (2, 3)]]


def test_empty_colour_kills_its_block():
    k4 = DirectedKGraph.complete(6)
    s = GraphSystem((k4, k4, k4, k4, DirectedKGraph.undirected(6, []), k4))
    g = build_fb_graph(s, PatternF.clique(3))
    assert g.by_block[1] == [] and len(g.by_block[0]) == 20


def test_strict_mode_checks_sizes():
    s = identical(DirectedKGraph.complete(4), 3)
    with pytest.raises(ValueError):
        build_fb_graph(s, PatternF.clique(3))
    g = build_fb_graph(s, PatternF.clique(3), strict=False)
    assert not g.is_balanced() and len(g.edges) == 4


def test_matching_round_trip(triangles):
    F = PatternF.clique(3)
    g = build_fb_graph(triangles, F)
    P = matching_to_packing(list(g.edges), triangles, F)
    assert len(P) == 1 and P.colors == {0, 1, 2} and P.is_factor(3, 3)
    assert packing_to_matching(P) == list(g.edges)
    assert len(matching_to_packing([], triangles, F)) == 0


def test_matching_to_packing_rejects_overlap():
    s = gen_complete(6, 2, 6)
    F = PatternF.clique(3)
    with pytest.raises(ValueError):
        matching_to_packing([((0, 1, 2), (0, 1, 2)), ((3, 4, 5), (2, 3, 4))], s, F)


def test_packing_rejects_shared_vertex():
    s = gen_complete(6, 2, 6)
    g = build_fb_graph(s, PatternF.clique(3))
    a = matching_to_packing([g.edges[0]], s, PatternF.clique(3)).copies[0]
    with pytest.raises(ValueError):
        RainbowPacking((a, a))


def test_is_balanced_examples():
    g = FbGraph(3, 3, 3, 3, ())
    assert is_balanced([("A", 0), ("A", 1), ("A", 2), ("B", 4), ("B", 5), ("B", 6)], g)
    assert is_balanced([], g)
    h = FbGraph(2, 4, 1, 2, (), strict=True)
    assert not is_balanced([("A", 0)], h)


def test_perfect_matchings_are_factors():
    s = gen_complete(6, 2, 6)
    F = PatternF.clique(3)
    g = build_fb_graph(s, F)
    # K6 splits into two triangles in 10 ways; two blocks can be assigned 2 ways
    assert count_perfect_matchings(g) == 20


def test_serialisation_round_trip():
    g = build_fb_graph(gen_complete(6, 2, 6), PatternF.clique(3))
    assert FbGraph.loads(g.dumps()) == g
    with pytest.raises(ValueError):
        FbGraph.loads("fb 3 3 3 3\n0 1 2 0 1\n")


def test_view_matches_materialised_graph():
    s = gen_complete(9, 2, 9)
    F = PatternF.clique(3)
    g = build_fb_graph(s, F)
    v = FbView(s, F)
    assert v.materialise() == g
    assert v.edges_within([0, 2], [1, 2, 3, 7]) == g.edges_within([0, 2], [1, 2, 3, 7])
