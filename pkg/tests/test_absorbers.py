import itertools
import random

import pytest

from rainbowfactor.absorbers import (CliqueGadget, MatchingGadget, RainbowAbsorber, absorb,
                                     enumerate_clique_absorbers, enumerate_matching_absorbers, gadget_for,
                                     validate_absorber)
from rainbowfactor.core import DirectedKGraph, GraphSystem, PatternF, PatternKind, RainbowCopy
from rainbowfactor.fb import build_fb_graph
from rainbowfactor.generators import gen_complete

EDGE = PatternF.single_edge(2)
K3 = PatternF.clique(3)


def e(u, v, c):
    verts = tuple(sorted((u, v)))
    return RainbowCopy(verts, ((verts, "+"),), (c,))


def hand_absorber():
    # T = {0, 1}; interior {2, 3} in colour 1; exterior {2, 0} in colour 0, {3, 1} in colour 1
    return RainbowAbsorber((0, 1), (2, 3), (e(2, 3, 1),), (e(0, 2, 0), e(1, 3, 1)), (0,))


def k5_pair():
    return gen_complete(5, 2, 2)


def test_hand_absorber_validates():
    ok, reason = validate_absorber(hand_absorber(), k5_pair(), EDGE)
    assert ok, reason


def test_overlap_rejected():
    a = hand_absorber()
    bad = RainbowAbsorber((0, 2), a.L, a.interior, a.exterior, a.new_colors)
    assert validate_absorber(bad, k5_pair(), EDGE) == (False, "B∩L nonempty")


def test_colour_clash_rejected():
    bad = RainbowAbsorber((0, 1), (2, 3), (e(2, 3, 1),), (e(0, 2, 1), e(1, 3, 1)), (0,))
    assert validate_absorber(bad, k5_pair(), EDGE) == (False, "color clash")


def test_missing_host_edge_rejected():
    g0 = DirectedKGraph.undirected(5, [(0, 1)])
    s = GraphSystem((g0, DirectedKGraph.complete(5)))
    ok, reason = validate_absorber(hand_absorber(), s, EDGE)
    assert not ok and "not a rainbow" in reason


def test_absorb_modes():
    a = hand_absorber()
    inner = absorb(a, "interior", EDGE)
    outer = absorb(a, "exterior", EDGE)
    assert len(inner) == 1 and len(outer) == 2
    assert outer.vertices >= {0, 1}
    assert len(outer.vertices) - len(inner.vertices) == EDGE.b
    assert len(outer.colors) - len(inner.colors) == EDGE.f
    with pytest.raises(ValueError):
        absorb(a, "sideways", EDGE)


def brute_matching_gadgets(s, T, C):
    """Every (L, u, labelling) with L an edge of colour C[1] off T, u in L,
    {u, v1} in colour C[0] and L - u + v2 in colour C[1]."""
    found = set()
    has = lambda pair, c: (tuple(sorted(pair)), "+") in s[c].edges
    for L in itertools.combinations([v for v in range(s.n) if v not in T], 2):
        if not has(L, C[1]):
            continue
        for u in L:
            w = L[0] if u == L[1] else L[1]
            for v1, v2 in itertools.permutations(T):
                if has((u, v1), C[0]) and has((w, v2), C[1]):
                    found.add((L, u, v1))
    return found


def test_matching_absorbers_match_brute_force():
    s = k5_pair()
    g = build_fb_graph(s, EDGE, strict=False)
    got = enumerate_matching_absorbers(g, (0, 1), (0, 1))
    assert len(got) == len(brute_matching_gadgets(s, (0, 1), (0, 1))) == 12
    for a in got:
        assert validate_absorber(a, s, EDGE)[0]
    assert any(a.L == (2, 3) for a in got)


def test_matching_absorbers_sparse_random_systems():
    rng = random.Random(5)
    for _ in range(20):
        gs = []
        for _ in range(2):
            gs.append(DirectedKGraph.undirected(6, [p for p in itertools.combinations(range(6), 2)
                                                    if rng.random() < 0.6]))
        s = GraphSystem(tuple(gs))
        g = build_fb_graph(s, EDGE, strict=False)
        got = enumerate_matching_absorbers(g, (0, 1), (0, 1))
        assert len(got) == len(brute_matching_gadgets(s, (0, 1), (0, 1)))


def test_matching_absorbers_degenerate():
    s = GraphSystem((DirectedKGraph.undirected(5, [(0, 1)]), DirectedKGraph.complete(5)))
    g = build_fb_graph(s, EDGE, strict=False)
    # colour 0 lies inside T, so no head edge {u, v1} with u off T exists
    assert enumerate_matching_absorbers(g, (0, 1), (0, 1)) == []
    assert enumerate_matching_absorbers(build_fb_graph(k5_pair(), EDGE, strict=False), (0, 1), (0, 1), 0) == []
    with pytest.raises(ValueError):
        enumerate_matching_absorbers(g, (0, 0), (0, 1))


def test_clique_absorbers_complete_system():
    s = gen_complete(12, 2, 12)
    found = enumerate_clique_absorbers(s, K3, (0, 1, 2), list(range(12)), limit=4)
    assert len(found) == 4
    for a in found:
        assert validate_absorber(a, s, K3) == (True, "ok")
        assert len(a.L) == 9 and set(a.new_colors) == {9, 10, 11}


def test_clique_absorbers_need_room():
    # bridge (3) + interiors (3 * 2) fresh vertices + 3 targets need n >= 12
    s = gen_complete(9, 2, 12)
    assert enumerate_clique_absorbers(s, K3, (0, 1, 2), list(range(12)), limit=1) == []


def test_clique_absorbers_empty_colour():
    full = DirectedKGraph.complete(12)
    gs = [full] * 12
    gs[10] = DirectedKGraph.undirected(12, [])
    s = GraphSystem(tuple(gs))
    assert enumerate_clique_absorbers(s, K3, (0, 1, 2), list(range(12)), limit=1) == []


def test_clique_absorber_input_checks():
    s = gen_complete(12, 2, 12)
    with pytest.raises(ValueError):
        enumerate_clique_absorbers(s, K3, (0, 1), list(range(12)))
    with pytest.raises(ValueError):
        enumerate_clique_absorbers(s, K3, (0, 1, 2), list(range(11)))
    with pytest.raises(ValueError):
        enumerate_clique_absorbers(s, EDGE, (0, 1), [0, 1])


def test_gadgets_build_valid_absorbers():
    rng = random.Random(3)
    s = gen_complete(15, 2, 15)
    gad = gadget_for(s, K3)
    assert isinstance(gad, CliqueGadget) and gad.interior_colors == 9
    inner = gad.sample_interior(list(range(9)), {0, 1, 2}, rng)
    a = gad.complete(inner, (0, 1, 2), (12, 13, 14))
    assert a is not None and validate_absorber(a, s, K3)[0]
    assert gad.complete(inner, tuple(sorted(inner[0].vertices)), (12, 13, 14)) is None

    s2 = gen_complete(6, 2, 3)
    mg = gadget_for(s2, EDGE)
    assert isinstance(mg, MatchingGadget) and mg.interior_copies == 1
    inner = mg.sample_interior([1], {0, 1}, rng)
    a = mg.complete(inner, (0, 1), (0,))
    assert a is not None and validate_absorber(a, s2, EDGE)[0]


def test_gadget_for_unsupported():
    # a 3-uniform clique has no gadget
    F = PatternF(PatternKind.CLIQUE, DirectedKGraph.complete(4, 3), 4)
    with pytest.raises(NotImplementedError):
        gadget_for(gen_complete(8, 3, 8), F)
