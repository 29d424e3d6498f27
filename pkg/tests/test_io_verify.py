import pytest

from rainbowfactor.core import DirectedKGraph, GraphSystem, PatternF, RainbowCopy
from rainbowfactor.fb import RainbowPacking
from rainbowfactor.generators import gen_complete
from rainbowfactor.io import (FormatError, dump_hypergraph, dump_system, parse_hypergraph, parse_system,
                              read_system, write_system)
from rainbowfactor.lp import Hypergraph
from rainbowfactor.oracle import exact_rainbow_factor
from rainbowfactor.verify import factor_problems, is_rainbow_factor, packing_problems

K3 = PatternF.clique(3)


# ---------------------------------------------------------------- io

def test_parse_small_instance():
    text = """# three triangles
    3 2 3
    color 0
    0 1 +
    1 2 +
    0 2 +
    color 1
    0 1 +
    1 2 +
    0 2 +
    color 2
    0 1 +
    1 2 +
    0 2 +
    """
    s = parse_system(text)
    assert (s.n, s.k, s.m) == (3, 2, 3)
    assert parse_system(dump_system(s)) == s


def test_directed_signs_follow_orientation():
    s = parse_system("3 2 1 directed\ncolor 0\n1 0 +\n")
    assert s[0].edges == {((0, 1), "-")}


@pytest.mark.parametrize("system", [
    gen_complete(4, 2, 2, directed=True),
    gen_complete(5, 3, 2),
    gen_complete(6, 2, 3, partition=((0, 1), (2, 3), (4, 5))),
])
def test_round_trip(system, tmp_path):
    path = tmp_path / "inst.txt"
    write_system(system, path)
    assert read_system(path) == system


@pytest.mark.parametrize("text,needle", [
    ("", "empty"),
    ("x 2 1\ncolor 0\n", "header"),
    ("3 2 1 bogus\ncolor 0\n", "header token"),
    ("3 2 1\n0 1 +\n", "before any"),
    ("3 2 1\ncolor 0\n0 1\n", "sign"),
    ("3 2 1\ncolor 0\n0 5 +\n", "range"),
    ("3 2 1\ncolor 0\n0 1 -\n", "undirected"),
    ("3 2 2\ncolor 0\n", "no 'color'"),
    ("3 2 1\ncolor 0\ncolor 0\n", "repeated"),
    ("3 2 1\ncolor 0\n0 1 +\n1 0 +\n", "duplicate"),
    ("4 2 1 partite 3\ncolor 0\n", "equal classes"),
])
def test_parse_errors(text, needle):
    with pytest.raises(FormatError, match=needle):
        parse_system(text)


def test_hypergraph_formats():
    H = Hypergraph.of(4, [(0, 1, 2), (1, 2, 3)])
    H2, b = parse_hypergraph(dump_hypergraph(H))
    assert H2 == H and b is None
    H3, b3 = parse_hypergraph("fb 3 3 3 3\n0 1 2 0 1 2\n")
    assert b3 == 6 and H3.edges == ((0, 1, 2, 3, 4, 5),)
    with pytest.raises(FormatError):
        parse_hypergraph("graph 3\n")
    with pytest.raises(FormatError):
        parse_hypergraph("hypergraph 3\n0 a\n")


# ---------------------------------------------------------------- verify

def test_oracle_factor_verifies():
    s = gen_complete(6, 2, 6)
    P = exact_rainbow_factor(s, K3).packing
    assert is_rainbow_factor(s, K3, P)
    assert factor_problems(s, K3, list(P)) == []


def test_missing_copy_detected():
    s = gen_complete(6, 2, 6)
    P = exact_rainbow_factor(s, K3).packing
    half = RainbowPacking(P.copies[:1])
    probs = factor_problems(s, K3, half)
    assert "copies do not partition the vertex set" in probs
    assert packing_problems(s, K3, half) == []


def test_missing_edge_detected():
    tri = DirectedKGraph.undirected(3, [(0, 1), (1, 2)])
    s = GraphSystem((tri,) * 3)
    fake = RainbowCopy((0, 1, 2), (((0, 1), "+"), ((0, 2), "+"), ((1, 2), "+")), (0, 1, 2))
    assert not is_rainbow_factor(s, K3, [fake])


def test_direction_checked_for_tournaments():
    g = DirectedKGraph.digraph(3, [(0, 1), (1, 2), (2, 0)])
    s = GraphSystem((g,) * 3)
    F = PatternF.transitive_tournament(3)
    # template edges 0->1, 0->2, 1->2 mapped identically: 0->2 is missing (only 2->0)
    cp = RainbowCopy((0, 1, 2), (((0, 1), "+"), ((0, 2), "+"), ((1, 2), "+")), (0, 1, 2))
    assert any("missing" in p for p in factor_problems(s, F, [cp]))


def test_shared_colour_detected():
    s = gen_complete(6, 2, 6)
    a = RainbowCopy((0, 1, 2), (), (0, 1, 2))
    b = RainbowCopy((3, 4, 5), (), (2, 3, 4))
    assert "copies share a colour" in packing_problems(s, K3, [a, b])


def test_non_transversal_partite_copy():
    part = ((0, 1), (2, 3), (4, 5))
    s = gen_complete(6, 2, 3, partition=part)
    cp = RainbowCopy((0, 1, 2), (), (0, 1, 2))
    assert any("transversal" in p for p in factor_problems(s, PatternF.partite_clique(3), [cp]))
