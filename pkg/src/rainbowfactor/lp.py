"""Fractional matchings and covers, Farkas certificates and clique complexes."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import simplex
from .core import GraphSystem, PatternF, hosts_rainbow_copy
from .fb import FbGraph


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(sorted(e)) for e in self.edges)
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        for e in edges:
            if not e or len(set(e)) != len(e) or not all(0 <= v < self.n for v in e):
                raise ValueError(f"bad edge {e}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def of(cls, n: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        return cls(n, tuple(tuple(sorted(e)) for e in edges))

    @classmethod
    def from_fb(cls, g: FbGraph) -> "Hypergraph":
        return cls(g.m + g.n, tuple(g.flat_edges()))

    def uniformity(self) -> int | None:
        sizes = {len(e) for e in self.edges}
        return sizes.pop() if len(sizes) == 1 else None


class SolutionKind(enum.Enum):
    MATCHING = "matching"
    COVER = "cover"


@dataclass(frozen=True)
class FarkasCertificate:
    """``a`` with ``a.1 < 0`` and ``a.chi(e) >= 0`` for every edge."""

    a: tuple[Fraction, ...]

    def check(self, H: Hypergraph) -> bool:
        return sum(self.a) < 0 and all(sum(self.a[v] for v in e) >= 0 for e in H.edges)


@dataclass(frozen=True)
class FractionalSolution:
    kind: SolutionKind
    weights: dict
    value: Fraction
    certificate: FarkasCertificate | None = field(default=None, compare=False)

    def is_feasible(self, H: Hypergraph) -> bool:
        if any(not (0 <= w <= 1) for w in self.weights.values()):
            return False
        if self.kind is SolutionKind.MATCHING:
            load = [Fraction(0)] * H.n
            for e, w in self.weights.items():
                for v in e:
                    load[v] += w
            return all(x <= 1 for x in load)
        return all(sum(self.weights[v] for v in e) >= 1 for e in H.edges)

    def is_perfect(self, H: Hypergraph) -> bool:
        load = [Fraction(0)] * H.n
        for e, w in self.weights.items():
            for v in e:
                load[v] += w
        return all(x == 1 for x in load)


def max_fractional_matching(H: Hypergraph) -> FractionalSolution:
    """Maximum fractional matching (value nu*) by exact simplex."""
    if H.n < 1:
        raise ValueError("hypergraph needs at least one vertex")
    if not H.edges:
        return FractionalSolution(SolutionKind.MATCHING, {}, Fraction(0))
    rows = [[1 if v in e else 0 for e in H.edges] for v in range(H.n)]
    res = simplex.solve([1] * len(H.edges), rows, ["<="] * H.n, [1] * H.n)
    if res.status != "optimal":
        raise simplex.LPError(f"matching LP ended {res.status}")
    return FractionalSolution(SolutionKind.MATCHING, dict(zip(H.edges, res.x)), res.value)


def min_fractional_cover(H: Hypergraph) -> FractionalSolution:
    """Minimum fractional vertex cover (value tau*), solved as its own LP."""
    if H.n < 1:
        raise ValueError("hypergraph needs at least one vertex")
    if not H.edges:
        return FractionalSolution(SolutionKind.COVER, {v: Fraction(0) for v in range(H.n)}, Fraction(0))
    rows = [[1 if v in e else 0 for v in range(H.n)] for e in H.edges]
    res = simplex.solve([-1] * H.n, rows, [">="] * len(H.edges), [1] * len(H.edges))
    if res.status != "optimal":
        raise simplex.LPError(f"cover LP ended {res.status}")
    return FractionalSolution(SolutionKind.COVER, dict(enumerate(res.x)), -res.value)


def has_perfect_fractional_matching(H: Hypergraph, b: int) -> tuple[bool, FractionalSolution | FarkasCertificate]:
    """PFM of a b-uniform hypergraph, or a Farkas certificate that none exists.

    The certificate is ``a = omega - 1/b`` for an optimal cover ``omega``:
    ``a.chi(e) = omega(e) - 1 >= 0`` and ``a.1 = tau* - n/b < 0``.
    """
    if any(len(e) != b for e in H.edges):
        raise ValueError(f"hypergraph is not {b}-uniform")
    target = Fraction(H.n, b)
    if H.edges:
        best = max_fractional_matching(H)
        if best.value == target:
            return True, best
    cover = min_fractional_cover(H)
    cert = FarkasCertificate(tuple(cover.weights[v] - Fraction(1, b) for v in range(H.n)))
    if not cert.check(H):
        raise simplex.LPError("cover-derived Farkas certificate failed its own check")
    return False, cert


def lift_block_pfm(g: FbGraph) -> tuple[bool, FractionalSolution | None]:
    """Solve the PFM LP on the whole (f,b)-graph."""
    H = Hypergraph.from_fb(g)
    if H.n == 0:
        return True, FractionalSolution(SolutionKind.MATCHING, {}, Fraction(0))
    ok, sol = has_perfect_fractional_matching(H, g.f + g.b)
    return (True, sol) if ok else (False, None)


def block_average_pfm(g: FbGraph, block_pfms: Sequence[FractionalSolution]) -> FractionalSolution:
    """PFM of ``g`` assembled from per-block PFMs, each scaled by b/n."""
    scale = Fraction(g.b, g.n)
    weights = {}
    for blk, sol in zip(g.blocks, block_pfms):
        for e, w in sol.weights.items():
            if w:
                weights[blk + tuple(g.m + v for v in e)] = w * scale
    return FractionalSolution(SolutionKind.MATCHING, weights, sum(weights.values(), Fraction(0)))


@dataclass(frozen=True)
class Complex:
    """Downward-closed hypergraph; ``levels[r]`` is the set of r-edges."""

    n: int
    levels: tuple[frozenset, ...]
    partition: tuple[tuple[int, ...], ...] | None = None

    @property
    def k(self) -> int:
        return len(self.levels) - 1

    @classmethod
    def from_top(cls, n: int, top: Iterable[Iterable[int]], k: int, partition=None,
                 base: Iterable[Iterable[int]] = ()) -> "Complex":
        """Downward closure of ``top`` (k-sets) plus any extra lower edges in ``base``."""
        levels: list[set] = [set() for _ in range(k + 1)]
        for e in itertools.chain(top, base):
            e = frozenset(e)
            for r in range(len(e) + 1):
                for sub in itertools.combinations(sorted(e), r):
                    levels[r].add(frozenset(sub))
        levels[0].add(frozenset())
        for v in range(n):
            levels[1].add(frozenset([v]))
        return cls(n, tuple(frozenset(lv) for lv in levels), partition)

    def is_closed(self) -> bool:
        for r in range(1, self.k + 1):
            for e in self.levels[r]:
                for v in e:
                    if e - {v} not in self.levels[r - 1]:
                        return False
        return frozenset() in self.levels[0]

    def class_size(self) -> int:
        return len(self.partition[0]) if self.partition else self.n


def clique_complex(sys_slice: GraphSystem, kind: str = "directed") -> Complex:
    """J_r = vertex sets of rainbow T_r (``directed``) or partite K_r (``partite``).

    Colours of a copy are any distinct colours of the slice; ``m = C(k,2)``.
    """
    m = sys_slice.m
    k = next((r for r in range(2, 64) if r * (r - 1) // 2 == m), None)
    if k is None:
        raise ValueError(f"slice with m={m} colours is not C(k,2) for any k")
    if kind not in ("directed", "partite"):
        raise ValueError(f"unknown complex kind {kind!r}")
    if kind == "partite" and sys_slice.partition is None:
        raise ValueError("partite clique complex needs a partitioned system")
    n = sys_slice.n
    levels: list[set] = [{frozenset()}, {frozenset([v]) for v in range(n)}]
    for r in range(2, k + 1):
        F = (PatternF.transitive_tournament(r) if kind == "directed" else PatternF.partite_clique(r))
        cur = set()
        for prev in levels[r - 1]:
            for v in range(max(prev) + 1, n):
                W = tuple(sorted(prev | {v}))
                if all(frozenset(W) - {u} in levels[r - 1] for u in W) and _rainbow_any(sys_slice, F, W):
                    cur.add(frozenset(W))
        levels.append(cur)
    return Complex(n, tuple(frozenset(lv) for lv in levels), sys_slice.partition if kind == "partite" else None)


def _rainbow_any(sys: GraphSystem, F: PatternF, W: Sequence[int]) -> bool:
    """Whether W hosts a rainbow copy of F using any f distinct colours of ``sys``."""
    return any(hosts_rainbow_copy(sys, F, W, cols) for cols in itertools.combinations(range(sys.m), F.f))


def degree_sequence(J: Complex) -> tuple[int, ...]:
    """(delta_0, ..., delta_{k-1}); partite complexes use the per-class minimum."""
    k = J.k
    out = []
    for r in range(k):
        if r == 0:
            out.append(J.class_size() if J.partition else J.n)
            continue
        lower, upper = J.levels[r], J.levels[r + 1]
        if not lower:
            out.append(0)
            continue
        ext: dict[frozenset, list[int]] = {e: [] for e in lower}
        for big in upper:
            for v in big:
                small = big - {v}
                if small in ext:
                    ext[small].append(v)
        if J.partition is None:
            out.append(min(len(vs) for vs in ext.values()))
            continue
        cls = {v: i for i, c in enumerate(J.partition) for v in c}
        best = None
        for e, vs in ext.items():
            used = {cls[v] for v in e}
            for i in range(len(J.partition)):
                if i not in used:
                    cnt = sum(1 for v in vs if cls[v] == i)
                    best = cnt if best is None else min(best, cnt)
        out.append(best if best is not None else 0)
    if J.partition is not None:
        # delta*_0 counts single vertices available in each class
        out[0] = min(sum(1 for v in c if frozenset([v]) in J.levels[1]) for c in J.partition)
    return tuple(out)


def degree_bound(J: Complex) -> tuple[Fraction, ...]:
    n, k = J.class_size(), J.k
    return tuple(Fraction((k - r) * n, k) for r in range(k))


def meets_bound(J: Complex) -> bool:
    return all(d >= bd for d, bd in zip(degree_sequence(J), degree_bound(J)))


class GreedyStuck(RuntimeError):
    def __init__(self, prefix: tuple[int, ...], message: str):
        super().__init__(message)
        self.prefix = prefix


def greedy_low_index_edge(J: Complex, order: Sequence[int] | Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Grow a k-edge vertex by vertex, always taking the lowest-ranked extension.

    Uniform complexes take one ranking of all vertices; partite complexes
    take one ranking per class and draw the j-th vertex from class j.
    The j-th chosen vertex must have rank at most (j-1)n/k + 1.
    """
    k = J.k
    n = J.class_size()
    partite = J.partition is not None
    chosen: list[int] = []
    ranks: list[int] = []
    for j in range(k):
        pool = order[j] if partite else order
        current = frozenset(chosen)
        pick = None
        for rank, v in enumerate(pool, start=1):
            if v in current:
                continue
            if current | {v} in J.levels[j + 1]:
                pick = (rank, v)
                break
        if pick is None:
            raise GreedyStuck(tuple(chosen), f"no extension of {tuple(chosen)} at step {j + 1}")
        rank, v = pick
        if rank * k > j * n + k:
            raise GreedyStuck(tuple(chosen), f"step {j + 1} needed rank {rank} > {j}n/{k} + 1")
        chosen.append(v)
        ranks.append(rank)
    return tuple(chosen)


@dataclass(frozen=True)
class DegreeSequenceReport:
    degree_sequence: tuple[int, ...]
    bound_met: bool
    has_pfm: bool
    solution: FractionalSolution | None
    certificate: FarkasCertificate | None


def check_degree_sequence_pfm(J: Complex) -> DegreeSequenceReport:
    """Compare the degree sequence with (n, (k-1)n/k, ..., n/k) and solve the PFM LP on J_k."""
    seq = degree_sequence(J)
    bound = meets_bound(J)
    top = Hypergraph.of(J.n, [sorted(e) for e in J.levels[J.k]])
    ok, out = has_perfect_fractional_matching(top, J.k)
    if bound and not ok:
        raise AssertionError(f"degree sequence {seq} meets the bound but J_k has no PFM")
    return DegreeSequenceReport(seq, bound, ok, out if ok else None, None if ok else out)
