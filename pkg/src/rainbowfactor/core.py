"""Directed k-graph systems, patterns, degree rules and rainbow-copy search.

An edge is a pair ``(vertices, sign)`` where ``vertices`` is a sorted tuple
of ``k`` distinct integers and ``sign`` is ``'+'`` or ``'-'``.  The sign is
an orientation of the sorted vertex tuple; relabelling the vertices by a
permutation of odd parity flips it.  For ``k = 2`` this is the usual arc
convention: ``((u, v), '+')`` with ``u < v`` is the arc ``u -> v`` and
``((u, v), '-')`` is ``v -> u``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

Edge = tuple[tuple[int, ...], str]

SIGNS = ("+", "-")


def flip(sign: str) -> str:
    return "-" if sign == "+" else "+"


def parity(seq: Sequence[int]) -> int:
    """Parity (0 even, 1 odd) of the permutation sorting ``seq``."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv & 1


def orient(vertices: Sequence[int], sign: str) -> Edge:
    """Canonical edge for the oriented tuple ``vertices`` carrying ``sign``."""
    key = tuple(sorted(vertices))
    if len(set(key)) != len(key):
        raise ValueError(f"repeated vertex in {tuple(vertices)}")
    return key, (flip(sign) if parity(vertices) else sign)


def arc(u: int, v: int) -> Edge:
    """The directed 2-edge ``u -> v``."""
    return orient((u, v), "+")


@dataclass(frozen=True)
class DirectedKGraph:
    n: int
    k: int
    edges: frozenset = frozenset()
    partition: tuple[tuple[int, ...], ...] | None = None
    directed: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("uniformity must be positive")
        edges = frozenset(self.edges)
        object.__setattr__(self, "edges", edges)
        for verts, sign in edges:
            if len(verts) != self.k or len(set(verts)) != self.k:
                raise ValueError(f"edge {verts} is not a {self.k}-set")
            if tuple(sorted(verts)) != tuple(verts):
                raise ValueError(f"edge {verts} is not sorted")
            if not all(0 <= v < self.n for v in verts):
                raise ValueError(f"edge {verts} out of range for n={self.n}")
            if sign not in SIGNS:
                raise ValueError(f"bad sign {sign!r}")
            if not self.directed and sign != "+":
                raise ValueError("undirected graphs store sign '+' only")
        if self.partition is not None:
            part = tuple(tuple(c) for c in self.partition)
            object.__setattr__(self, "partition", part)
            seen = sorted(v for c in part for v in c)
            if seen != list(range(self.n)):
                raise ValueError("partition must cover every vertex exactly once")
            if self.k == 2:
                cls = self.class_of
                for (u, v), _ in edges:
                    if cls[u] == cls[v]:
                        raise ValueError(f"edge {(u, v)} inside a partition class")

    @classmethod
    def undirected(cls, n: int, edge_sets: Iterable[Iterable[int]], k: int = 2,
                   partition=None) -> "DirectedKGraph":
        edges = frozenset((tuple(sorted(e)), "+") for e in edge_sets)
        return cls(n, k, edges, partition, directed=False)

    @classmethod
    def digraph(cls, n: int, arcs: Iterable[tuple[int, int]], partition=None) -> "DirectedKGraph":
        return cls(n, 2, frozenset(arc(u, v) for u, v in arcs), partition, directed=True)

    @classmethod
    def complete(cls, n: int, k: int = 2, directed: bool = False,
                 partition=None) -> "DirectedKGraph":
        class_of = None
        if partition is not None:
            class_of = {v: i for i, c in enumerate(partition) for v in c}
        signs = SIGNS if directed else ("+",)
        edges = set()
        for verts in itertools.combinations(range(n), k):
            if class_of is not None and len({class_of[v] for v in verts}) < k:
                continue
            for s in signs:
                edges.add((verts, s))
        return cls(n, k, frozenset(edges), partition, directed)

    @cached_property
    def class_of(self) -> dict[int, int] | None:
        if self.partition is None:
            return None
        return {v: i for i, c in enumerate(self.partition) for v in c}

    @cached_property
    def vertex_sets(self) -> frozenset:
        return frozenset(v for v, _ in self.edges)

    @cached_property
    def shadow(self) -> list[int]:
        """Undirected 2-shadow as neighbour bitmasks (meaningful for k = 2)."""
        adj = [0] * self.n
        for verts, _ in self.edges:
            for u, v in itertools.combinations(verts, 2):
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        return adj

    def has(self, edge: Edge) -> bool:
        return edge in self.edges

    def candidates(self, verts: tuple[int, ...], sign: str | None) -> list[Edge]:
        """Host edges on the sorted set ``verts`` matching ``sign`` (None: any).

        Undirected hosts match every sign request with their single edge.
        """
        if not self.directed:
            e = (verts, "+")
            return [e] if e in self.edges else []
        if sign is None:
            return [(verts, s) for s in SIGNS if (verts, s) in self.edges]
        e = (verts, sign)
        return [e] if e in self.edges else []

    def out_neighbours(self, v: int) -> set[int]:
        if self.k != 2:
            raise ValueError("out-neighbourhoods are defined for k = 2 only")
        out = set()
        for (a, b), s in self.edges:
            if not self.directed:
                if v in (a, b):
                    out.add(b if v == a else a)
                continue
            tail, head = (a, b) if s == "+" else (b, a)
            if tail == v:
                out.add(head)
        return out

    def in_neighbours(self, v: int) -> set[int]:
        if self.k != 2:
            raise ValueError("in-neighbourhoods are defined for k = 2 only")
        inn = set()
        for (a, b), s in self.edges:
            if not self.directed:
                if v in (a, b):
                    inn.add(b if v == a else a)
                continue
            tail, head = (a, b) if s == "+" else (b, a)
            if head == v:
                inn.add(tail)
        return inn

    def add_edges(self, edges: Iterable[Edge]) -> "DirectedKGraph":
        return DirectedKGraph(self.n, self.k, self.edges | frozenset(edges),
                              self.partition, self.directed)

    def remove_edges(self, edges: Iterable[Edge]) -> "DirectedKGraph":
        return DirectedKGraph(self.n, self.k, self.edges - frozenset(edges),
                              self.partition, self.directed)

    def induced(self, vertices: Sequence[int]) -> "DirectedKGraph":
        """Subgraph on ``vertices``, relabelled monotonically to 0..len-1."""
        order = sorted(vertices)
        pos = {v: i for i, v in enumerate(order)}
        edges = frozenset(
            (tuple(pos[v] for v in verts), s)
            for verts, s in self.edges
            if all(v in pos for v in verts)
        )
        part = None
        if self.partition is not None:
            part = tuple(tuple(pos[v] for v in c if v in pos) for c in self.partition)
        return DirectedKGraph(len(order), self.k, edges, part, self.directed)


@dataclass(frozen=True)
class GraphSystem:
    graphs: tuple[DirectedKGraph, ...]
    n: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        graphs = tuple(self.graphs)
        object.__setattr__(self, "graphs", graphs)
        if not graphs:
            # the empty system (no vertices, no colours) is allowed as a degenerate case
            object.__setattr__(self, "n", 0)
            object.__setattr__(self, "k", 0)
            return
        g0 = graphs[0]
        for g in graphs:
            if (g.n, g.k, g.partition, g.directed) != (g0.n, g0.k, g0.partition, g0.directed):
                raise ValueError("all colours must share n, k, partition and direction mode")
        object.__setattr__(self, "n", g0.n)
        object.__setattr__(self, "k", g0.k)

    @property
    def m(self) -> int:
        return len(self.graphs)

    @property
    def partition(self):
        return self.graphs[0].partition if self.graphs else None

    @property
    def directed(self) -> bool:
        return bool(self.graphs) and self.graphs[0].directed

    def __getitem__(self, i: int) -> DirectedKGraph:
        return self.graphs[i]

    def __iter__(self):
        return iter(self.graphs)

    def __len__(self):
        return len(self.graphs)

    def induced(self, vertices: Sequence[int], colors: Sequence[int]) -> "GraphSystem":
        """Subsystem on sorted ``vertices`` and ``colors``, both relabelled monotonically."""
        return GraphSystem(tuple(self.graphs[c].induced(vertices) for c in sorted(colors)))


class PatternKind(enum.Enum):
    SINGLE_EDGE = "edge"
    CLIQUE = "clique"
    TRANSITIVE_TOURNAMENT = "ttour"
    TOURNAMENT = "tour"
    PARTITE_CLIQUE = "pclique"


@dataclass(frozen=True)
class PatternF:
    kind: PatternKind
    template: DirectedKGraph
    param: int

    @property
    def b(self) -> int:
        return self.template.n

    @property
    def f(self) -> int:
        return len(self.template.edges)

    @property
    def k(self) -> int:
        return self.template.k

    @property
    def directed(self) -> bool:
        return self.template.directed

    @property
    def partite(self) -> bool:
        return self.kind is PatternKind.PARTITE_CLIQUE

    @cached_property
    def edge_list(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.template.edges))

    @cached_property
    def shadow_complete(self) -> bool:
        if self.k != 2:
            return self.b == self.k
        pairs = {v for v, _ in self.template.edges}
        return len(pairs) == comb(self.b, 2)

    @cached_property
    def placements(self) -> tuple[tuple[int, ...], ...]:
        """Permutations ``pi`` (template vertex -> sorted position) giving distinct copies.

        One representative per coset of the automorphism group, so that
        mapping template vertex ``x`` to ``W[pi[x]]`` for a sorted host set
        ``W`` enumerates every copy on ``W`` exactly once.
        """
        seen = {}
        for pi in itertools.permutations(range(self.b)):
            image = frozenset(
                orient([pi[x] for x in verts], s) if self.directed else (tuple(sorted(pi[x] for x in verts)), "+")
                for verts, s in self.template.edges
            )
            seen.setdefault(image, pi)
        return tuple(sorted(seen.values()))

    @classmethod
    def single_edge(cls, k: int = 2) -> "PatternF":
        return cls(PatternKind.SINGLE_EDGE, DirectedKGraph.undirected(k, [range(k)], k=k), k)

    @classmethod
    def clique(cls, t: int) -> "PatternF":
        if t < 2:
            raise ValueError("clique needs t >= 2")
        return cls(PatternKind.CLIQUE, DirectedKGraph.complete(t), t)

    @classmethod
    def transitive_tournament(cls, k: int) -> "PatternF":
        if k < 2:
            raise ValueError("tournament needs k >= 2")
        arcs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        return cls(PatternKind.TRANSITIVE_TOURNAMENT, DirectedKGraph.digraph(k, arcs), k)

    @classmethod
    def tournament(cls, k: int, arcs: Iterable[tuple[int, int]]) -> "PatternF":
        arcs = list(arcs)
        pairs = {frozenset(a) for a in arcs}
        if len(arcs) != comb(k, 2) or len(pairs) != comb(k, 2):
            raise ValueError("a tournament has exactly one arc per pair")
        return cls(PatternKind.TOURNAMENT, DirectedKGraph.digraph(k, arcs), k)

    @classmethod
    def partite_clique(cls, k: int) -> "PatternF":
        return cls(PatternKind.PARTITE_CLIQUE, DirectedKGraph.complete(k), k)

    @classmethod
    def parse(cls, text: str) -> "PatternF":
        """Parse ``clique:t``, ``ttour:k``, ``tour:k:01,12,20``, ``edge:k`` or ``pclique:k``."""
        name, _, rest = text.partition(":")
        try:
            if name == "tour":
                size, _, arc_text = rest.partition(":")
                arcs = [(int(a[0]), int(a[1])) for a in arc_text.split(",") if a]
                return cls.tournament(int(size), arcs)
            size = int(rest)
        except ValueError as exc:
            raise ValueError(f"bad pattern {text!r}") from exc
        makers = {"clique": cls.clique, "ttour": cls.transitive_tournament,
                  "edge": cls.single_edge, "pclique": cls.partite_clique}
        if name not in makers:
            raise ValueError(f"unknown pattern kind {name!r}")
        return makers[name](size)

    def label(self) -> str:
        if self.kind is PatternKind.TOURNAMENT:
            arcs = []
            for (a, b), s in self.edge_list:
                arcs.append(f"{a}{b}" if s == "+" else f"{b}{a}")
            return f"tour:{self.param}:{','.join(arcs)}"
        return f"{self.kind.value}:{self.param}"


class RuleKind(enum.Enum):
    STANDARD = "standard"
    OUT = "out"
    IN = "in"
    SEMI = "semi"
    PARTITE = "partite"


@dataclass(frozen=True)
class DegreeRule:
    kind: RuleKind = RuleKind.STANDARD
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree order d must be >= 1")
        if self.kind is not RuleKind.STANDARD and self.d != 1:
            raise ValueError(f"{self.kind.value} rule is defined for d = 1 only")

    def families(self, H: DirectedKGraph, S: tuple[int, ...]) -> list[set[Edge]]:
        """The edge families ``E_1, ..., E_l`` attached to the d-set ``S``."""
        if self.kind is RuleKind.STANDARD:
            return [{e for e in H.edges if set(S) <= set(e[0])}]
        (v,) = S
        if self.kind in (RuleKind.OUT, RuleKind.IN, RuleKind.SEMI):
            out = {arc(v, w) for w in H.out_neighbours(v)}
            inn = {arc(w, v) for w in H.in_neighbours(v)}
            if not H.directed:
                out = {e for e in H.edges if v in e[0]}
                inn = set(out)
            return {RuleKind.OUT: [out], RuleKind.IN: [inn], RuleKind.SEMI: [out, inn]}[self.kind]
        cls = H.class_of
        fams = []
        for j, part in enumerate(H.partition):
            if j == cls[v]:
                continue
            members = set(part)
            fams.append({e for e in H.edges if v in e[0] and (set(e[0]) - {v}) <= members})
        return fams


def min_star_degree(H: DirectedKGraph, rule: DegreeRule) -> int:
    """Minimum over d-sets S of the smallest family size in ``rule.families(S)``."""
    if rule.d >= H.k:
        raise ValueError(f"degree order d={rule.d} must be below k={H.k}")
    if rule.kind in (RuleKind.OUT, RuleKind.IN, RuleKind.SEMI, RuleKind.PARTITE) and H.k != 2:
        raise ValueError(f"{rule.kind.value} rule needs a 2-graph")
    if rule.kind is RuleKind.PARTITE:
        if H.partition is None:
            raise ValueError("partite rule on an unpartitioned graph")
        return _partite_min_degree(H)
    if rule.kind is RuleKind.STANDARD:
        counts = {S: 0 for S in itertools.combinations(range(H.n), rule.d)}
        for verts, _ in H.edges:
            for S in itertools.combinations(verts, rule.d):
                counts[S] += 1
        return min(counts.values(), default=0)
    out = [0] * H.n
    inn = [0] * H.n
    for (a, b), s in H.edges:
        if not H.directed:
            for x in (a, b):
                out[x] += 1
                inn[x] += 1
            continue
        tail, head = (a, b) if s == "+" else (b, a)
        out[tail] += 1
        inn[head] += 1
    if rule.kind is RuleKind.OUT:
        return min(out, default=0)
    if rule.kind is RuleKind.IN:
        return min(inn, default=0)
    return min((min(o, i) for o, i in zip(out, inn)), default=0)


def _partite_min_degree(H: DirectedKGraph) -> int:
    cls = H.class_of
    p = len(H.partition)
    if p < 2:
        return 0
    deg = [[0] * p for _ in range(H.n)]
    for (a, b), _ in H.edges:
        deg[a][cls[b]] += 1
        deg[b][cls[a]] += 1
    return min(
        (deg[v][j] for v in range(H.n) for j in range(p) if j != cls[v]),
        default=0,
    )


def default_rule(F: PatternF, d: int = 1) -> DegreeRule:
    """The degree rule paired with each pattern family."""
    return {
        PatternKind.CLIQUE: DegreeRule(RuleKind.STANDARD, 1),
        PatternKind.TRANSITIVE_TOURNAMENT: DegreeRule(RuleKind.OUT, 1),
        PatternKind.TOURNAMENT: DegreeRule(RuleKind.SEMI, 1),
        PatternKind.PARTITE_CLIQUE: DegreeRule(RuleKind.PARTITE, 1),
        PatternKind.SINGLE_EDGE: DegreeRule(RuleKind.STANDARD, d),
    }[F.kind]


def degree_norm(F: PatternF, n: int, k: int, d: int = 1, partition=None) -> int:
    """The binomial the threshold constants multiply: C(n-d, k-d), or the class size."""
    if F.partite and partition is not None:
        return min(len(c) for c in partition)
    return comb(n - d, k - d)


@dataclass(frozen=True)
class RainbowCopy:
    """A copy of F: ``embedding[x]`` hosts template vertex ``x``; ``edges[j]``
    carries colour ``colors[j]`` and is the image of ``F.edge_list[j]``."""

    embedding: tuple[int, ...]
    edges: tuple[Edge, ...]
    colors: tuple[int, ...]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.embedding)

    @property
    def color_set(self) -> frozenset[int]:
        return frozenset(self.colors)

    @property
    def key(self) -> frozenset:
        return frozenset(zip(self.edges, self.colors))

    def relabel(self, vmap: Sequence[int], cmap: Sequence[int]) -> "RainbowCopy":
        """Map vertices/colours through monotone maps (so signs are preserved)."""
        return RainbowCopy(
            tuple(vmap[v] for v in self.embedding),
            tuple((tuple(vmap[v] for v in verts), s) for verts, s in self.edges),
            tuple(cmap[c] for c in self.colors),
        )


def _edge_images(F: PatternF, W: Sequence[int], pi: Sequence[int]):
    """Per template edge: (sorted host vertex tuple, required sign or None)."""
    out = []
    for verts, s in F.edge_list:
        image = [W[pi[x]] for x in verts]
        if F.directed:
            hv, hs = orient(image, s)
            out.append((hv, hs))
        else:
            out.append((tuple(sorted(image)), None))
    return out


@lru_cache(maxsize=1 << 16)
def has_sdr(masks: tuple[int, ...]) -> bool:
    """Whether the colour sets (bitmasks) admit a system of distinct representatives."""
    match: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        m = masks[i]
        while m:
            low = m & -m
            c = low.bit_length() - 1
            m ^= low
            if c in seen:
                continue
            seen.add(c)
            if c not in match or augment(match[c], seen):
                match[c] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(masks)))


def _partite_ok(sys_or_graph, W: Sequence[int]) -> bool:
    cls = sys_or_graph.graphs[0].class_of if isinstance(sys_or_graph, GraphSystem) else sys_or_graph.class_of
    if cls is None:
        raise ValueError("partite pattern on an unpartitioned system")
    return len({cls[v] for v in W}) == len(W)


def hosts_rainbow_copy(sys: GraphSystem, F: PatternF, W: Sequence[int],
                       colors: Sequence[int]) -> bool:
    """Whether the sorted vertex set ``W`` spans a rainbow F-copy using exactly ``colors``."""
    colors = tuple(colors)
    if F.partite and not _partite_ok(sys, W):
        return False
    for pi in F.placements:
        masks = []
        for hv, hs in _edge_images(F, W, pi):
            mask = 0
            for j, c in enumerate(colors):
                if sys.graphs[c].candidates(hv, hs):
                    mask |= 1 << j
            if not mask:
                break
            masks.append(mask)
        else:
            if has_sdr(tuple(masks)):
                return True
    return False


def copies_on(sys: GraphSystem, F: PatternF, W: Sequence[int],
              colors: Sequence[int]) -> list[RainbowCopy]:
    """All rainbow copies of F on the vertex set ``W`` with colour set ``colors``."""
    W = tuple(sorted(W))
    colors = tuple(sorted(colors))
    if len(colors) != F.f:
        raise ValueError(f"need exactly f={F.f} colours, got {len(colors)}")
    if F.partite and not _partite_ok(sys, W):
        return []
    found: dict[frozenset, RainbowCopy] = {}
    for pi in F.placements:
        images = _edge_images(F, W, pi)
        options = []
        for hv, hs in images:
            opts = [(e, c) for c in colors for e in sys.graphs[c].candidates(hv, hs)]
            if not opts:
                break
            options.append(opts)
        else:
            embedding = tuple(W[pi[x]] for x in range(F.b))
            for choice in itertools.product(*options):
                cols = tuple(c for _, c in choice)
                if len(set(cols)) != len(cols):
                    continue
                copy = RainbowCopy(embedding, tuple(e for e, _ in choice), cols)
                found.setdefault(copy.key, copy)
    return sorted(found.values(), key=lambda c: (c.embedding, c.colors, c.edges))


def candidate_sets(sys: GraphSystem, F: PatternF, colors: Sequence[int],
                   vertices: Iterable[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Sorted b-sets of ``vertices`` that could host F with these colours.

    A superset of the hosts; callers confirm with ``hosts_rainbow_copy``.
    """
    pool = sorted(range(sys.n) if vertices is None else vertices)
    if F.kind is PatternKind.SINGLE_EDGE:
        allowed = set(pool)
        sets = set()
        for c in colors:
            sets |= {v for v in sys.graphs[c].vertex_sets if allowed.issuperset(v)}
        yield from sorted(sets)
        return
    if sys.k == 2 and F.shadow_complete:
        union = [0] * sys.n
        for c in colors:
            adj = sys.graphs[c].shadow
            for v in range(sys.n):
                union[v] |= adj[v]
        mask = 0
        for v in pool:
            mask |= 1 << v
        yield from _cliques(union, mask, F.b)
        return
    yield from itertools.combinations(pool, F.b)


def _cliques(adj: list[int], mask: int, size: int) -> Iterator[tuple[int, ...]]:
    def grow(prefix: list[int], cand: int):
        if len(prefix) == size:
            yield tuple(prefix)
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            # only higher-indexed vertices keep the tuple sorted
            prefix.append(v)
            yield from grow(prefix, cand & adj[v] & ~((low << 1) - 1))
            prefix.pop()

    yield from grow([], mask)


def enumerate_rainbow_copies(sys: GraphSystem, F: PatternF, colors: Iterable[int],
                             vertices: Iterable[int] | None = None) -> list[RainbowCopy]:
    """Every rainbow copy of F whose colour set is exactly ``colors``.

    Sorted by embedding (lexicographic in the vertex images), then colour
    tuple.  Copies differing only in colouring are separate entries.
    """
    colors = tuple(sorted(set(colors)))
    if len(colors) != F.f:
        raise ValueError(f"need exactly f={F.f} colours, got {len(colors)}")
    out = []
    for W in candidate_sets(sys, F, colors, vertices):
        out.extend(copies_on(sys, F, W, colors))
    out.sort(key=lambda c: (c.embedding, c.colors, c.edges))
    return out


def build_hf(sys_slice: GraphSystem, F: PatternF,
             vertices: Iterable[int] | None = None) -> frozenset[tuple[int, ...]]:
    """Edge set of the b-graph H_F: vertex sets of rainbow copies with colour set [f]."""
    if sys_slice.m != F.f:
        raise ValueError(f"slice has m={sys_slice.m} colours, pattern needs f={F.f}")
    return block_hosts(sys_slice, F, range(F.f), vertices)


def block_hosts(sys: GraphSystem, F: PatternF, colors: Sequence[int],
                vertices: Iterable[int] | None = None) -> frozenset[tuple[int, ...]]:
    colors = tuple(colors)
    return frozenset(
        W for W in candidate_sets(sys, F, colors, vertices)
        if hosts_rainbow_copy(sys, F, W, colors)
    )
