"""Instance generators: complete systems, space-barrier constructions, random min-degree systems."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from math import comb

from .core import (DegreeRule, DirectedKGraph, GraphSystem, PatternF, RuleKind,
                   default_rule, min_star_degree)
from .io import read_system


def gen_complete(n: int, k: int, m: int, directed: bool = False, partition=None) -> GraphSystem:
    g = DirectedKGraph.complete(n, k, directed, partition)
    return GraphSystem((g,) * m)


def extremal_classes(t: int, n: int) -> list[list[int]]:
    """One class of size n/t + 1 followed by t - 1 balanced classes (empty ones dropped)."""
    if t < 2 or n < t or n % t:
        raise ValueError(f"need t >= 2 and t | n (t={t}, n={n})")
    big = n // t + 1
    classes = [list(range(big))]
    rest = list(range(big, n))
    parts = t - 1
    start = 0
    for i in range(parts):
        size = len(rest) // parts + (1 if i < len(rest) % parts else 0)
        if size:
            classes.append(rest[start:start + size])
        start += size
    return classes


def gen_extremal(t: int, n: int, kind: str = "identical") -> GraphSystem:
    """Space barrier for K_t-factors with m = (n/t) C(t,2) colours.

    ``identical``: every colour is the complete multipartite graph on
    :func:`extremal_classes`.  ``space``: every colour is complete minus the
    clique on the big class.  Both have minimum degree n - n/t - 1 and no
    K_t-factor, since each K_t meets the big class at most once.
    """
    classes = extremal_classes(t, n)
    m = (n // t) * comb(t, 2)
    if kind == "identical":
        cls = {v: i for i, c in enumerate(classes) for v in c}
        edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if cls[u] != cls[v]]
    elif kind == "space":
        big = set(classes[0])
        edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if not (u in big and v in big)]
    else:
        raise ValueError(f"unknown extremal kind {kind!r}")
    g = DirectedKGraph.undirected(n, edges)
    return GraphSystem((g,) * m)


def raise_min_degree(sys: GraphSystem, target: int, seed: int) -> GraphSystem:
    """Add random edges to each colour of an undirected 2-graph system until min degree >= target.

    Each deficient vertex (lowest index first) is joined to a random
    non-neighbour, preferring other deficient vertices.
    """
    if sys.k != 2 or sys.directed:
        raise ValueError("raise_min_degree works on undirected 2-graph systems")
    if target > sys.n - 1:
        raise ValueError(f"min degree {target} impossible on {sys.n} vertices")
    rng = random.Random(seed)
    out = []
    for g in sys.graphs:
        adj = [set() for _ in range(sys.n)]
        for (u, v), _ in g.edges:
            adj[u].add(v)
            adj[v].add(u)
        cls = g.class_of
        added = []
        while True:
            low = [v for v in range(sys.n) if len(adj[v]) < target]
            if not low:
                break
            v = low[0]
            options = [w for w in range(sys.n) if w != v and w not in adj[v]
                       and (cls is None or cls[w] != cls[v])]
            if not options:
                raise ValueError(f"vertex {v} cannot reach degree {target}")
            needy = [w for w in options if len(adj[w]) < target]
            w = rng.choice(needy or options)
            adj[v].add(w)
            adj[w].add(v)
            added.append(((min(v, w), max(v, w)), "+"))
        out.append(g.add_edges(added))
    return GraphSystem(tuple(out))


def _rule_max(n: int, k: int, rule: DegreeRule, partition) -> int:
    if rule.kind is RuleKind.PARTITE:
        return min(len(c) for c in partition)
    if rule.kind is RuleKind.STANDARD:
        return comb(n - rule.d, k - rule.d)
    return n - 1


def gen_random_min_degree(n: int, k: int, m: int, rule: DegreeRule, delta: int, seed: int,
                          p_delete: float = 1.0, partition=None,
                          directed: bool | None = None) -> GraphSystem:
    """Each colour: start complete, visit edges in random order and delete each
    with probability ``p_delete`` whenever the degree rule stays >= ``delta``.

    Degree counts are tracked incrementally, so no deletion is ever undone.
    """
    if rule.d >= k:
        raise ValueError(f"degree order d={rule.d} must be below k={k}")
    if rule.kind is RuleKind.PARTITE and partition is None:
        raise ValueError("partite rule needs a partition")
    if rule.kind is not RuleKind.STANDARD and k != 2:
        raise ValueError(f"{rule.kind.value} rule needs k = 2")
    if directed is None:
        directed = rule.kind in (RuleKind.OUT, RuleKind.IN, RuleKind.SEMI)
    top = _rule_max(n, k, rule, partition)
    if delta < 0 or delta > top:
        raise ValueError(f"min degree target {delta} outside [0, {top}]")
    rng = random.Random(seed)
    graphs = []
    for _ in range(m):
        full = DirectedKGraph.complete(n, k, directed, partition)
        counter = _Counter(full, rule)
        kept = set(full.edges)
        for e in rng.sample(sorted(full.edges), len(full.edges)):
            if rng.random() < p_delete and counter.can_drop(e, delta):
                counter.drop(e)
                kept.discard(e)
        g = DirectedKGraph(n, k, frozenset(kept), full.partition, directed)
        assert min_star_degree(g, rule) >= delta
        graphs.append(g)
    return GraphSystem(tuple(graphs))


class _Counter:
    """Incremental family sizes for one degree rule."""

    def __init__(self, g: DirectedKGraph, rule: DegreeRule):
        self.rule = rule
        self.g = g
        self.count: dict = {}
        for e in g.edges:
            for key in self._keys(e):
                self.count[key] = self.count.get(key, 0) + 1

    def _keys(self, e):
        verts, s = e
        kind = self.rule.kind
        if kind is RuleKind.STANDARD:
            return [S for S in itertools.combinations(verts, self.rule.d)]
        a, b = verts
        if kind is RuleKind.PARTITE:
            cls = self.g.class_of
            return [(a, cls[b]), (b, cls[a])]
        if not self.g.directed:
            return [(a, "o"), (b, "o"), (a, "i"), (b, "i")]
        tail, head = (a, b) if s == "+" else (b, a)
        keys = []
        if kind in (RuleKind.OUT, RuleKind.SEMI):
            keys.append((tail, "o"))
        if kind in (RuleKind.IN, RuleKind.SEMI):
            keys.append((head, "i"))
        return keys

    def can_drop(self, e, delta: int) -> bool:
        return all(self.count[key] - 1 >= delta for key in self._keys(e))

    def drop(self, e) -> None:
        for key in self._keys(e):
            self.count[key] -= 1


class InstanceKind(enum.Enum):
    EXTREMAL_SPACE = "space"
    IDENTICAL_EXTREMAL = "extremal"
    RANDOM_MIN_DEGREE = "random"
    COMPLETE = "complete"
    FROM_FILE = "file"


@dataclass(frozen=True)
class InstanceSpec:
    kind: InstanceKind
    n: int
    pattern: PatternF
    delta: int | None = None
    seed: int = 0
    p_delete: float = 1.0
    path: str | None = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        return self.n * self.pattern.f // self.pattern.b

    def build(self) -> GraphSystem:
        F = self.pattern
        if self.kind is InstanceKind.FROM_FILE:
            return read_system(self.path)
        if self.n % F.b:
            raise ValueError(f"pattern on b={F.b} vertices needs b | n (n={self.n})")
        if self.kind in (InstanceKind.EXTREMAL_SPACE, InstanceKind.IDENTICAL_EXTREMAL):
            if F.k != 2 or F.directed:
                raise ValueError("extremal constructions are for undirected cliques")
            kind = "space" if self.kind is InstanceKind.EXTREMAL_SPACE else "identical"
            return gen_extremal(F.b, self.n, kind)
        partition = None
        if F.partite:
            size = self.n // F.b
            partition = tuple(tuple(range(i * size, (i + 1) * size)) for i in range(F.b))
        if self.kind is InstanceKind.COMPLETE:
            return gen_complete(self.n, F.k, self.m, F.directed, partition)
        rule = default_rule(F)
        return gen_random_min_degree(self.n, F.k, self.m, rule, self.delta or 0, self.seed,
                                     self.p_delete, partition, directed=F.directed)
