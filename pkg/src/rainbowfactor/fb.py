"""The (f,b)-graph reduction: colours on one side, host vertices on the other.

Colour vertices are split into contiguous blocks ``I_i = {i*f, ..., i*f+f-1}``
and ``I_i + e`` is an edge whenever the host b-set ``e`` spans a rainbow
copy of F coloured exactly by ``I_i``.  Perfect matchings of this graph are
rainbow F-factors whose colour classes are the blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .core import GraphSystem, PatternF, RainbowCopy, block_hosts, copies_on

FbEdge = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class FbGraph:
    m: int
    n: int
    f: int
    b: int
    edges: tuple[FbEdge, ...]
    strict: bool = True
    blocks: tuple[tuple[int, ...], ...] = field(default=None)

    def __post_init__(self):
        if self.blocks is None:
            nblocks = self.m // self.f if self.f else 0
            blocks = tuple(tuple(range(i * self.f, (i + 1) * self.f)) for i in range(nblocks))
            object.__setattr__(self, "blocks", blocks)
        edges = tuple(sorted(set((tuple(sorted(a)), tuple(sorted(bb))) for a, bb in self.edges)))
        object.__setattr__(self, "edges", edges)
        block_set = set(self.blocks)
        for a, bb in edges:
            if len(a) != self.f or len(bb) != self.b:
                raise ValueError(f"edge {a}|{bb} is not an ({self.f},{self.b})-edge")
            if a not in block_set:
                raise ValueError(f"A-part {a} is not a colour block")
            if not all(0 <= v < self.n for v in bb):
                raise ValueError(f"B-part {bb} out of range")
        if self.strict and self.b * self.m != self.f * self.n:
            raise ValueError("strict (f,b)-graph must satisfy b*|A| = f*|B|")

    @classmethod
    def from_blocks(cls, n: int, f: int, b: int,
                    block_edges: Sequence[Iterable[Sequence[int]]], strict: bool = True) -> "FbGraph":
        """Build from one list of host b-sets per block (block i owns colours i*f..)."""
        m = f * len(block_edges)
        edges = []
        for i, hosts in enumerate(block_edges):
            a = tuple(range(i * f, (i + 1) * f))
            edges.extend((a, tuple(sorted(e))) for e in hosts)
        return cls(m, n, f, b, tuple(edges), strict)

    @cached_property
    def block_index(self) -> dict[tuple[int, ...], int]:
        return {blk: i for i, blk in enumerate(self.blocks)}

    @cached_property
    def by_block(self) -> list[list[tuple[int, ...]]]:
        """Host b-sets per block, in lexicographic order."""
        out: list[list[tuple[int, ...]]] = [[] for _ in self.blocks]
        for a, bb in self.edges:
            out[self.block_index[a]].append(bb)
        return out

    @cached_property
    def masks_by_block(self) -> list[list[int]]:
        return [[_mask(e) for e in hosts] for hosts in self.by_block]

    def block_graph(self, i: int) -> list[tuple[int, ...]]:
        """The b-graph H'_{F_i} of block ``i``."""
        return list(self.by_block[i])

    def vertex_id(self, side: str, v: int) -> int:
        """Position of a vertex in the flat numbering: colours first, then hosts."""
        return v if side == "A" else self.m + v

    def flat_edges(self) -> list[tuple[int, ...]]:
        return [a + tuple(self.m + v for v in bb) for a, bb in self.edges]

    def is_balanced(self) -> bool:
        return self.b * self.m == self.f * self.n

    def edges_within(self, block_ids: Iterable[int], hosts: Iterable[int]) -> list[FbEdge]:
        """Edges of the subgraph induced by the given blocks and host vertices."""
        allowed = set(hosts)
        return [(self.blocks[i], e) for i in sorted(block_ids) for e in self.by_block[i]
                if allowed.issuperset(e)]

    def dumps(self) -> str:
        lines = [f"fb {self.m} {self.n} {self.f} {self.b}"]
        for a, bb in self.edges:
            lines.append(" ".join(map(str, a + bb)))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FbGraph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or rows[0][0] != "fb" or len(rows[0]) != 5:
            raise ValueError("expected header 'fb |A| |B| f b'")
        m, n, f, b = map(int, rows[0][1:])
        edges = []
        seen = set()
        for row in rows[1:]:
            vals = tuple(map(int, row))
            if len(vals) != f + b:
                raise ValueError(f"edge line {' '.join(row)!r} needs {f + b} entries")
            e = (vals[:f], vals[f:])
            if e in seen:
                raise ValueError(f"duplicate edge {' '.join(row)!r}")
            seen.add(e)
            edges.append(e)
        return cls(m, n, f, b, tuple(edges), strict=(b * m == f * n))


def _mask(vs: Iterable[int]) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


@dataclass(frozen=True)
class RainbowPacking:
    copies: tuple[RainbowCopy, ...] = ()

    def __post_init__(self):
        copies = tuple(self.copies)
        object.__setattr__(self, "copies", copies)
        seen_v: set[int] = set()
        seen_c: set[int] = set()
        for cp in copies:
            if seen_v & cp.vertices:
                raise ValueError("copies share a vertex")
            if seen_c & cp.color_set or len(cp.color_set) != len(cp.colors):
                raise ValueError("copies share a colour")
            seen_v |= cp.vertices
            seen_c |= cp.color_set

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for cp in self.copies for v in cp.vertices)

    @property
    def colors(self) -> frozenset[int]:
        return frozenset(c for cp in self.copies for c in cp.colors)

    def __len__(self):
        return len(self.copies)

    def __iter__(self):
        return iter(self.copies)

    def is_factor(self, n: int, m: int) -> bool:
        return self.vertices == frozenset(range(n)) and self.colors == frozenset(range(m))

    def to_json(self) -> list[dict]:
        return [
            {"vertices": list(cp.embedding),
             "edges": [[list(v), s] for v, s in cp.edges],
             "colors": list(cp.colors)}
            for cp in self.copies
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> "RainbowPacking":
        return cls(tuple(
            RainbowCopy(tuple(d["vertices"]),
                        tuple((tuple(v), s) for v, s in d["edges"]),
                        tuple(d["colors"]))
            for d in data
        ))


def build_fb_graph(sys: GraphSystem, F: PatternF, strict: bool = True) -> FbGraph:
    """The (f,b)-graph of ``sys``: block ``i`` joins host sets spanning F in colours I_i."""
    if strict and (sys.n % F.b or sys.m * F.b != sys.n * F.f):
        raise ValueError(f"strict mode needs b | n and m = nf/b (n={sys.n}, m={sys.m}, f={F.f}, b={F.b})")
    nblocks = sys.m // F.f
    edges = []
    for i in range(nblocks):
        blk = tuple(range(i * F.f, (i + 1) * F.f))
        edges.extend((blk, e) for e in block_hosts(sys, F, blk))
    return FbGraph(sys.m, sys.n, F.f, F.b, tuple(edges), strict)


def is_matching(M: Sequence[FbEdge]) -> bool:
    seen_a: set[int] = set()
    seen_b: set[int] = set()
    for a, bb in M:
        if seen_a.intersection(a) or seen_b.intersection(bb):
            return False
        seen_a.update(a)
        seen_b.update(bb)
    return True


def matching_to_packing(M: Sequence[FbEdge], sys: GraphSystem, F: PatternF) -> RainbowPacking:
    """Realise each matched edge by its first rainbow copy; order is preserved."""
    if not is_matching(M):
        raise ValueError("edges of M are not pairwise disjoint")
    copies = []
    for a, bb in M:
        found = copies_on(sys, F, bb, a)
        if not found:
            raise ValueError(f"edge {a}|{bb} is not realisable as a rainbow copy")
        copies.append(found[0])
    return RainbowPacking(tuple(copies))


def packing_to_matching(P: RainbowPacking) -> list[FbEdge]:
    return [(tuple(sorted(cp.colors)), tuple(sorted(cp.vertices))) for cp in P.copies]


def is_balanced(S: Iterable[tuple[str, int]], g: FbGraph) -> bool:
    """``S`` holds ``('A', colour)`` / ``('B', vertex)`` pairs; balanced iff b|S∩A| = f|S∩B|."""
    S = set(S)
    na = sum(1 for side, _ in S if side == "A")
    nb = sum(1 for side, _ in S if side == "B")
    return g.b * na == g.f * nb


def count_perfect_matchings(g: FbGraph) -> int:
    """Number of perfect matchings (each block matched to one host set, hosts partitioned)."""
    if not g.strict:
        raise ValueError("perfect matchings need a strict (f,b)-graph")
    full = (1 << g.n) - 1
    masks = g.masks_by_block
    order = sorted(range(len(masks)), key=lambda i: len(masks[i]))

    def count(idx: int, used: int) -> int:
        if idx == len(order):
            return 1 if used == full else 0
        total = 0
        for mk in masks[order[idx]]:
            if not mk & used:
                total += count(idx + 1, used | mk)
        return total

    return count(0, 0)


class FbView:
    """The (f,b)-graph of a system, with edges generated on demand.

    Offers the same ``m, n, f, b, blocks, edges_within`` surface as
    :class:`FbGraph` without materialising every edge.
    """

    strict = True

    def __init__(self, sys: GraphSystem, F: PatternF):
        if sys.n % F.b or sys.m * F.b != sys.n * F.f:
            raise ValueError(f"need b | n and m = nf/b (n={sys.n}, m={sys.m})")
        self.sys = sys
        self.F = F
        self.m, self.n, self.f, self.b = sys.m, sys.n, F.f, F.b
        self.blocks = tuple(tuple(range(i * F.f, (i + 1) * F.f)) for i in range(sys.m // F.f))

    def edges_within(self, block_ids: Iterable[int], hosts: Iterable[int]) -> list[FbEdge]:
        hosts = sorted(hosts)
        out = []
        for i in sorted(block_ids):
            blk = self.blocks[i]
            out.extend((blk, e) for e in sorted(block_hosts(self.sys, self.F, blk, hosts)))
        return out

    def materialise(self) -> FbGraph:
        return build_fb_graph(self.sys, self.F)
