"""Exhaustive rainbow-factor search, used as ground truth."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import GraphSystem, PatternF, copies_on, hosts_rainbow_copy
from .fb import FbGraph, RainbowPacking, build_fb_graph


@dataclass(frozen=True)
class Factor:
    packing: RainbowPacking
    nodes: int = 0
    status: str = field(default="factor", init=False)


@dataclass(frozen=True)
class Infeasible:
    nodes: int = 0
    status: str = field(default="infeasible", init=False)


@dataclass(frozen=True)
class Timeout:
    nodes: int = 0
    status: str = field(default="timeout", init=False)


class _Budget(Exception):
    pass


def _check_sizes(sys: GraphSystem, F: PatternF) -> None:
    if sys.n % F.b or sys.m * F.b != sys.n * F.f:
        raise ValueError(f"need b | n and m = nf/b (n={sys.n}, m={sys.m}, f={F.f}, b={F.b})")


def exact_rainbow_factor(sys: GraphSystem, F: PatternF, budget: int | None = None,
                         g: FbGraph | None = None):
    """Perfect matching search in the (f,b)-graph.

    Blocks are tried fail-first (fewest live candidates, ties by index) and
    candidates in lexicographic order.  A branch dies as soon as some block
    has no live candidate or some uncovered vertex lies in no live candidate.
    """
    if sys.n == 0:
        return Factor(RainbowPacking(()))
    _check_sizes(sys, F)
    if g is None:
        g = build_fb_graph(sys, F)
    masks = g.masks_by_block
    hosts = g.by_block
    full = (1 << g.n) - 1
    nodes = 0
    chosen: list[tuple[int, int]] = []

    def search(left: list[int], used: int) -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _Budget
        if not left:
            return used == full
        best = None
        reach = 0
        for i in left:
            live = [j for j, mk in enumerate(masks[i]) if not mk & used]
            if not live:
                return False
            for j in live:
                reach |= masks[i][j]
            if best is None or len(live) < len(best[1]):
                best = (i, live)
        if reach | used != full:
            return False
        i, live = best
        rest = [x for x in left if x != i]
        for j in live:
            chosen.append((i, j))
            if search(rest, used | masks[i][j]):
                return True
            chosen.pop()
        return False

    try:
        found = search(list(range(len(g.blocks))), 0)
    except _Budget:
        return Timeout(nodes)
    if not found:
        return Infeasible(nodes)
    copies = []
    for i, j in sorted(chosen):
        copies.append(copies_on(sys, F, hosts[i][j], g.blocks[i])[0])
    return Factor(RainbowPacking(tuple(copies)), nodes)


def direct_rainbow_factor(sys: GraphSystem, F: PatternF, budget: int | None = None):
    """Backtracking over rainbow copies with unrestricted colour sets.

    Covers the lowest uncovered vertex first; any f unused colours may
    colour the copy.  This is the plain definition of a rainbow F-factor.
    """
    if sys.n == 0:
        return Factor(RainbowPacking(()))
    _check_sizes(sys, F)
    nodes = 0
    picked: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def search(free_v: list[int], free_c: list[int]) -> bool:
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _Budget
        if not free_v:
            return True
        v = free_v[0]
        for rest in itertools.combinations(free_v[1:], F.b - 1):
            W = (v,) + rest
            for cols in itertools.combinations(free_c, F.f):
                if hosts_rainbow_copy(sys, F, W, cols):
                    picked.append((W, cols))
                    nv = [x for x in free_v if x not in W]
                    nc = [c for c in free_c if c not in cols]
                    if search(nv, nc):
                        return True
                    picked.pop()
        return False

    try:
        found = search(list(range(sys.n)), list(range(sys.m)))
    except _Budget:
        return Timeout(nodes)
    if not found:
        return Infeasible(nodes)
    return Factor(RainbowPacking(tuple(copies_on(sys, F, W, c)[0] for W, c in picked)), nodes)


def _spans_with(sys: GraphSystem, F: PatternF, W: tuple[int, ...], colors: tuple[int, ...]) -> bool:
    """Brute force: some vertex bijection and edge colouring realise F on W."""
    for perm in itertools.permutations(W):
        for cols in itertools.permutations(colors):
            ok = True
            for (verts, sign), c in zip(sorted(F.template.edges), cols):
                image = [perm[x] for x in verts]
                key = tuple(sorted(image))
                inv = sum(1 for i in range(len(image)) for j in range(i + 1, len(image)) if image[i] > image[j])
                s = sign if inv % 2 == 0 else ("+" if sign == "-" else "-")
                host = sys.graphs[c]
                if F.directed and host.directed:
                    hit = (key, s) in host.edges
                else:
                    hit = (key, "+") in host.edges or (key, "-") in host.edges
                if not hit:
                    ok = False
                    break
            if ok and F.partite:
                cls = sys.graphs[0].class_of
                ok = len({cls[v] for v in W}) == len(W)
            if ok:
                return True
    return False


def count_block_factors(sys: GraphSystem, F: PatternF) -> int:
    """Number of ways to give every colour block I_i its own b-set spanning F in I_i.

    Enumerates set partitions of V into b-sets and assignments of blocks to
    parts directly, with no use of the (f,b)-graph machinery.
    """
    _check_sizes(sys, F)
    nblocks = sys.m // F.f
    blocks = [tuple(range(i * F.f, (i + 1) * F.f)) for i in range(nblocks)]
    memo: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}

    def spans(W, blk):
        key = (W, blk)
        if key not in memo:
            memo[key] = _spans_with(sys, F, W, blk)
        return memo[key]

    def partitions(vs: tuple[int, ...]):
        if not vs:
            yield []
            return
        head = vs[0]
        for rest in itertools.combinations(vs[1:], F.b - 1):
            part = (head,) + rest
            left = tuple(v for v in vs if v not in part)
            for tail in partitions(left):
                yield [part] + tail

    total = 0
    for parts in partitions(tuple(range(sys.n))):
        for perm in itertools.permutations(range(nblocks)):
            if all(spans(parts[p], blocks[i]) for i, p in enumerate(perm)):
                total += 1
    return total
