"""Rainbow F-absorbers: the clique gadget and the matching gadget.

An absorber for a b-set ``B`` is a vertex set ``L`` disjoint from ``B`` with
two rainbow packings: the interior one covers ``L`` exactly, the exterior one
covers ``B + L`` exactly and uses the interior colours plus f new ones.
Swapping interior for exterior swallows ``B`` and the new colours.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .core import (GraphSystem, PatternF, PatternKind, RainbowCopy, copies_on,
                   enumerate_rainbow_copies)
from .fb import FbGraph, RainbowPacking


@dataclass(frozen=True)
class RainbowAbsorber:
    B: tuple[int, ...]
    L: tuple[int, ...]
    interior: tuple[RainbowCopy, ...]
    exterior: tuple[RainbowCopy, ...]
    new_colors: tuple[int, ...]

    @property
    def interior_colors(self) -> list[int]:
        return [c for cp in self.interior for c in cp.colors]

    @property
    def exterior_colors(self) -> list[int]:
        return [c for cp in self.exterior for c in cp.colors]

    @property
    def key(self):
        return (tuple(sorted(self.B)),
                frozenset(cp.key for cp in self.interior),
                frozenset(cp.key for cp in self.exterior))

    def to_json(self) -> dict:
        def dump(copies):
            return [{"vertices": list(cp.embedding),
                     "edges": [[list(v), s, c] for (v, s), c in zip(cp.edges, cp.colors)]}
                    for cp in copies]
        return {"B": list(self.B), "L": list(self.L), "new_colors": list(self.new_colors),
                "interior": dump(self.interior), "exterior": dump(self.exterior)}


def _copy_ok(cp: RainbowCopy, sys: GraphSystem, F: PatternF) -> bool:
    if len(cp.embedding) != F.b or len(set(cp.embedding)) != F.b or len(cp.colors) != F.f:
        return False
    if len(set(cp.colors)) != F.f or not all(0 <= c < sys.m for c in cp.colors):
        return False
    return any(c.key == cp.key for c in copies_on(sys, F, cp.embedding, cp.colors))


def _structure_reason(a: RainbowAbsorber, b: int, f: int) -> str | None:
    """Checks that need no host system; None when the absorber is well formed."""
    B, L = set(a.B), set(a.L)
    if len(B) != len(a.B) or len(B) != b:
        return "B is not a b-set"
    if B & L:
        return "B∩L nonempty"
    for name, copies in (("interior", a.interior), ("exterior", a.exterior)):
        cols = [c for cp in copies for c in cp.colors]
        if len(cols) != len(set(cols)):
            return "color clash"
        seen: set[int] = set()
        for cp in copies:
            if seen & cp.vertices:
                return f"{name} copies overlap"
            seen |= cp.vertices
        if seen != (L if name == "interior" else B | L):
            return f"{name} packing does not cover {'L' if name == 'interior' else 'B∪L'} exactly"
    if len(a.new_colors) != f or len(set(a.new_colors)) != f:
        return "new colour set must have f distinct colours"
    if set(a.interior_colors) & set(a.new_colors):
        return "color clash"
    if sorted(a.exterior_colors) != sorted(a.interior_colors + list(a.new_colors)):
        return "exterior colours differ from interior plus new colours"
    if len(a.exterior_colors) != (len(B | L) // b) * f:
        return "exterior colour count is not |B∪L|f/b"
    return None


def validate_absorber(a: RainbowAbsorber, sys: GraphSystem, F: PatternF) -> tuple[bool, str]:
    reason = _structure_reason(a, F.b, F.f)
    if reason is None:
        for cp in a.interior + a.exterior:
            if not _copy_ok(cp, sys, F):
                reason = f"copy on {sorted(cp.vertices)} is not a rainbow F in the system"
                break
    return (reason is None, reason or "ok")


def absorb(a: RainbowAbsorber, mode: str, F: PatternF) -> RainbowPacking:
    """Interior packing (on L) or exterior packing (on B∪L)."""
    reason = _structure_reason(a, F.b, F.f)
    if reason is not None:
        raise ValueError(f"invalid absorber: {reason}")
    if mode == "interior":
        return RainbowPacking(a.interior)
    if mode == "exterior":
        return RainbowPacking(a.exterior)
    raise ValueError(f"mode must be 'interior' or 'exterior', not {mode!r}")


def is_clique_like(F: PatternF) -> bool:
    return F.k == 2 and F.kind in (PatternKind.CLIQUE, PatternKind.TRANSITIVE_TOURNAMENT,
                                   PatternKind.TOURNAMENT, PatternKind.PARTITE_CLIQUE)


def _internal(cp: RainbowCopy, S: set[int]) -> frozenset:
    return frozenset((e, c) for e, c in zip(cp.edges, cp.colors) if set(e[0]) <= S)


def _swap_partners(sys: GraphSystem, F: PatternF, interior: RainbowCopy, v: int,
                   u: int) -> list[RainbowCopy]:
    """Copies on V(interior) - v + u with the same colours and identical edges inside."""
    S = set(interior.vertices) - {v}
    inside = _internal(interior, S)
    return [cp for cp in copies_on(sys, F, sorted(S | {u}), interior.colors)
            if _internal(cp, S) == inside]


def enumerate_clique_absorbers(sys: GraphSystem, F: PatternF, S: Sequence[int],
                               C: Sequence[int], limit: int | None = None) -> list[RainbowAbsorber]:
    """Clique/tournament gadget for the target ``S = (u_1..u_t)`` and colours ``C``.

    ``C`` lists t blocks of f interior colours followed by f bridge colours.
    The bridge copy sits on ``(v_1..v_t)``; interior copy i is ``S_i + v_i``
    and exterior copy i is ``S_i + u_i`` with the same edges and colours
    inside ``S_i``.
    """
    if not is_clique_like(F):
        raise ValueError(f"clique gadget does not apply to {F.label()}")
    t, f = F.b, F.f
    S = tuple(S)
    C = tuple(C)
    if len(S) != t or len(set(S)) != t or not all(0 <= v < sys.n for v in S):
        raise ValueError(f"target must be {t} distinct vertices")
    if len(C) != (t + 1) * f or len(set(C)) != len(C) or not all(0 <= c < sys.m for c in C):
        raise ValueError(f"malformed C: need {(t + 1) * f} distinct colours in range")
    if limit is not None and limit <= 0:
        return []
    blocks = [C[i * f:(i + 1) * f] for i in range(t)]
    bridge_cols = C[t * f:]
    out: list[RainbowAbsorber] = []
    seen = set()
    free = [v for v in range(sys.n) if v not in S]
    for vs in itertools.permutations(free, t):
        bridges = copies_on(sys, F, vs, bridge_cols)
        if not bridges:
            continue
        rest = [v for v in free if v not in vs]
        for absorber in _clique_tails(sys, F, S, vs, blocks, rest, bridges):
            if absorber.key in seen:
                continue
            seen.add(absorber.key)
            out.append(absorber)
            if limit is not None and len(out) >= limit:
                return out
    return out


def _clique_tails(sys, F, S, vs, blocks, rest, bridges) -> Iterator[RainbowAbsorber]:
    t = len(S)

    def grow(i: int, avail: list[int], pairs: list[tuple[RainbowCopy, RainbowCopy]]):
        if i == t:
            yield pairs
            return
        for Si in itertools.combinations(avail, t - 1):
            left = [v for v in avail if v not in Si]
            for inner in copies_on(sys, F, Si + (vs[i],), blocks[i]):
                for outer in _swap_partners(sys, F, inner, vs[i], S[i]):
                    pairs.append((inner, outer))
                    yield from grow(i + 1, left, pairs)
                    pairs.pop()

    for pairs in grow(0, rest, []):
        L = tuple(sorted(v for inner, _ in pairs for v in inner.vertices))
        for bridge in bridges:
            yield RainbowAbsorber(
                B=tuple(S), L=L,
                interior=tuple(inner for inner, _ in pairs),
                exterior=(bridge,) + tuple(outer for _, outer in pairs),
                new_colors=tuple(bridge.colors),
            )


def _edge_copy(sys: GraphSystem, verts: Sequence[int], c: int) -> RainbowCopy | None:
    verts = tuple(sorted(verts))
    found = sys.graphs[c].candidates(verts, None)
    if not found:
        return None
    return RainbowCopy(verts, (found[0],), (c,))


def fb_to_edge_system(g: FbGraph, k: int) -> dict[int, set[tuple[int, ...]]]:
    if g.f != 1 or g.b != k:
        raise ValueError("matching absorbers need the (1,k)-graph of a single-edge reduction")
    per = {c: set() for c in range(g.m)}
    for (c,), bb in g.edges:
        per[c].add(bb)
    return per


def enumerate_matching_absorbers(g: FbGraph, T: Sequence[int], C: Sequence[int],
                                 limit: int | None = None) -> list[RainbowAbsorber]:
    """Matching gadget: edges ``M_2..M_k`` of colours ``c_2..c_k`` off ``T``.

    Pick ``u_i`` in ``M_i``; need ``{u_2..u_k, v_1}`` in colour ``c_1`` and
    ``M_i - u_i + v_i`` in colour ``c_i`` for some labelling of ``T``.
    """
    k = g.b
    T = tuple(T)
    C = tuple(C)
    if len(T) != k or len(set(T)) != k or not all(0 <= v < g.n for v in T):
        raise ValueError(f"target must be {k} distinct host vertices")
    if len(C) != k or len(set(C)) != k or not all(0 <= c < g.m for c in C):
        raise ValueError(f"need {k} distinct colours in range")
    if limit is not None and limit <= 0:
        return []
    per = fb_to_edge_system(g, k)
    tset = set(T)
    out: list[RainbowAbsorber] = []
    seen = set()

    def grow(labels, i, used, chosen):
        if i == k:
            yield chosen
            return
        c = C[i]
        for M in sorted(per[c]):
            if used & set(M):
                continue
            for u in M:
                swapped = tuple(sorted((set(M) - {u}) | {labels[i]}))
                if swapped in per[c]:
                    chosen.append((M, u, swapped))
                    yield from grow(labels, i + 1, used | set(M), chosen)
                    chosen.pop()

    for labels in itertools.permutations(T):
        for chosen in grow(labels, 1, set(tset), []):
            head = tuple(sorted([u for _, u, _ in chosen] + [labels[0]]))
            if head not in per[C[0]]:
                continue
            interior = tuple(RainbowCopy(M, ((M, "+"),), (C[i + 1],)) for i, (M, _, _) in enumerate(chosen))
            exterior = (RainbowCopy(head, ((head, "+"),), (C[0],)),) + tuple(
                RainbowCopy(sw, ((sw, "+"),), (C[i + 1],)) for i, (_, _, sw) in enumerate(chosen))
            a = RainbowAbsorber(tuple(T), tuple(sorted(v for M, _, _ in chosen for v in M)),
                                interior, exterior, (C[0],))
            if a.key in seen:
                continue
            seen.add(a.key)
            out.append(a)
            if limit is not None and len(out) >= limit:
                return out
    return out


class Gadget:
    """How the pipeline builds and completes absorbers for one pattern family."""

    def __init__(self, sys: GraphSystem, F: PatternF):
        self.sys = sys
        self.F = F

    interior_copies: int
    order: int

    @property
    def interior_colors(self) -> int:
        return self.interior_copies * self.F.f

    def sample_interior(self, colors: Sequence[int], avoid: set[int],
                        rng: random.Random, tries: int = 200) -> tuple[RainbowCopy, ...] | None:
        """A random interior packing using ``colors`` (consecutive f-blocks) off ``avoid``."""
        F = self.F
        used = set(avoid)
        copies = []
        for i in range(self.interior_copies):
            block = tuple(colors[i * F.f:(i + 1) * F.f])
            cp = _random_copy(self.sys, F, block, used, rng, tries)
            if cp is None:
                return None
            copies.append(cp)
            used |= cp.vertices
        return tuple(copies)

    def complete(self, interior: Sequence[RainbowCopy], B: Sequence[int],
                 new_colors: Sequence[int]) -> RainbowAbsorber | None:
        raise NotImplementedError


class CliqueGadget(Gadget):
    def __init__(self, sys, F):
        super().__init__(sys, F)
        self.interior_copies = F.b
        self.order = F.b * F.b + F.b

    def complete(self, interior, B, new_colors):
        F = self.F
        B = tuple(B)
        if set(B) & {v for cp in interior for v in cp.vertices}:
            return None
        for us in itertools.permutations(B):
            for vs in itertools.product(*[cp.embedding for cp in interior]):
                bridges = copies_on(self.sys, F, vs, new_colors)
                if not bridges:
                    continue
                outers = []
                for cp, v, u in zip(interior, vs, us):
                    partners = _swap_partners(self.sys, F, cp, v, u)
                    if not partners:
                        break
                    outers.append(partners[0])
                else:
                    L = tuple(sorted(v for cp in interior for v in cp.vertices))
                    return RainbowAbsorber(tuple(us), L, tuple(interior),
                                           (bridges[0],) + tuple(outers), tuple(bridges[0].colors))
        return None


class MatchingGadget(Gadget):
    def __init__(self, sys, F):
        super().__init__(sys, F)
        self.interior_copies = F.k - 1
        self.order = F.k * F.k

    def complete(self, interior, B, new_colors):
        (c1,) = tuple(new_colors)
        B = tuple(B)
        if set(B) & {v for cp in interior for v in cp.vertices}:
            return None
        for labels in itertools.permutations(B):
            swaps = []
            for cp, v in zip(interior, labels[1:]):
                M = cp.embedding
                opts = []
                for u in M:
                    sw = _edge_copy(self.sys, (set(M) - {u}) | {v}, cp.colors[0])
                    if sw is not None:
                        opts.append((u, sw))
                if not opts:
                    break
                swaps.append(opts)
            else:
                for pick in itertools.product(*swaps):
                    head = _edge_copy(self.sys, [u for u, _ in pick] + [labels[0]], c1)
                    if head is not None:
                        L = tuple(sorted(v for cp in interior for v in cp.vertices))
                        return RainbowAbsorber(labels, L, tuple(interior),
                                               (head,) + tuple(sw for _, sw in pick), (c1,))
        return None


def gadget_for(sys: GraphSystem, F: PatternF) -> Gadget:
    if F.kind is PatternKind.SINGLE_EDGE:
        return MatchingGadget(sys, F)
    if is_clique_like(F):
        return CliqueGadget(sys, F)
    raise NotImplementedError(f"no absorber gadget for {F.label()}")


def _random_copy(sys: GraphSystem, F: PatternF, colors: Sequence[int], avoid: set[int],
                 rng: random.Random, tries: int) -> RainbowCopy | None:
    """Rejection-sample a rainbow copy off ``avoid``; fall back to full enumeration."""
    pool = [v for v in range(sys.n) if v not in avoid]
    if len(pool) < F.b:
        return None
    for _ in range(tries):
        W = rng.sample(pool, F.b)
        found = copies_on(sys, F, W, colors)
        if found:
            return rng.choice(found)
    found = enumerate_rainbow_copies(sys, F, colors, vertices=pool)
    return rng.choice(found) if found else None
