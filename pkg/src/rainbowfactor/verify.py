"""Independent factor checker.

Deliberately shares no search code with the solver: it re-derives every
edge image from the template and counts inversions itself.
"""

from __future__ import annotations

from .core import GraphSystem, PatternF
from .fb import RainbowPacking


def _sign_of(image: list[int], sign: str) -> tuple[tuple[int, ...], str]:
    inversions = sum(1 for i in range(len(image)) for j in range(i + 1, len(image)) if image[i] > image[j])
    if inversions % 2:
        sign = "+" if sign == "-" else "-"
    return tuple(sorted(image)), sign


def copy_problems(sys: GraphSystem, F: PatternF, cp) -> list[str]:
    problems = []
    emb = list(cp.embedding)
    if len(emb) != F.b or len(set(emb)) != F.b:
        return [f"embedding {emb} is not injective on {F.b} vertices"]
    if any(not 0 <= v < sys.n for v in emb):
        return [f"embedding {emb} leaves the vertex range"]
    if len(cp.colors) != F.f or len(set(cp.colors)) != F.f:
        return [f"copy on {sorted(emb)} does not use {F.f} distinct colours"]
    if F.partite:
        cls = {v: i for i, c in enumerate(sys.partition or ()) for v in c}
        if len({cls.get(v) for v in emb}) != F.b or None in {cls.get(v) for v in emb}:
            problems.append(f"copy on {sorted(emb)} is not transversal to the partition")
    for (verts, sign), c in zip(sorted(F.template.edges), cp.colors):
        if not 0 <= c < sys.m:
            problems.append(f"colour {c} out of range")
            continue
        host = sys.graphs[c]
        image = [emb[x] for x in verts]
        key, s = _sign_of(image, sign)
        if not F.directed or not host.directed:
            ok = (key, "+") in host.edges or (key, "-") in host.edges
        else:
            ok = (key, s) in host.edges
        if not ok:
            problems.append(f"edge {image} ({sign}) missing from colour {c}")
    return problems


def factor_problems(sys: GraphSystem, F: PatternF, packing: RainbowPacking | list) -> list[str]:
    """Empty list iff ``packing`` is a rainbow F-factor of ``sys``."""
    copies = list(packing)
    problems = []
    vs: list[int] = []
    cs: list[int] = []
    for cp in copies:
        problems.extend(copy_problems(sys, F, cp))
        vs.extend(cp.embedding)
        cs.extend(cp.colors)
    if sorted(vs) != list(range(sys.n)):
        problems.append("copies do not partition the vertex set")
    if sorted(cs) != list(range(sys.m)):
        problems.append("copies do not partition the colour set")
    return problems


def is_rainbow_factor(sys: GraphSystem, F: PatternF, packing) -> bool:
    return not factor_problems(sys, F, packing)


def packing_problems(sys: GraphSystem, F: PatternF, packing) -> list[str]:
    """Like ``factor_problems`` but only demands disjointness, not coverage."""
    copies = list(packing)
    problems = []
    vs: list[int] = []
    cs: list[int] = []
    for cp in copies:
        problems.extend(copy_problems(sys, F, cp))
        vs.extend(cp.embedding)
        cs.extend(cp.colors)
    if len(vs) != len(set(vs)):
        problems.append("copies share a vertex")
    if len(cs) != len(set(cs)):
        problems.append("copies share a colour")
    return problems
