"""Line-oriented text formats for graph systems and hypergraphs.

Instance file::

    # comment
    n k m [directed] [partite p]
    color 0
    v1 ... vk s
    color 1
    ...

``partite p`` splits ``0..n-1`` into ``p`` equal contiguous classes.  Every
colour in ``0..m-1`` must appear once; edge lines carry ``k`` vertices and a
sign.  Undirected instances accept only ``+`` and ignore vertex order.

Hypergraph file: header ``hypergraph n`` then one edge (vertex list) per line.
An ``fb`` file (see :class:`FbGraph`) is also accepted wherever a hypergraph is.
"""

from __future__ import annotations

from pathlib import Path

from .core import DirectedKGraph, GraphSystem, orient
from .fb import FbGraph
from .lp import Hypergraph


class FormatError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def even_partition(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    if p < 1 or n % p:
        raise FormatError(f"cannot split {n} vertices into {p} equal classes")
    size = n // p
    return tuple(tuple(range(i * size, (i + 1) * size)) for i in range(p))


def parse_system(text: str) -> GraphSystem:
    rows = list(_lines(text))
    if not rows:
        raise FormatError("empty instance")
    no, head = rows[0]
    try:
        n, k, m = map(int, head[:3])
    except ValueError:
        raise FormatError(f"line {no}: header must start with 'n k m'") from None
    directed = False
    partition = None
    rest = head[3:]
    while rest:
        word = rest.pop(0)
        if word == "directed":
            directed = True
        elif word == "partite" and rest:
            try:
                partition = even_partition(n, int(rest.pop(0)))
            except ValueError as exc:
                raise FormatError(f"line {no}: {exc}") from None
        else:
            raise FormatError(f"line {no}: unexpected header token {word!r}")
    if m < 1:
        raise FormatError("need at least one colour")
    edges: list[set] = [set() for _ in range(m)]
    seen_colors = set()
    cur = None
    for no, row in rows[1:]:
        if row[0] == "color":
            if len(row) != 2 or not row[1].isdigit() or not 0 <= int(row[1]) < m:
                raise FormatError(f"line {no}: bad colour line {' '.join(row)!r}")
            cur = int(row[1])
            if cur in seen_colors:
                raise FormatError(f"line {no}: colour {cur} repeated")
            seen_colors.add(cur)
            continue
        if cur is None:
            raise FormatError(f"line {no}: edge before any 'color' line")
        if len(row) != k + 1 or row[-1] not in ("+", "-"):
            raise FormatError(f"line {no}: edge needs {k} vertices and a sign")
        try:
            verts = [int(v) for v in row[:-1]]
            e = orient(verts, row[-1])
        except ValueError as exc:
            raise FormatError(f"line {no}: {exc}") from None
        if not all(0 <= v < n for v in verts):
            raise FormatError(f"line {no}: vertex out of range")
        if not directed:
            if row[-1] != "+":
                raise FormatError(f"line {no}: undirected instance with a '-' edge")
            e = (e[0], "+")
        if e in edges[cur]:
            raise FormatError(f"line {no}: duplicate edge in colour {cur}")
        edges[cur].add(e)
    missing = set(range(m)) - seen_colors
    if missing:
        raise FormatError(f"colours {sorted(missing)} have no 'color' section")
    try:
        return GraphSystem(tuple(DirectedKGraph(n, k, frozenset(es), partition, directed) for es in edges))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_system(sys: GraphSystem) -> str:
    head = f"{sys.n} {sys.k} {sys.m}"
    if sys.directed:
        head += " directed"
    if sys.partition is not None:
        head += f" partite {len(sys.partition)}"
        if sys.partition != even_partition(sys.n, len(sys.partition)):
            raise FormatError("only equal contiguous partitions can be written")
    out = [head]
    for i, g in enumerate(sys.graphs):
        out.append(f"color {i}")
        for verts, s in sorted(g.edges):
            out.append(" ".join(map(str, verts)) + f" {s}")
    return "\n".join(out) + "\n"


def read_system(path) -> GraphSystem:
    return parse_system(Path(path).read_text())


def write_system(sys: GraphSystem, path) -> None:
    Path(path).write_text(dump_system(sys))


def parse_hypergraph(text: str) -> tuple[Hypergraph, int | None]:
    """Hypergraph and, for ``fb`` input, its uniformity f + b (else None)."""
    rows = list(_lines(text))
    if not rows:
        raise FormatError("empty hypergraph file")
    if rows[0][1][0] == "fb":
        g = FbGraph.loads(text)
        return Hypergraph.from_fb(g), g.f + g.b
    no, head = rows[0]
    if head[0] != "hypergraph" or len(head) != 2:
        raise FormatError(f"line {no}: expected 'hypergraph n' or an fb header")
    n = int(head[1])
    edges = []
    for no, row in rows[1:]:
        try:
            edges.append(tuple(sorted(int(v) for v in row)))
        except ValueError:
            raise FormatError(f"line {no}: non-integer vertex") from None
    try:
        return Hypergraph(n, tuple(edges)), None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_hypergraph(H: Hypergraph) -> str:
    return "\n".join([f"hypergraph {H.n}"] + [" ".join(map(str, e)) for e in H.edges]) + "\n"
