"""The absorption pipeline: absorbing packing, almost cover, final absorption."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
import random
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import networkx as nx
from scipy.optimize import linprog

from .absorbers import Gadget, RainbowAbsorber, gadget_for
from .core import (GraphSystem, PatternF, PatternKind, RainbowCopy, candidate_sets, copies_on,
                   default_rule, degree_norm, hosts_rainbow_copy, min_star_degree)
from .fb import FbEdge, FbView, RainbowPacking
from .lp import Hypergraph, has_perfect_fractional_matching
from .oracle import Factor, Timeout, exact_rainbow_factor
from .verify import factor_problems

log = logging.getLogger("rainbowfactor")


class DensityWarning(UserWarning):
    """A degree precondition of a stage does not hold; the stage runs anyway."""


class StageFailure(RuntimeError):
    def __init__(self, stage: str, message: str, stats: dict | None = None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.stats = stats or {}


class CoverFailure(StageFailure):
    def __init__(self, message: str, best: "CoverResult"):
        super().__init__("almost_cover", message, {"leftover": len(best.leftover_vertices)})
        self.best = best


class InternalError(RuntimeError):
    """A returned packing failed independent verification."""


def derive_rng(seed: int, *labels) -> random.Random:
    """Independent stream for a labelled stage, stable across runs and platforms."""
    digest = hashlib.sha256(repr((seed,) + labels).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass
class PipelineConfig:
    eps: float = 0.05
    eps_prime: float = 0.04
    gamma1: float = 0.07
    phi: float = 0.1
    p_sample: float = 0.9
    rounds_exp: float = 1.1
    reserve_exp: float = 0.99
    retries: int = 20
    seed: int = 0
    c_abs: float | None = None
    c_cov: float | None = None
    c_kd: float | None = None
    strict: bool = False
    # desk-scale overrides; None falls back to the exponent form
    absorbers: int | None = None
    sample_rate: float | None = 0.25
    rounds: int | None = 6
    reserve_scale: float = 0.5
    pair_cap: int = 3
    size_slack: float = 0.9
    y_slack: float = 2.0
    deg_slack: float = 0.75
    leftover_cap: int | None = None
    cover_passes: int = 8
    spot_checks: int = 3
    select_mode: str = "avoid"
    lp_edges_per_block: int = 40
    partition_tries: int = 12

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < self.eps_prime < self.eps:
            raise ValueError("need 0 < eps' < eps")
        if self.gamma1 < 0 or self.phi < 0:
            raise ValueError("gamma1 and phi must be non-negative")
        if self.strict:
            if not self.phi < self.gamma1 * self.eps_prime / 8:
                raise ValueError("strict ordering needs phi < gamma1 * eps' / 8")
            if not self.gamma1 < self.eps_prime ** 3:
                raise ValueError("strict ordering needs gamma1 < eps'^3")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.select_mode not in ("avoid", "delete"):
            raise ValueError("select_mode is 'avoid' or 'delete'")

    @classmethod
    def from_pairs(cls, pairs: dict[str, str], base: "PipelineConfig | None" = None) -> "PipelineConfig":
        """Build from string key=value pairs, coercing by field type."""
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        values = dataclasses.asdict(base) if base else {}
        for key, raw in pairs.items():
            key = key.strip().replace("-", "_")
            if key not in kinds:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _coerce(kinds[key], str(raw).strip())
        return cls(**values)

    @classmethod
    def load(cls, path, base: "PipelineConfig | None" = None) -> "PipelineConfig":
        pairs = {}
        with open(path) as fh:
            for no, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{no}: expected key=value")
                k, v = line.split("=", 1)
                pairs[k] = v
        return cls.from_pairs(pairs, base)

    def thresholds(self, F: PatternF) -> tuple[float, float, float]:
        if F.kind is PatternKind.SINGLE_EDGE:
            ref = 0.5
        else:
            ref = 1 - 1 / F.b
        return tuple(ref if v is None else v for v in (self.c_abs, self.c_cov, self.c_kd))

    def rate(self, n: int) -> float:
        return self.sample_rate if self.sample_rate is not None else n ** (-self.p_sample)

    def round_count(self, n: int) -> int:
        want = max(1, round(n ** self.rounds_exp))
        return want if self.rounds is None else max(1, min(self.rounds, want))

    def reserve_hosts(self, n: int, b: int) -> int:
        size = self.reserve_scale * n ** self.reserve_exp
        return min(n, b * max(1, round(size / b)))

    def absorber_count(self, n: int, b: int, interior_vertices: int) -> int:
        if self.absorbers is not None:
            want = self.absorbers
        elif self.gamma1 == 0:
            want = 0
        else:
            want = max(1, math.floor(self.gamma1 * n))
        if interior_vertices:
            want = min(want, max(0, (n - b) // interior_vertices))
        return max(0, want)


def _coerce(kind, raw: str):
    kind = str(kind)
    if raw.lower() in ("none", "") and "None" in kind:
        return None
    if kind.startswith("bool"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    return raw


def check_density(sys: GraphSystem, F: PatternF, c: float, eps: float, stage: str) -> int:
    """Warn when some colour misses the (c + eps) degree threshold; returns the worst degree."""
    if sys.m == 0 or sys.n <= sys.k:
        return 0
    rule = default_rule(F)
    norm = degree_norm(F, sys.n, sys.k, rule.d, sys.partition)
    worst = min(min_star_degree(g, rule) for g in sys.graphs)
    if worst < (c + eps) * norm:
        warnings.warn(f"{stage}: minimum degree {worst} below ({c:.3f} + {eps}) * {norm}",
                      DensityWarning, stacklevel=3)
    return worst


# ----------------------------------------------------------------- selection

@dataclass
class Selection:
    edges: dict[int, object]
    hits: list[int]
    attempts: int


def _vertex_set(e) -> set:
    return set(e)


def select_absorbing_matching(H: Sequence, Z: Sequence, eps: float, rng: random.Random,
                              retries: int = 20, mode: str = "delete",
                              vertices: Callable = _vertex_set, n: int | None = None) -> Selection:
    """One edge per graph ``H[i]`` so that few are lost to overlaps and every target is hit.

    ``H[i]`` is a sequence of edges (sampled uniformly) or a callable
    ``(rng, avoid) -> edge | None``.  ``Z[j]`` is a set of edges or a
    predicate.  ``delete`` samples independently and then drops one edge of
    every intersecting pair; ``avoid`` samples each edge off the vertices
    already used.  Success needs ``|M| >= (1 - eps/4) t`` and at least
    ``eps t / 4`` edges of M in every ``Z[j]``.
    """
    t = len(H)
    if n is not None:
        _warn_sparse(H, Z, eps, n)
    tests = [z if callable(z) else z.__contains__ for z in Z]
    best = None
    for attempt in range(1, retries + 2):
        picks: dict[int, object] = {}
        used: set = set()
        for i, Hi in enumerate(H):
            avoid = used if mode == "avoid" else set()
            if callable(Hi):
                e = Hi(rng, avoid)
            else:
                pool = [e for e in Hi if not (vertices(e) & avoid)] if avoid else list(Hi)
                e = rng.choice(pool) if pool else None
            if e is None:
                continue
            picks[i] = e
            if mode == "avoid":
                used |= vertices(e)
        if mode == "delete":
            keys = sorted(picks)
            for a_i, a in enumerate(keys):
                if a not in picks:
                    continue
                for b in keys[a_i + 1:]:
                    if b in picks and vertices(picks[a]) & vertices(picks[b]):
                        del picks[b]
        hits = [sum(1 for e in picks.values() if test(e)) for test in tests]
        if best is None or (len(picks), min(hits, default=t)) > (len(best.edges), min(best.hits, default=t)):
            best = Selection(dict(picks), hits, attempt)
        if len(picks) >= (1 - eps / 4) * t and all(h >= eps * t / 4 for h in hits):
            return Selection(picks, hits, attempt)
    raise StageFailure("select_absorbing_matching",
                       f"no valid selection after {retries + 1} attempts",
                       {"best_size": len(best.edges) if best else 0,
                        "best_min_hits": min(best.hits, default=None) if best else None,
                        "t": t})


def _warn_sparse(H, Z, eps, n):
    for Hi in H:
        if callable(Hi):
            return
        for z in Z:
            if callable(z):
                return
            k = len(next(iter(Hi))) if Hi else 0
            if len(set(Hi) & set(z)) < eps * math.comb(n, k):
                warnings.warn("target/graph intersection below eps * C(n, k)", DensityWarning, stacklevel=3)
                return


# ----------------------------------------------------------------- absorbing packing

@dataclass
class AbsorberIndex:
    gadget: Gadget | None
    slots: list[tuple[RainbowCopy, ...]] = field(default_factory=list)

    def complete(self, slot: int, B: Sequence[int], I: Sequence[int]) -> RainbowAbsorber | None:
        return self.gadget.complete(self.slots[slot], tuple(B), tuple(I))

    def completions(self, B: Sequence[int], I: Sequence[int]) -> list[int]:
        return [s for s in range(len(self.slots)) if self.complete(s, B, I) is not None]

    def assign(self, requests: Sequence[tuple[Sequence[int], Sequence[int]]]) -> dict[int, RainbowAbsorber] | None:
        """Distinct slots for all requests (maximum bipartite matching), or None."""
        if not requests:
            return {}
        if len(requests) > len(self.slots):
            return None
        G = nx.Graph()
        left = [("r", j) for j in range(len(requests))]
        G.add_nodes_from(left)
        G.add_nodes_from(("s", s) for s in range(len(self.slots)))
        built = {}
        for j, (B, I) in enumerate(requests):
            for s in range(len(self.slots)):
                a = self.complete(s, B, I)
                if a is not None:
                    G.add_edge(("r", j), ("s", s))
                    built[j, s] = a
            if G.degree(("r", j)) == 0:
                return None
        match = nx.bipartite.hopcroft_karp_matching(G, top_nodes=left)
        if any(node not in match for node in left):
            return None
        return {match[("r", j)][1]: built[j, match[("r", j)][1]] for j in range(len(requests))}


def build_absorbing_packing(sys: GraphSystem, F: PatternF, cfg: PipelineConfig,
                            rng: random.Random) -> tuple[RainbowPacking, AbsorberIndex]:
    """Interior packings of a few random absorbers, each on its own colour block.

    The selection runs through :func:`select_absorbing_matching`; afterwards
    ``cfg.spot_checks`` random (B, I) pairs off Q must each be completable by
    some member of Q, else the whole selection is redrawn.
    """
    gadget = gadget_for(sys, F)
    inner = gadget.interior_copies * F.b
    count = cfg.absorber_count(sys.n, F.b, inner)
    c_abs = cfg.thresholds(F)[0]
    check_density(sys, F, c_abs, cfg.eps, "build_absorbing_packing")
    if count == 0:
        return RainbowPacking(()), AbsorberIndex(gadget, [])
    need = count * gadget.interior_colors
    if need > sys.m:
        raise StageFailure("build_absorbing_packing", "not enough colours for the absorbers")
    last = None
    for attempt in range(cfg.retries + 1):
        colors = rng.sample(range(sys.m), need)
        blocks = [colors[i * gadget.interior_colors:(i + 1) * gadget.interior_colors] for i in range(count)]
        samplers = [
            (lambda r, avoid, blk=blk: gadget.sample_interior(blk, avoid, r))
            for blk in blocks
        ]
        try:
            sel = select_absorbing_matching(
                samplers, [], cfg.eps, rng, retries=cfg.retries, mode=cfg.select_mode,
                vertices=lambda pk: set().union(*(cp.vertices for cp in pk)))
        except StageFailure as exc:
            last = exc
            continue
        slots = [sel.edges[i] for i in sorted(sel.edges)]
        index = AbsorberIndex(gadget, slots)
        Q = RainbowPacking(tuple(cp for slot in slots for cp in slot))
        if _spot_check(sys, F, Q, index, cfg.spot_checks, rng):
            return Q, index
        last = StageFailure("build_absorbing_packing", "spot check found an unabsorbable (B, I)")
    raise StageFailure("build_absorbing_packing", f"gave up after {cfg.retries + 1} attempts ({last})")


def _spot_check(sys, F, Q, index, checks, rng) -> bool:
    free_v = [v for v in range(sys.n) if v not in Q.vertices]
    free_c = [c for c in range(sys.m) if c not in Q.colors]
    if len(free_v) < F.b or len(free_c) < F.f:
        return True
    for _ in range(checks):
        B = sorted(rng.sample(free_v, F.b))
        I = sorted(rng.sample(free_c, F.f))
        if not index.completions(B, I):
            return False
    return True


# ----------------------------------------------------------------- two rounds

Round = tuple[frozenset, frozenset]  # (block indices, host vertices)


@dataclass
class RandomRound:
    S_blocks: frozenset
    S_hosts: frozenset
    plus: list[Round]
    minus: list[Round]
    rounds: list[Round]
    Y: dict
    pair_max: int
    edge_max: int
    attempts: int
    f: int = 1
    b: int = 1

    def is_balanced(self, i: int) -> bool:
        blocks, hosts = self.rounds[i]
        return self.b * len(blocks) * self.f == self.f * len(hosts)

    def colors(self, i: int) -> set[int]:
        return {blk * self.f + j for blk in self.rounds[i][0] for j in range(self.f)}


def _balance(plus: Round, S_blocks, S_hosts, b: int, rng: random.Random) -> Round | None:
    """Drop S-blocks and S-hosts from ``plus`` until b * blocks = hosts."""
    blocks, hosts = plus
    xs = sorted(blocks & S_blocks)
    ys = sorted(hosts & S_hosts)
    for x in range(len(xs) + 1):
        y = len(hosts) - b * (len(blocks) - x)
        if 0 <= y <= len(ys):
            drop_b = set(rng.sample(xs, x))
            drop_h = set(rng.sample(ys, y))
            return frozenset(blocks - drop_b), frozenset(hosts - drop_h)
    return None


def two_round_sample(g, cfg: PipelineConfig, rng: random.Random) -> RandomRound:
    """Reserved set S, rounds R_{i+} sampled at the configured rate, R_{i-} = R_{i+} - S,
    and balanced R_i between them.

    Colour blocks are sampled as whole units.  A round is redrawn when it
    cannot be balanced or when it shares a g-edge with an earlier round;
    the size, occupancy and pair properties are then checked and the whole
    family is redrawn on failure.
    """
    if not getattr(g, "strict", True):
        raise ValueError("two_round_sample needs a strict (f,b)-graph")
    n, f, b = g.n, g.f, g.b
    nblocks = len(g.blocks)
    rate = cfg.rate(n)
    R = cfg.round_count(n)
    s_hosts = cfg.reserve_hosts(n, b)
    s_blocks = s_hosts // b
    expected = rate * (nblocks * f + n)
    failures: dict[str, int] = {}
    for attempt in range(1, cfg.retries + 2):
        S_blocks = frozenset(rng.sample(range(nblocks), min(s_blocks, nblocks)))
        S_hosts = frozenset(rng.sample(range(n), s_hosts))
        plus, minus, rounds = [], [], []
        ok = True
        for i in range(R):
            for _ in range(cfg.retries + 1):
                p = (frozenset(x for x in range(nblocks) if rng.random() < rate),
                     frozenset(v for v in range(n) if rng.random() < rate))
                r = _balance(p, S_blocks, S_hosts, b, rng)
                if r is None:
                    failures["balance"] = failures.get("balance", 0) + 1
                    continue
                if _shares_edge(g, r, rounds):
                    failures["Y_e"] = failures.get("Y_e", 0) + 1
                    continue
                break
            else:
                ok = False
                break
            plus.append(p)
            minus.append((p[0] - S_blocks, p[1] - S_hosts))
            rounds.append(r)
        if not ok:
            continue
        Y = _occupancy(rounds, n, nblocks)
        pair_max = _pair_max(rounds)
        prop = _round_property_failure(rounds, Y, S_blocks, S_hosts, f, expected, R, rate, pair_max, cfg)
        if prop:
            failures[prop] = failures.get(prop, 0) + 1
            continue
        return RandomRound(S_blocks, S_hosts, plus, minus, rounds, Y, pair_max,
                           _edge_max(g, rounds), attempt, f, b)
    raise StageFailure("two_round_sample", f"retries exhausted; failures by property {failures}",
                       {"failures": failures})


def _shares_edge(g, r: Round, rounds: list[Round]) -> bool:
    for other in rounds:
        blocks = r[0] & other[0]
        hosts = r[1] & other[1]
        if blocks and len(hosts) >= g.b and g.edges_within(blocks, hosts):
            return True
    return False


def _occupancy(rounds: list[Round], n: int, nblocks: int) -> dict:
    Y = {("A", x): 0 for x in range(nblocks)}
    Y.update({("B", v): 0 for v in range(n)})
    for blocks, hosts in rounds:
        for x in blocks:
            Y[("A", x)] += 1
        for v in hosts:
            Y[("B", v)] += 1
    return Y


def _pair_max(rounds: list[Round]) -> int:
    """Largest number of rounds sharing two distinct units (blocks or hosts)."""
    counts: dict = {}
    for blocks, hosts in rounds:
        units = sorted([("A", x) for x in blocks] + [("B", v) for v in hosts])
        for i in range(len(units)):
            for j in range(i + 1, len(units)):
                key = (units[i], units[j])
                counts[key] = counts.get(key, 0) + 1
    return max(counts.values(), default=0)


def _edge_max(g, rounds: list[Round]) -> int:
    seen: dict = {}
    for blocks, hosts in rounds:
        for e in g.edges_within(blocks, hosts):
            seen[e] = seen.get(e, 0) + 1
    return max(seen.values(), default=0)


def _round_property_failure(rounds, Y, S_blocks, S_hosts, f, expected, R, rate, pair_max, cfg) -> str | None:
    for blocks, hosts in rounds:
        size = len(blocks) * f + len(hosts)
        if abs(size - expected) > cfg.size_slack * expected + f:
            return "size"
    cap = (1 + cfg.y_slack) * R * rate + 1
    for (side, x), y in Y.items():
        if y > cap:
            return "occupancy"
    if pair_max > cfg.pair_cap:
        return "pairs"
    return None


def round_edges(g, rr: RandomRound, i: int) -> list[FbEdge]:
    blocks, hosts = rr.rounds[i]
    return g.edges_within(blocks, hosts)


def round_pfm(g, rr: RandomRound, i: int) -> dict[FbEdge, Fraction] | None:
    """Exact PFM of g[R_i] keyed by (f,b)-edges, or None when there is none."""
    blocks, hosts = rr.rounds[i]
    edges = round_edges(g, rr, i)
    if not blocks and not hosts:
        return {}
    colors = sorted(c for x in blocks for c in g.blocks[x])
    pos = {("A", c): j for j, c in enumerate(colors)}
    pos.update({("B", v): len(colors) + j for j, v in enumerate(sorted(hosts))})
    flat = [tuple(pos[("A", c)] for c in a) + tuple(pos[("B", v)] for v in bb) for a, bb in edges]
    H = Hypergraph.of(len(pos), flat)
    sol = _support_pfm(H, g.f + g.b)
    if sol is None:
        ok, sol = has_perfect_fractional_matching(H, g.f + g.b)
        if not ok:
            return None
    lookup = dict(zip((tuple(sorted(e)) for e in flat), edges))
    return {lookup[e]: w for e, w in sol.weights.items() if w}


def _support_pfm(H: Hypergraph, b: int):
    """Exact PFM found on the support of a float one, or None if that shortcut fails.

    A basic float solution has at most |V| nonzero edges, so the exact LP
    on its support is small.  The result is checked exactly.
    """
    if not H.edges:
        return None
    A = [[1.0 if v in e else 0.0 for e in H.edges] for v in range(H.n)]
    res = linprog([0.0] * len(H.edges), A_eq=A, b_eq=[1.0] * H.n, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    support = Hypergraph(H.n, tuple(e for e, x in zip(H.edges, res.x) if x > 1e-9))
    ok, sol = has_perfect_fractional_matching(support, b)
    return sol if ok and sol.is_perfect(H) else None


@dataclass
class NearRegular:
    edges: list[FbEdge]
    deviation: float
    delta2: int
    attempts: int
    first_deviation: float


def sample_near_regular(g, rr: RandomRound, pfms: Sequence, cfg: PipelineConfig,
                        rng: random.Random, retries: int | None = None) -> NearRegular:
    """Keep each edge of g[R_i] independently with probability omega_i(e).

    Degree deviation is sum |d(v) - Y_v| / sum Y_v over units outside S;
    pair degree is the most chosen edges sharing two distinct units.
    """
    if len(pfms) != len(rr.rounds):
        raise StageFailure("sample_near_regular", "one PFM per round is required")
    for i, w in enumerate(pfms):
        if w is None:
            raise StageFailure("sample_near_regular", f"round {i} has no perfect fractional matching")
    retries = cfg.retries if retries is None else retries
    pool = []
    for w in pfms:
        weights = w.weights if hasattr(w, "weights") else w
        pool.extend((e, float(x)) for e, x in sorted(weights.items()) if x)
    pair_bound = max(cfg.pair_cap, g.n ** 0.1)
    first = None
    for attempt in range(1, retries + 2):
        chosen = [e for e, p in pool if rng.random() < p]
        dev, d2 = _regularity(g, rr, chosen)
        if first is None:
            first = dev
        if dev <= cfg.deg_slack and d2 <= pair_bound:
            return NearRegular(chosen, dev, d2, attempt, first)
    raise StageFailure("sample_near_regular", f"degree deviation {dev:.3f} or pair degree {d2} out of range",
                       {"deviation": dev, "delta2": d2, "first_deviation": first})


def _regularity(g, rr: RandomRound, chosen: list[FbEdge]) -> tuple[float, int]:
    deg: dict = {}
    pairs: dict = {}
    block_of = {blk: x for x, blk in enumerate(g.blocks)}
    for a, bb in chosen:
        units = [("A", block_of[a])] + [("B", v) for v in bb]
        for u in units:
            deg[u] = deg.get(u, 0) + 1
        for i in range(len(units)):
            for j in range(i + 1, len(units)):
                pairs[units[i], units[j]] = pairs.get((units[i], units[j]), 0) + 1
    total = diff = 0
    for unit, y in rr.Y.items():
        side, x = unit
        if (side == "A" and x in rr.S_blocks) or (side == "B" and x in rr.S_hosts):
            continue
        total += y
        diff += abs(deg.get(unit, 0) - y)
    return (diff / total if total else 0.0), max(pairs.values(), default=0)


# ----------------------------------------------------------------- almost cover

@dataclass
class CoverResult:
    packing: RainbowPacking
    leftover_vertices: list[int]
    leftover_colors: list[int]
    stats: dict = field(default_factory=dict)


def _random_copy(sys: GraphSystem, F: PatternF, colors: Sequence[int], free: Sequence[int],
                 rng: random.Random, tries: int = 30) -> RainbowCopy | None:
    if len(free) < F.b:
        return None
    for _ in range(tries):
        W = sorted(rng.sample(free, F.b))
        if hosts_rainbow_copy(sys, F, W, colors):
            return rng.choice(copies_on(sys, F, W, colors))
    hosts = [W for W in candidate_sets(sys, F, colors, free) if hosts_rainbow_copy(sys, F, W, colors)]
    if not hosts:
        return None
    return rng.choice(copies_on(sys, F, rng.choice(hosts), colors))


def _greedy_extend(sys, F, blocks, placed: dict, rng) -> None:
    used = set().union(*(cp.vertices for cp in placed.values())) if placed else set()
    order = [i for i in range(len(blocks)) if i not in placed]
    rng.shuffle(order)
    for i in order:
        free = [v for v in range(sys.n) if v not in used]
        cp = _random_copy(sys, F, blocks[i], free, rng)
        if cp is not None:
            placed[i] = cp
            used |= cp.vertices


def _repair(sys, F, blocks, placed: dict, rng) -> None:
    """Place missing blocks directly or by re-placing one placed block alongside."""
    for i in range(len(blocks)):
        if i in placed:
            continue
        used = set().union(*(cp.vertices for cp in placed.values())) if placed else set()
        free = [v for v in range(sys.n) if v not in used]
        cp = _random_copy(sys, F, blocks[i], free, rng, tries=5)
        if cp is not None:
            placed[i] = cp
            continue
        others = list(placed)
        rng.shuffle(others)
        for j in others:
            pool = sorted(set(free) | placed[j].vertices)
            done = False
            for W in candidate_sets(sys, F, blocks[i], pool):
                if not hosts_rainbow_copy(sys, F, W, blocks[i]):
                    continue
                rest = [v for v in pool if v not in W]
                cj = _random_copy(sys, F, blocks[j], rest, rng, tries=5)
                if cj is not None:
                    placed[i] = rng.choice(copies_on(sys, F, W, blocks[i]))
                    placed[j] = cj
                    done = True
                    break
            if done:
                break


def _finish(sys, F, blocks, placed: dict, stats: dict) -> CoverResult:
    copies = tuple(placed[i] for i in sorted(placed))
    P = RainbowPacking(copies)
    left_v = [v for v in range(sys.n) if v not in P.vertices]
    left_c = [c for c in range(sys.m) if c not in P.colors]
    return CoverResult(P, left_v, left_c, stats)


def _blocks(sys: GraphSystem, F: PatternF) -> list[tuple[int, ...]]:
    return [tuple(range(i * F.f, (i + 1) * F.f)) for i in range(sys.m // F.f)]


def almost_cover(sys: GraphSystem, F: PatternF, cfg: PipelineConfig, strategy: str = "greedy",
                 rng: random.Random | None = None, max_leftover: int | None = None,
                 warn: bool = True) -> CoverResult:
    """Rainbow packing with colour blocks I_i leaving at most ``max_leftover`` vertices.

    ``max_leftover`` defaults to floor(phi * n).  Each strategy produces a
    start which random greedy extension and single-swap repair complete;
    up to ``cfg.cover_passes`` passes are made and the best is kept.
    """
    if sys.n % F.b or sys.m * F.b != sys.n * F.f:
        raise ValueError(f"almost_cover needs b | n and m = nf/b (n={sys.n}, m={sys.m})")
    if strategy not in ("greedy", "nibble", "lp_rounding"):
        raise ValueError(f"unknown cover strategy {strategy!r}")
    rng = rng or derive_rng(cfg.seed, "cover")
    cap = math.floor(cfg.phi * sys.n) if max_leftover is None else max_leftover
    if warn:
        check_density(sys, F, cfg.thresholds(F)[1], cfg.eps, "almost_cover")
    blocks = _blocks(sys, F)
    best = None
    for p in range(max(1, cfg.cover_passes)):
        stats = {"strategy": strategy, "pass": p + 1}
        if strategy == "greedy":
            placed = {}
        elif strategy == "lp_rounding":
            placed = _lp_round(sys, F, blocks, cfg, rng, stats)
        else:
            placed = _nibble_start(sys, F, cfg, rng, stats)
        stats["start_copies"] = len(placed)
        _greedy_extend(sys, F, blocks, placed, rng)
        _repair(sys, F, blocks, placed, rng)
        res = _finish(sys, F, blocks, placed, stats)
        if best is None or len(res.leftover_vertices) < len(best.leftover_vertices):
            best = res
        if len(best.leftover_vertices) <= cap:
            return best
    raise CoverFailure(f"leftover {len(best.leftover_vertices)} exceeds {cap}", best)


def _lp_round(sys, F, blocks, cfg, rng, stats) -> dict:
    """Float LP on sampled edges (HiGHS), then exponential-race rounding."""
    edges = []
    for i, blk in enumerate(blocks):
        seen = set()
        for _ in range(cfg.lp_edges_per_block * 4):
            if len(seen) >= cfg.lp_edges_per_block:
                break
            W = tuple(sorted(rng.sample(range(sys.n), F.b)))
            if W not in seen and hosts_rainbow_copy(sys, F, W, blk):
                seen.add(W)
        edges.extend((i, W) for W in sorted(seen))
    stats["lp_edges"] = len(edges)
    if not edges:
        return {}
    nb = len(blocks)
    rows = [[0.0] * len(edges) for _ in range(nb + sys.n)]
    for j, (i, W) in enumerate(edges):
        rows[i][j] = 1.0
        for v in W:
            rows[nb + v][j] = 1.0
    res = linprog([-1.0] * len(edges), A_ub=rows, b_ub=[1.0] * (nb + sys.n),
                  bounds=(0, 1), method="highs")
    if res.status != 0:
        stats["lp_status"] = int(res.status)
        return {}
    stats["lp_value"] = round(-res.fun, 6)
    keyed = []
    for j, w in enumerate(res.x):
        if w > 1e-9:
            keyed.append((rng.expovariate(1.0) / w, j))
    keyed.sort()
    placed: dict = {}
    used: set = set()
    for _, j in keyed:
        i, W = edges[j]
        if i in placed or used & set(W):
            continue
        placed[i] = rng.choice(copies_on(sys, F, W, blocks[i]))
        used |= set(W)
    return placed


def _nibble_start(sys, F, cfg, rng, stats) -> dict:
    g = FbView(sys, F)
    try:
        rr = two_round_sample(g, cfg, rng)
    except StageFailure as exc:
        stats["nibble"] = str(exc)
        return {}
    keep = []
    pfms = []
    for i in range(len(rr.rounds)):
        w = round_pfm(g, rr, i)
        if w is not None:
            keep.append(i)
            pfms.append(w)
    stats["rounds"] = len(rr.rounds)
    stats["rounds_with_pfm"] = len(keep)
    rr = dataclasses.replace(rr, rounds=[rr.rounds[i] for i in keep],
                             plus=[rr.plus[i] for i in keep], minus=[rr.minus[i] for i in keep],
                             Y=_occupancy([rr.rounds[i] for i in keep], g.n, len(g.blocks)))
    try:
        near = sample_near_regular(g, rr, pfms, cfg, rng)
    except StageFailure as exc:
        stats["nibble"] = str(exc)
        return {}
    stats["near_regular_edges"] = len(near.edges)
    order = list(near.edges)
    rng.shuffle(order)
    block_of = {blk: x for x, blk in enumerate(g.blocks)}
    placed: dict = {}
    used: set = set()
    for a, bb in order:
        i = block_of[a]
        if i in placed or used & set(bb):
            continue
        placed[i] = rng.choice(copies_on(sys, F, bb, a))
        used |= set(bb)
    return placed


# ----------------------------------------------------------------- the factor

@dataclass
class FactorResult:
    status: str  # factor | infeasible | failed | timeout
    packing: RainbowPacking | None
    stats: dict = field(default_factory=dict)
    reason: str = ""

    def to_json(self) -> dict:
        return {"status": self.status,
                "packing": self.packing.to_json() if self.packing is not None else None,
                "reason": self.reason, "stats": self.stats}


def _verified(sys, F, packing: RainbowPacking, stats, strategy: str) -> FactorResult:
    problems = factor_problems(sys, F, packing)
    if problems:
        raise InternalError(f"{strategy} produced an invalid factor: {problems[:3]}")
    return FactorResult("factor", packing, stats)


def find_rainbow_factor(sys: GraphSystem, F: PatternF, cfg: PipelineConfig | None = None,
                        strategy: str = "absorption", cover: str = "greedy",
                        budget: int | None = None) -> FactorResult:
    cfg = cfg or PipelineConfig()
    if sys.n == 0:
        return FactorResult("factor", RainbowPacking(()), {})
    if sys.n % F.b or sys.m * F.b != sys.n * F.f:
        raise ValueError(f"need b | n and m = nf/b (n={sys.n}, m={sys.m}, f={F.f}, b={F.b})")
    if strategy == "exact":
        t0 = time.perf_counter()
        out = exact_rainbow_factor(sys, F, budget)
        stats = {"nodes": out.nodes, "ms": round(1000 * (time.perf_counter() - t0), 3)}
        if isinstance(out, Factor):
            return _verified(sys, F, out.packing, stats, "exact")
        if isinstance(out, Timeout):
            return FactorResult("timeout", None, stats, "node budget exhausted")
        return FactorResult("infeasible", None, stats, "exhaustive search found no factor")
    if strategy != "absorption":
        raise ValueError(f"unknown strategy {strategy!r}")
    history = []
    for attempt in range(max(1, cfg.retries)):
        stats: dict = {"attempt": attempt + 1}
        try:
            result = _absorption_attempt(sys, F, cfg, cover, attempt, stats)
        except StageFailure as exc:
            history.append(str(exc))
            log.info("attempt %d failed: %s", attempt + 1, exc)
            continue
        if result is not None:
            result.stats["failed_attempts"] = history
            return result
        history.append("leftover could not be absorbed")
    return FactorResult("failed", None, {"attempts": len(history), "failures": history},
                        history[-1] if history else "no attempt made")


def _absorption_attempt(sys, F, cfg, cover, attempt, stats) -> FactorResult | None:
    with warnings.catch_warnings():
        if attempt:
            warnings.simplefilter("ignore", DensityWarning)
        t0 = time.perf_counter()
        Q, index = build_absorbing_packing(sys, F, cfg, derive_rng(cfg.seed, "absorbers", attempt))
        stats["absorbers"] = len(index.slots)
        stats["q_copies"] = len(Q)
        t1 = time.perf_counter()
        rest_v = sorted(set(range(sys.n)) - Q.vertices)
        rest_c = sorted(set(range(sys.m)) - Q.colors)
        cap = cfg.leftover_cap if cfg.leftover_cap is not None else len(index.slots) * F.b
        cover_copies: tuple[RainbowCopy, ...] = ()
        left_v, left_c = list(rest_v), list(rest_c)
        if rest_v:
            sub = sys.induced(rest_v, rest_c)
            rule = default_rule(F)
            if sub.n > sub.k:
                stats["residual_min_degree"] = min(min_star_degree(g, rule) for g in sub.graphs)
            res = almost_cover(sub, F, cfg, cover, derive_rng(cfg.seed, "cover", attempt),
                               max_leftover=cap, warn=False)
            cover_copies = tuple(cp.relabel(rest_v, rest_c) for cp in res.packing)
            left_v = [rest_v[v] for v in res.leftover_vertices]
            left_c = [rest_c[c] for c in res.leftover_colors]
        stats["cover_copies"] = len(cover_copies)
        stats["leftover"] = len(left_v)
        t2 = time.perf_counter()
    assignment = _absorb_leftover(index, F, left_v, left_c, derive_rng(cfg.seed, "leftover", attempt),
                                  cfg.partition_tries)
    t3 = time.perf_counter()
    stats["ms_absorbers"] = round(1000 * (t1 - t0), 3)
    stats["ms_cover"] = round(1000 * (t2 - t1), 3)
    stats["ms_absorb"] = round(1000 * (t3 - t2), 3)
    if assignment is None:
        return None
    copies = list(cover_copies)
    for s, slot in enumerate(index.slots):
        copies.extend(assignment[s].exterior if s in assignment else slot)
    stats["absorbed"] = len(assignment)
    packing = RainbowPacking(tuple(sorted(copies, key=lambda cp: min(cp.embedding))))
    return _verified(sys, F, packing, stats, "absorption")


def _absorb_leftover(index: AbsorberIndex, F: PatternF, left_v: list[int], left_c: list[int],
                     rng: random.Random, tries: int) -> dict[int, RainbowAbsorber] | None:
    if len(left_v) % F.b or len(left_c) * F.b != len(left_v) * F.f:
        return None
    if not left_v:
        return {}
    colour_blocks = [tuple(left_c[i * F.f:(i + 1) * F.f]) for i in range(len(left_c) // F.f)]
    order = list(left_v)
    for attempt in range(max(1, tries)):
        if attempt:
            rng.shuffle(order)
        parts = [tuple(sorted(order[i * F.b:(i + 1) * F.b])) for i in range(len(order) // F.b)]
        out = index.assign(list(zip(parts, colour_blocks)))
        if out is not None:
            return out
    return None
