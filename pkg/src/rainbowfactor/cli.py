"""Command-line front end: ``rainbowfactor {gen,solve,verify,lp,absorbers,sweep}``.

Exit codes: 0 success or feasible, 1 infeasible or not found, 2 usage or
input error, 3 internal failure.  ``RF_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from pathlib import Path

from .absorbers import enumerate_clique_absorbers, enumerate_matching_absorbers, is_clique_like
from .core import PatternF, PatternKind
from .fb import RainbowPacking, build_fb_graph
from .generators import InstanceKind, InstanceSpec
from .io import FormatError, dump_system, parse_hypergraph, read_system
from .lp import (FarkasCertificate, has_perfect_fractional_matching, max_fractional_matching,
                 min_fractional_cover)
from .pipeline import InternalError, PipelineConfig, find_rainbow_factor
from .report import SweepSpec, emit_report, run_sweep
from .verify import factor_problems

OK, INFEASIBLE, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _pattern(text: str) -> PatternF:
    try:
        return PatternF.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    pairs = {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        pairs[k] = v
    if args.seed is not None:
        pairs["seed"] = str(args.seed)
    if args.retries is not None:
        pairs["retries"] = str(args.retries)
    return PipelineConfig.from_pairs(pairs, cfg)


def cmd_gen(args) -> int:
    if args.pattern:
        F = _pattern(args.pattern)
    elif args.t:
        F = PatternF.clique(args.t)
    elif args.k:
        F = PatternF.single_edge(args.k)
    else:
        raise UsageError("gen needs --pattern, --t or --k")
    delta = args.delta
    if delta is None and args.frac is not None:
        from .report import target_degree
        delta = target_degree(F, args.n, args.frac)
    spec = InstanceSpec(InstanceKind(args.kind), args.n, F, delta=delta, seed=args.seed, p_delete=args.p_delete)
    _write(dump_system(spec.build()), args.out)
    return OK


def cmd_solve(args) -> int:
    F = _pattern(args.pattern)
    system = read_system(args.instance)
    cfg = _config(args)
    t0 = time.perf_counter()
    res = find_rainbow_factor(system, F, cfg, strategy=args.strategy, cover=args.cover, budget=args.budget)
    out = res.to_json()
    out["timings"] = {"total_ms": round(1000 * (time.perf_counter() - t0), 3)}
    out["timings"].update({k: v for k, v in res.stats.items() if k.startswith("ms")})
    out["stats"] = {k: v for k, v in res.stats.items() if not k.startswith("ms")}
    _write(json.dumps(out, indent=1, sort_keys=True, default=str) + "\n", args.out)
    return OK if res.status == "factor" else INFEASIBLE


def cmd_verify(args) -> int:
    F = _pattern(args.pattern)
    system = read_system(args.instance)
    data = json.loads(Path(args.factor).read_text())
    if isinstance(data, dict):
        data = data.get("packing")
    if not isinstance(data, list):
        raise UsageError("factor file holds no packing")
    try:
        packing = RainbowPacking.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"invalid: {exc}")
        return INFEASIBLE
    problems = factor_problems(system, F, packing)
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return INFEASIBLE
    print(f"valid rainbow {F.label()}-factor with {len(packing)} copies")
    return OK


def cmd_lp(args) -> int:
    H, fb_uniformity = parse_hypergraph(Path(args.hypergraph).read_text())
    if args.mode == "matching":
        sol = max_fractional_matching(H)
        print(f"value,{sol.value}")
        print("edge,weight")
        for e, w in sorted(sol.weights.items()):
            print(f"{' '.join(map(str, e))},{w}")
        return OK
    if args.mode == "cover":
        sol = min_fractional_cover(H)
        print(f"value,{sol.value}")
        print("vertex,weight")
        for v, w in sorted(sol.weights.items()):
            print(f"{v},{w}")
        return OK
    b = args.b or fb_uniformity or H.uniformity()
    if b is None:
        raise UsageError("pfm mode needs a uniform hypergraph (or --b)")
    ok, wit = has_perfect_fractional_matching(H, b)
    print(f"pfm,{'true' if ok else 'false'}")
    if isinstance(wit, FarkasCertificate):
        print("vertex,certificate")
        for v, a in enumerate(wit.a):
            print(f"{v},{a}")
        return INFEASIBLE
    print("edge,weight")
    for e, w in sorted(wit.weights.items()):
        print(f"{' '.join(map(str, e))},{w}")
    return OK


def cmd_absorbers(args) -> int:
    F = _pattern(args.pattern)
    system = read_system(args.instance)
    target = _ints(args.target)
    colors = _ints(args.colors)
    if F.kind is PatternKind.SINGLE_EDGE:
        g = build_fb_graph(system, F, strict=False)
        found = enumerate_matching_absorbers(g, target, colors, args.limit)
    elif is_clique_like(F):
        found = enumerate_clique_absorbers(system, F, target, colors, args.limit)
    else:
        raise UsageError(f"no absorber construction for {F.label()}")
    for a in found:
        print(json.dumps(a.to_json(), sort_keys=True))
    return OK if found else INFEASIBLE


def cmd_sweep(args) -> int:
    pairs = {}
    for item in args.set or []:
        k, _, v = item.partition("=")
        pairs[k] = v
    spec = SweepSpec(args.pattern, _ints(args.n), _floats(args.frac), _ints(args.seeds) if args.seeds else [],
                     args.strategy.split(","), args.kind, None, args.jobs, args.timing, args.budget, pairs)
    rows = run_sweep(spec)
    if args.out:
        emit_report(rows, args.out)
    else:
        from .report import HEADER
        import csv
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(HEADER)
        for r in rows:
            w.writerow(r.cells())
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rainbowfactor", description="Rainbow F-factors in graph systems.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", choices=[k.value for k in InstanceKind if k is not InstanceKind.FROM_FILE],
                   default="random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--t", type=int, help="clique size (pattern clique:t)")
    g.add_argument("--k", type=int, help="uniformity (pattern edge:k)")
    g.add_argument("--pattern")
    g.add_argument("--delta", type=int, help="minimum degree target (random kind)")
    g.add_argument("--frac", type=float, help="minimum degree as a fraction of n")
    g.add_argument("--p-delete", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="search for a rainbow factor")
    s.add_argument("instance")
    s.add_argument("--pattern", required=True)
    s.add_argument("--strategy", choices=["absorption", "exact"], default="absorption")
    s.add_argument("--cover", choices=["greedy", "nibble", "lp_rounding"], default="greedy")
    s.add_argument("--seed", type=int)
    s.add_argument("--retries", type=int)
    s.add_argument("--budget", type=int, help="node budget for the exact search")
    s.add_argument("--config", help="file of key=value pipeline settings")
    s.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a proposed factor")
    v.add_argument("instance")
    v.add_argument("factor", help="JSON list of copies or solve output")
    v.add_argument("--pattern", required=True)
    v.set_defaults(func=cmd_verify)

    lp = sub.add_parser("lp", help="fractional matching / cover / PFM of a hypergraph file")
    lp.add_argument("hypergraph")
    lp.add_argument("--mode", choices=["matching", "cover", "pfm"], default="matching")
    lp.add_argument("--b", type=int, help="uniformity for pfm mode")
    lp.set_defaults(func=cmd_lp)

    a = sub.add_parser("absorbers", help="enumerate absorbers for a target set")
    a.add_argument("instance")
    a.add_argument("--pattern", required=True)
    a.add_argument("--target", required=True, help="v1,v2,...")
    a.add_argument("--colors", required=True, help="c1,c2,...")
    a.add_argument("--limit", type=int, default=10)
    a.set_defaults(func=cmd_absorbers)

    w = sub.add_parser("sweep", help="degree-threshold experiment grid")
    w.add_argument("--pattern", required=True)
    w.add_argument("--n", required=True, help="comma list, e.g. 6,9,12")
    w.add_argument("--frac", required=True, help="comma list of degree fractions")
    w.add_argument("--seeds", default="0-9", help="comma list or ranges, e.g. 0-9")
    w.add_argument("--strategy", default="exact", help="comma list of exact,absorption")
    w.add_argument("--kind", default="random", choices=["random", "extremal", "space", "complete"])
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--timing", action="store_true", help="fill the ms column (output no longer byte-stable)")
    w.add_argument("--budget", type=int)
    w.add_argument("--set", action="append", metavar="KEY=VALUE")
    w.add_argument("--out", help="CSV path; a .json mirror is written alongside")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    level = os.environ.get("RF_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(message)s")
    if level not in ("DEBUG", "INFO"):
        warnings.simplefilter("ignore")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL
    except (UsageError, FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
