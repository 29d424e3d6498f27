"""Degree-threshold sweeps and their CSV/JSON reports."""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from math import comb
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .core import PatternF, default_rule
from .generators import InstanceKind, InstanceSpec
from .pipeline import PipelineConfig, find_rainbow_factor

HEADER = ["pattern", "n", "m", "frac", "seed", "strategy", "feasible", "leftover", "copies", "ms", "stage_stats"]


@dataclass(frozen=True)
class SweepRow:
    pattern: str
    n: int
    m: int
    frac: float
    seed: int
    strategy: str
    feasible: bool
    leftover: int | None
    copies: int
    ms: float | None
    stage_stats: str

    def cells(self) -> list[str]:
        return [self.pattern, str(self.n), str(self.m), repr(self.frac), str(self.seed), self.strategy,
                "1" if self.feasible else "0", "" if self.leftover is None else str(self.leftover),
                str(self.copies), "" if self.ms is None else f"{self.ms:.3f}", self.stage_stats]

    @classmethod
    def from_cells(cls, row: dict) -> "SweepRow":
        return cls(row["pattern"], int(row["n"]), int(row["m"]), float(row["frac"]), int(row["seed"]),
                   row["strategy"], row["feasible"] == "1",
                   int(row["leftover"]) if row["leftover"] != "" else None,
                   int(row["copies"]), float(row["ms"]) if row["ms"] != "" else None, row["stage_stats"])


@dataclass
class SweepSpec:
    pattern: str
    ns: list[int]
    fracs: list[float]
    seeds: list[int]
    strategies: list[str] = field(default_factory=lambda: ["exact"])
    kind: str = "random"
    out: str | None = None
    jobs: int = 1
    timing: bool = False
    budget: int | None = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        PatternF.parse(self.pattern)
        if not self.ns or not self.fracs:
            raise ValueError("sweep needs nonempty n and fraction ranges")
        if any(not 0 <= f <= 1 for f in self.fracs):
            raise ValueError("fractions must lie in [0, 1]")
        for s in self.strategies:
            if s not in ("exact", "absorption"):
                raise ValueError(f"unknown strategy {s!r}")
        if self.kind not in {k.value for k in InstanceKind} - {"file"}:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def target_degree(F: PatternF, n: int, frac: float) -> int:
    """Degree target for a fraction: of n for graphs, of the class size or C(n-d, k-d) otherwise."""
    if F.partite:
        top = n // F.b
        return min(top, math.ceil(frac * top))
    d = default_rule(F).d
    top = comb(n - d, F.k - d)
    return min(top, math.ceil(frac * (n if F.k == 2 else top)))


def _cell(args) -> SweepRow:
    spec, n, frac, seed, strategy = args
    F = PatternF.parse(spec.pattern)
    inst = InstanceSpec(InstanceKind(spec.kind), n, F, delta=target_degree(F, n, frac), seed=seed)
    sys = inst.build()
    cfg = PipelineConfig.from_pairs(spec.config, PipelineConfig(seed=seed))
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = find_rainbow_factor(sys, F, cfg, strategy=strategy, budget=spec.budget)
    ms = 1000 * (time.perf_counter() - t0)
    stats = {k: v for k, v in res.stats.items() if spec.timing or not k.startswith("ms")}
    stats["status"] = res.status
    leftover = res.stats.get("leftover")
    if res.status == "factor":
        leftover = 0 if strategy == "exact" else leftover
    copies = len(res.packing) if res.packing is not None else 0
    return SweepRow(spec.pattern, n, sys.m, frac, seed, strategy, res.status == "factor", leftover,
                    copies, round(ms, 3) if spec.timing else None,
                    json.dumps(stats, sort_keys=True, separators=(",", ":"), default=str))


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    cells = [(spec, n, frac, seed, strategy)
             for n in sorted(spec.ns) for frac in sorted(spec.fracs)
             for seed in sorted(spec.seeds) for strategy in spec.strategies]
    if spec.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_cell, cells))
    else:
        rows = [_cell(c) for c in cells]
    if spec.out:
        emit_report(rows, spec.out)
    return rows


def emit_report(rows: list[SweepRow], path) -> tuple[Path, Path]:
    """Write ``path`` as CSV and a JSON mirror next to it; rows sorted by (n, frac, seed)."""
    path = Path(path)
    rows = sorted(rows, key=lambda r: (r.n, r.frac, r.seed))
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADER)
            for r in rows:
                w.writerow(r.cells())
        mirror = path.with_suffix(".json")
        mirror.write_text(json.dumps([asdict(r) for r in rows], indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc.strerror or exc}") from exc
    return path, mirror


def parse_report(path) -> list[SweepRow]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != HEADER:
                raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
            return [SweepRow.from_cells(row) for row in reader]
    except OSError as exc:
        raise OSError(f"cannot read report {path}: {exc.strerror or exc}") from exc
