import csv
import json

import pytest

from rainbowfactor.cli import main
from rainbowfactor.core import PatternF
from rainbowfactor.io import read_system
from rainbowfactor.report import SweepRow, SweepSpec, emit_report, parse_report, run_sweep, target_degree


@pytest.fixture
def instance(tmp_path):
    path = tmp_path / "inst.txt"
    assert main(["gen", "--kind", "complete", "--n", "9", "--t", "3", "--out", str(path)]) == 0
    return path


def test_gen_writes_a_system(instance):
    s = read_system(instance)
    assert (s.n, s.m) == (9, 9)


def test_gen_random_with_fraction(tmp_path):
    path = tmp_path / "r.txt"
    assert main(["gen", "--n", "9", "--t", "3", "--frac", "0.8", "--seed", "2", "--out", str(path)]) == 0
    assert read_system(path).m == 9
    assert main(["gen", "--n", "9"]) == 2


def test_solve_and_verify(instance, tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert main(["solve", str(instance), "--pattern", "clique:3", "--seed", "1", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["status"] == "factor" and "total_ms" in data["timings"]
    assert main(["verify", str(instance), str(out), "--pattern", "clique:3"]) == 0
    assert "valid rainbow clique:3-factor with 3 copies" in capsys.readouterr().out


def test_verify_rejects_bad_factor(instance, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"vertices": [0, 1, 2], "edges": [], "colors": [0, 1, 2]}]))
    assert main(["verify", str(instance), str(bad), "--pattern", "clique:3"]) == 1
    assert "invalid" in capsys.readouterr().out


def test_solve_exact_infeasible(tmp_path):
    path = tmp_path / "x.txt"
    assert main(["gen", "--kind", "extremal", "--n", "6", "--t", "3", "--out", str(path)]) == 0
    assert main(["solve", str(path), "--pattern", "clique:3", "--strategy", "exact", "--out",
                 str(tmp_path / "o.json")]) == 1


def test_solve_with_settings(instance, tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("gamma1 = 0.2\n")
    assert main(["solve", str(instance), "--pattern", "clique:3", "--config", str(cfg), "--set", "phi=0.2",
                 "--retries", "2", "--out", str(tmp_path / "o.json")]) == 0
    assert main(["solve", str(instance), "--pattern", "clique:3", "--set", "phi"]) == 2
    assert main(["solve", str(instance), "--pattern", "clique:3", "--set", "bogus=1"]) == 2


def test_lp_modes(tmp_path, capsys):
    h = tmp_path / "h.txt"
    h.write_text("hypergraph 3\n0 1\n1 2\n")
    assert main(["lp", str(h), "--mode", "matching"]) == 0
    assert capsys.readouterr().out.startswith("value,1\n")
    assert main(["lp", str(h), "--mode", "cover"]) == 0
    assert "1,1" in capsys.readouterr().out
    assert main(["lp", str(h), "--mode", "pfm"]) == 1
    assert "vertex,certificate\n0,-1/2\n1,1/2\n2,-1/2" in capsys.readouterr().out
    c4 = tmp_path / "c4.txt"
    c4.write_text("hypergraph 4\n0 1\n1 2\n2 3\n0 3\n")
    assert main(["lp", str(c4), "--mode", "pfm"]) == 0


def test_absorbers_command(tmp_path, capsys):
    path = tmp_path / "k5.txt"
    assert main(["gen", "--kind", "complete", "--n", "6", "--k", "2", "--out", str(path)]) == 0
    assert main(["absorbers", str(path), "--pattern", "edge:2", "--target", "0,1", "--colors", "0,1",
                 "--limit", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and json.loads(lines[0])["B"] == [0, 1]


def test_exit_codes(tmp_path):
    assert main(["solve", str(tmp_path / "missing.txt"), "--pattern", "clique:3"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["solve", str(tmp_path / "missing.txt"), "--pattern", "blob:3"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2 1\ncolor 0\n0 9 +\n")
    assert main(["solve", str(bad), "--pattern", "clique:3"]) == 2


def test_sweep_to_stdout(capsys):
    assert main(["sweep", "--pattern", "clique:3", "--n", "6", "--frac", "0.5,1", "--seeds", "0-1"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 4 and {r["ms"] for r in rows} == {""}
    assert [r["feasible"] for r in rows if r["frac"] == "1.0"] == ["1", "1"]


# ---------------------------------------------------------------- report

def row(n=6, frac=0.5, seed=0, **kw):
    base = dict(pattern="clique:3", n=n, m=n, frac=frac, seed=seed, strategy="exact", feasible=True,
                leftover=0, copies=n // 3, ms=None, stage_stats="{}")
    base.update(kw)
    return SweepRow(**base)


def test_report_empty(tmp_path):
    path, mirror = emit_report([], tmp_path / "r.csv")
    assert path.read_text().strip() == ",".join(["pattern", "n", "m", "frac", "seed", "strategy", "feasible",
                                                 "leftover", "copies", "ms", "stage_stats"])
    assert json.loads(mirror.read_text()) == []
    assert parse_report(path) == []


def test_report_round_trip(tmp_path):
    r = row(ms=1.5, leftover=None, feasible=False, stage_stats='{"a":1}')
    path, _ = emit_report([r], tmp_path / "r.csv")
    assert parse_report(path) == [r]


def test_report_ordering(tmp_path):
    rows = [row(n=n, frac=f, seed=s) for s in range(50) for f in (0.9, 0.5) for n in (12, 6)] * 50
    path, _ = emit_report(rows, tmp_path / "big.csv")
    back = parse_report(path)
    assert len(back) == 10_000
    keys = [(r.n, r.frac, r.seed) for r in back]
    assert keys == sorted(keys)
    assert path.read_bytes() == emit_report(list(reversed(rows)), tmp_path / "big2.csv")[0].read_bytes()


def test_report_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n")
    with pytest.raises(ValueError):
        parse_report(p)


def test_sweep_empty_seeds(tmp_path):
    rows = run_sweep(SweepSpec("clique:3", [6], [0.5], [], out=str(tmp_path / "e.csv")))
    assert rows == [] and parse_report(tmp_path / "e.csv") == []


def test_sweep_extremal_never_feasible():
    rows = run_sweep(SweepSpec("clique:3", [6, 9], [0.6], [0, 1], kind="extremal"))
    assert rows and not any(r.feasible for r in rows)


def test_sweep_validation():
    with pytest.raises(ValueError):
        SweepSpec("clique:3", [], [0.5], [0])
    with pytest.raises(ValueError):
        SweepSpec("clique:3", [6], [1.5], [0])
    with pytest.raises(ValueError):
        SweepSpec("clique:3", [6], [0.5], [0], strategies=["magic"])


def test_target_degree():
    assert target_degree(PatternF.clique(3), 9, 2 / 3) == 6
    assert target_degree(PatternF.clique(3), 9, 1.0) == 8
    assert target_degree(PatternF.single_edge(3), 6, 0.5) == 5
    assert target_degree(PatternF.partite_clique(3), 9, 1.0) == 3


def test_sweep_high_fraction_mostly_feasible():
    rows = run_sweep(SweepSpec("clique:3", [6, 9, 12], [0.75], list(range(20))))
    for n in (6, 9, 12):
        cell = [r.feasible for r in rows if r.n == n]
        assert sum(cell) >= 0.95 * len(cell)
