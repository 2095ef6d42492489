import csv
import json
import os
import subprocess
import sys

import pytest

from darp.bench import (
    VariantSpec,
    aggregate,
    checkpoint_times,
    emit_reports,
    instance_paths,
    median_cost,
    run_experiment,
)
from darp.cli import main
from darp.instance_io import BKS_ENV_VAR, BksRegistry, canonical_name, write_instance
from darp.instgen import GenParams, generate


@pytest.fixture
def inst_dir(tmp_path):
    d = tmp_path / "inst"
    d.mkdir()
    for k, seed in enumerate((1, 2), start=1):
        inst = generate(5, 2, seed, GenParams(window_open_max=300))
        write_instance(inst, d / f"pr0{k}.txt")
    return d


def test_variant_spec_parsing():
    assert VariantSpec.parse("TS32+ch+tw") == VariantSpec("ts32", True, True)
    assert VariantSpec.parse("its").label == "ITS"
    assert VariantSpec.parse("ts21+ch").label == "TS_21(CH)"
    with pytest.raises(ValueError):
        VariantSpec.parse("ts32+xx")
    with pytest.raises(ValueError):
        VariantSpec.parse("ts99")


def test_median_treats_missing_as_worst():
    assert median_cost([3.0, None, 1.0]) == 3.0
    assert median_cost([None, None, 1.0]) is None
    assert median_cost([]) is None


def test_checkpoint_times():
    assert checkpoint_times(10) == [1.0, 2.0, 5.0]
    assert checkpoint_times(0.5) == [0.5]
    assert checkpoint_times(60) == [1.0, 2.0, 5.0, 15.0, 30.0, 60.0]


def test_canonical_names():
    assert canonical_name("pr01") == "R1a"
    assert canonical_name("pr20.txt") == "R10b"
    assert canonical_name("r3A") == "R3a"
    assert canonical_name("mine") == "mine"


def test_instance_paths(inst_dir):
    (inst_dir / "notes.md").write_text("x")
    assert [p.name for p in instance_paths(inst_dir)] == ["pr01.txt", "pr02.txt"]
    with pytest.raises(FileNotFoundError):
        instance_paths(inst_dir / "missing")


def test_experiment_and_reports(inst_dir, tmp_path):
    paths = instance_paths(inst_dir)
    reports = run_experiment(paths, ["ts32", "its"], 2, 0.2, seeds=5, clock="work")
    assert [(r.instance, r.variant, r.seed) for r in reports][:3] == [
        ("R1a", "TS_32", 5), ("R1a", "TS_32", 6), ("R1a", "ITS", 5)]
    assert reports[0].bks == 190.02
    rows = aggregate(reports)
    assert len(rows) == 4 and all(r.runs == 2 for r in rows)

    written = emit_reports(reports, tmp_path / "out", {"k": 1})
    assert set(written) == {"traces", "checkpoints", "first_feasible", "runs", "summary"}
    assert len(list((tmp_path / "out" / "traces").iterdir())) == 8
    with open(written["checkpoints"]) as fh:
        table = list(csv.reader(fh))
    assert table[0] == ["instance", "variant", "bks", "runs", "cost@0.2s", "gap@0.2s"]
    for row in table[1:]:
        assert row[4] == "-" or float(row[4]) > 0
    summary = json.loads(written["summary"].read_text())
    assert summary["runs"] == 8 and summary["seeds"] == [5, 6]


def test_empty_reports_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit_reports([], tmp_path)


def test_parallel_matches_serial(inst_dir):
    paths = instance_paths(inst_dir)
    a = run_experiment(paths, ["ts22"], 2, 0.1, clock="work")
    b = run_experiment(paths, ["ts22"], 2, 0.1, clock="work", workers=2)
    assert [(r.instance, r.seed, r.trace) for r in a] == [(r.instance, r.seed, r.trace) for r in b]


def _read_all(d):
    return {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_bench_reruns_are_byte_identical(inst_dir, tmp_path, capsys):
    args = ["bench", "--instances", str(inst_dir), "--variants", "ts32,its", "--replicates", "2",
            "--time-limit", "0.2", "--seeds", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert _read_all(tmp_path / "a") == _read_all(tmp_path / "b")


def test_registry_env_override(tmp_path, monkeypatch):
    f = tmp_path / "bks.txt"
    f.write_text("# custom\nR1a 100.5\nmine 42\n")
    monkeypatch.setenv(BKS_ENV_VAR, str(f))
    reg = BksRegistry.load()
    assert reg.get("pr01") == 100.5 and reg.get("mine") == 42.0 and reg.get("R2a") == 301.34
    monkeypatch.delenv(BKS_ENV_VAR)
    assert BksRegistry.load().get("R1a") == 190.02


def test_gen_solve_oracle(tmp_path, capsys):
    out = tmp_path / "tiny.txt"
    assert main(["gen", "--n", "3", "--m", "2", "--seed", "4", "--out", str(out), "--window-open-max", "300"]) == 0
    assert out.exists()
    assert main(["oracle", "--instance", str(out)]) == 0
    text = capsys.readouterr().out
    assert "optimum=" in text or "infeasible" in text
    assert main(["solve", "--instance", str(out), "--variant", "ITS", "--time-limit", "0.2",
                 "--clock", "work", "--json"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["variant"] == "ITS" and res["seed"] == 0
    if res["feasible"]:
        assert sorted(v for r in res["routes"] for v in r) == list(range(1, 7))


def test_solve_with_toggles(tmp_path, capsys):
    out = tmp_path / "tiny.txt"
    write_instance(generate(4, 2, 1), out)
    assert main(["solve", "--instance", str(out), "--variant", "ts11", "--ch", "--tw",
                 "--time-limit", "0.1", "--clock", "work"]) == 0
    assert "TS_11(CH+TW)" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["solve", "--instance", "/nonexistent.txt", "--variant", "its"],
    ["oracle", "--instance", "/nonexistent.txt"],
    ["gen", "--n", "-1", "--m", "2", "--seed", "0", "--out", "/tmp/x.txt"],
])
def test_error_exit_codes(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_oracle_refuses_large(tmp_path, capsys):
    out = tmp_path / "big.txt"
    write_instance(generate(8, 2, 0), out)
    assert main(["oracle", "--instance", str(out)]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_instance_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1 480 6 90\n0 0 0 0 0 0 1440\nnonsense\n")
    assert main(["solve", "--instance", str(bad), "--variant", "its"]) == 2
    assert "line" in capsys.readouterr().err


def test_argparse_rejects_bad_values():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--instance", "x", "--variant", "ts41"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        main(["solve", "--instance", "x", "--variant", "its", "--time-limit", "-1"])


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "g.txt"
    env = dict(os.environ, PYTHONPATH=os.pathsep.join(sys.path))
    proc = subprocess.run([sys.executable, "-m", "darp.cli", "gen", "--n", "2", "--m", "1", "--seed", "1",
                           "--out", str(out)], capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "darp.cli", "bench", "--instances", str(tmp_path / "none"),
                           "--variants", "its", "--out", str(tmp_path / "o")],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 2 and "error:" in proc.stderr
