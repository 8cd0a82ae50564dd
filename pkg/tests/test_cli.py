import csv
import json
import subprocess
import sys

import pytest

from onlinecover.bench import CSV_COLUMNS, TrialConfig, format_csv, format_jsonl, run_trials
from onlinecover.cli import main
from onlinecover.instances import generate


@pytest.fixture
def instance_file(tmp_path):
    def make(kind, **kw):
        path = tmp_path / f"{kind}.json"
        assert main(["gen", "--kind", kind, "--out", str(path), *[f"--{k}={v}" for k, v in kw.items()]]) == 0
        return path

    return make


def test_gen_writes_instance(instance_file):
    path = instance_file("set-cover-stream", n=10, t=25, density=0.3, seed=0)
    d = json.loads(path.read_text())
    assert d["n"] == 10 and len(d["stream"]) == 25 and d["fmin"] == d["fmax"] == 1


def test_check_appendix_b(instance_file, capsys):
    path = instance_file("appendix-b")
    assert main(["check", "--instance", str(path), "--property", "3-increasing"]) == 1
    assert "A={a,b,y}, S={}" in capsys.readouterr().out


def test_check_appendix_a(instance_file, capsys):
    path = instance_file("appendix-a")
    assert main(["check", "--instance", str(path), "--property", "time-monotone"]) == 1
    assert "t=2, S={}" in capsys.readouterr().out


@pytest.mark.parametrize("prop", ["time-monotone", "submodular", "monotone"])
def test_check_prefix_coverage_passes(instance_file, prop):
    path = instance_file("prefix-coverage", n=8, t=10)
    assert main(["check", "--instance", str(path), "--property", prop]) == 0


def test_run_aborts_on_appendix_a(instance_file, capsys):
    path = instance_file("appendix-a")
    assert main(["run", "--instance", str(path), "--variant", "slow-explicit"]) == 1
    assert "t=2" in capsys.readouterr().err


def test_run_empty_stream(tmp_path):
    inst = tmp_path / "empty.json"
    inst.write_text(json.dumps({"n": 2, "costs": [1, 1], "fmin": 1, "fmax": 1, "stream": []}))
    log, summary = tmp_path / "log.jsonl", tmp_path / "s.csv"
    assert main(["run", "--instance", str(inst), "--log", str(log), "--summary", str(summary)]) == 0
    assert log.read_text() == ""


def test_run_outputs_and_schema(instance_file, tmp_path):
    path = instance_file("set-cover-stream", n=8, t=10)
    log, summary = tmp_path / "log.jsonl", tmp_path / "s.csv"
    assert main(["run", "--instance", str(path), "--seeds", "0,1", "--log", str(log), "--summary", str(summary)]) == 0
    records = [json.loads(line) for line in log.read_text().splitlines()]
    steps = [r for r in records if r["type"] == "step"]
    assert len(steps) == 20 and records[-1]["type"] == "summary"
    assert {"t", "seed", "cover", "cost", "opt_cost", "ratio", "rows", "violations"} <= set(steps[0])
    for row in (r for s in steps for r in s["rows"]):
        assert {"t", "anchor", "S", "b", "mass_delta"} <= set(row)
    with summary.open() as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 20
    assert all(float(r["ratio"]) >= 1 for r in rows)


def test_run_byte_identical(instance_file, tmp_path):
    path = instance_file("prefix-coverage", n=8, t=10, seed=2)
    outs = []
    for i in range(2):
        log, summary = tmp_path / f"l{i}.jsonl", tmp_path / f"s{i}.csv"
        main(["run", "--instance", str(path), "--seeds", "3,4", "--log", str(log), "--summary", str(summary)])
        outs.append((log.read_bytes(), summary.read_bytes()))
    assert outs[0] == outs[1]


def test_run_three_increasing_rejects_non_coverage(instance_file):
    path = instance_file("appendix-b")
    assert main(["run", "--instance", str(path), "--variant", "three-increasing"]) == 2


def test_opt(instance_file, capsys):
    path = instance_file("appendix-b")
    assert main(["opt", "--instance", str(path), "--at-time", "1"]) == 0
    out = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert out["cost"] == 2 and out["label"] == "{a,b}"


def test_bad_instance_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["check", "--instance", str(bad), "--property", "monotone"]) == 2


def test_bad_seeds():
    with pytest.raises(SystemExit):
        main(["run", "--instance", "x", "--seeds", "a,b"])


def test_module_entry_point(instance_file):
    path = instance_file("appendix-b")
    proc = subprocess.run(
        [sys.executable, "-m", "onlinecover", "check", "--instance", str(path), "--property", "submodular"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "pass" in proc.stdout


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(seeds=())
    with pytest.raises(ValueError):
        TrialConfig(eps=0)
    with pytest.raises(ValueError):
        TrialConfig(variant="fast")


def test_formats_use_twelve_digits():
    inst = generate("prefix-coverage", n=6, T=4, seed=0)
    cfg = TrialConfig(seeds=(0,))
    trials = run_trials(inst, cfg)
    text = format_jsonl(trials, cfg) + format_csv(trials)
    for token in text.replace(",", " ").replace(":", " ").replace("}", " ").split():
        if "." in token and token.replace(".", "").replace("-", "").isdigit():
            assert len(token.replace("-", "").replace(".", "").lstrip("0")) <= 12
