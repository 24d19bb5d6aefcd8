import csv
import json
import subprocess
import sys

import pytest

from asymsched.cli import BENCH_COLUMNS, GeneratorSpec, generate, main
from asymsched.schedule import load_schedule, validate
from asymsched.taskmodel import instance_from_json, load_instance


def write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def example(tmp_path):
    return write(tmp_path / "ex.json", {"n": 10, "edges": [], "speeds": ["4", "1", "1"],
                                        "chains": [[0, 1, 2], [3, 4, 5], [6, 7], [8, 9]]})


def test_generators_validate_and_repeat():
    for spec in (
        GeneratorSpec("chains", n=9, r=3, seed=1, speeds=("3", "1")),
        GeneratorSpec("layered-dag", widths=(2, 3, 2), seed=2),
        GeneratorSpec("random-dag", n=8, p=0.4, seed=3, speeds=("5/2", "1", "1")),
    ):
        data = generate(spec)
        inst = instance_from_json(data)
        assert inst.n == data["n"]
        assert generate(spec) == data


def test_gen_rejects_bad_split(tmp_path, capsys):
    assert main(["gen", "--kind", "chains", "--n", "2", "--r", "3", "--out", str(tmp_path / "x.json")]) == 2


@pytest.mark.parametrize("algo", ["remnants", "lp-round", "list", "oracle"])
def test_solve_round_trip(algo, example, tmp_path, capsys):
    out = tmp_path / f"{algo}.json"
    assert main(["solve", example, "--algo", algo, "--trials", "20", "--out", str(out), "--report", "--no-timing"]) == 0
    report = json.loads(capsys.readouterr().out)
    inst = load_instance(example)
    sched = load_schedule(inst, out)
    validate(sched)
    assert report["makespan"] == str(max(s.end for s in sched.segments))
    assert report["instance"] == inst.digest()
    assert main(["validate", example, str(out)]) == 0


def test_example_makespan_via_cli(example, capsys):
    assert main(["solve", example, "--algo", "remnants", "--no-timing"]) == 0
    assert json.loads(capsys.readouterr().out)["makespan"] == "2"


def test_trace_and_trials_csv(example, tmp_path):
    trace = tmp_path / "trace.json"
    main(["solve", example, "--algo", "remnants", "--trace", str(trace), "--out", str(tmp_path / "s.json")])
    assert json.loads(trace.read_text())[0]["round"] == 1
    rows = tmp_path / "trials.csv"
    main(["solve", example, "--algo", "lp-round", "--trials", "7", "--seed", "4",
          "--trials-csv", str(rows), "--out", str(tmp_path / "l.json")])
    parsed = list(csv.reader(rows.read_text().splitlines()))
    assert parsed[0] == ["trial", "makespan", "n_s", "C", "D_s", "D_1"]
    assert len(parsed) == 8
    assert all("." not in cell for row in parsed[1:] for cell in row)


def test_validate_reports_failure(example, tmp_path, capsys):
    bad = write(tmp_path / "bad.json", {"segments": [{"task": 0, "machine": 0, "start": "0", "end": "1/4"}]})
    assert main(["validate", example, bad]) == 1
    assert "invalid" in capsys.readouterr().out


def test_usage_errors(tmp_path, example):
    with pytest.raises(SystemExit) as info:
        main(["solve", example, "--algo", "nope"])
    assert info.value.code == 2
    cyclic = write(tmp_path / "cyc.json", {"n": 2, "edges": [[0, 1], [1, 0]], "speeds": ["2", "1"]})
    assert main(["bounds", cyclic]) == 2
    floats = write(tmp_path / "f.json", {"n": 1, "edges": [], "speeds": ["1.5"]})
    assert main(["bounds", floats]) == 2
    assert main(["bounds", str(tmp_path / "missing.json")]) == 2


def test_size_guard_exit_code(tmp_path):
    big = write(tmp_path / "big.json", {"n": 20, "edges": [], "speeds": ["2", "1"]})
    assert main(["solve", big, "--algo", "oracle"]) == 3


def test_precondition_failure_exit_code(tmp_path):
    three = write(tmp_path / "k3.json", {"n": 3, "edges": [], "speeds": ["3", "2", "1"]})
    assert main(["solve", three, "--algo", "remnants"]) == 1


def test_bounds_output(example, capsys):
    assert main(["bounds", example, "--format", "both"]) == 0
    out = capsys.readouterr().out
    data = json.loads(out[: out.index("}") + 1])
    assert data["A"] == "5/3" and data["max_lower"] == "5/3"
    assert "B_paper_two_speed  8/5" in out
    main(["bounds", example, "--format", "json", "--float"])
    assert json.loads(capsys.readouterr().out)["A"] == repr(5 / 3)


def test_optimize_energy(tmp_path, capsys):
    inst = write(tmp_path / "two.json", {"n": 2, "edges": [], "speeds": ["2", "1"]})
    sched = write(tmp_path / "s.json", {"segments": [
        {"task": 0, "machine": 0, "start": "0", "end": "1/2"},
        {"task": 1, "machine": 0, "start": "1/2", "end": "1"},
    ]})
    out = tmp_path / "o.json"
    assert main(["optimize-energy", inst, sched, "--alpha", "2", "--out", str(out), "--report"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert (rep["energy_before"], rep["energy_after"], rep["makespan_after"]) == ("4", "3", "1")
    assert main(["validate", inst, str(out)]) == 0


def test_transform_sym(tmp_path, capsys):
    inst = write(tmp_path / "sym.json", {"n": 1, "edges": [], "speeds": ["1", "1"]})
    target = write(tmp_path / "t.json", ["3/2", "1/2"])
    assert main(["transform-sym", inst, "--target", target]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep == {"asymmetric_makespan": "2/3", "symmetric_makespan": "1"}
    bad = write(tmp_path / "t2.json", ["3", "1"])
    assert main(["transform-sym", inst, "--target", bad]) == 1


def test_bench_is_byte_stable(tmp_path, example):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "b.json").write_text(open(example).read())
    (corpus / "a.json").write_text("{broken")
    write(corpus / "c.json", {"n": 3, "edges": [], "speeds": ["3", "2", "1"]})
    outs = []
    for k in range(2):
        out = tmp_path / f"bench{k}.csv"
        assert main(["bench", str(corpus), "--algos", "remnants,lp-round,oracle", "--trials", "15",
                     "--no-timing", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(outs[0].decode().splitlines()))
    assert list(rows[0].keys()) == BENCH_COLUMNS
    assert [r["instance"] for r in rows] == ["a.json", "b.json", "b.json", "b.json", "c.json", "c.json", "c.json"]
    assert rows[0]["error"].startswith("JSONDecodeError")
    assert rows[1]["makespan"] == "2" and rows[1]["ratio_oracle"] == "1"
    assert rows[4]["error"].startswith("NotTwoSpeed") and rows[6]["error"] == ""


def test_solve_is_deterministic(example, tmp_path):
    blobs = []
    for k in range(2):
        out, trials = tmp_path / f"s{k}.json", tmp_path / f"t{k}.csv"
        main(["solve", example, "--algo", "lp-round", "--seed", "11", "--trials", "25", "--a2",
              "--out", str(out), "--trials-csv", str(trials)])
        blobs.append((out.read_bytes(), trials.read_bytes()))
    assert blobs[0] == blobs[1]


def test_console_entry_point(example):
    proc = subprocess.run([sys.executable, "-m", "asymsched.cli", "bounds", example],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("A ")
