import csv
import json

import pytest

from ucqenum.cli import CHECK_FAILED, INPUT_ERROR, NOT_TRACTABLE, OK, main
from ucqenum.engine import load_database, write_database
from ucqenum.golden import GOLDEN


def query_file(tmp_path, name):
    p = tmp_path / f"{name}.ucq"
    p.write_text(GOLDEN[name][0])
    return str(p)


@pytest.fixture
def intro(tmp_path):
    q = query_file(tmp_path, "intro")
    m = write_database({"R1": {("1", "2")}, "R2": {("2", "3")}, "R3": {("3", "4")}}, tmp_path / "db")
    return q, str(m)


def test_classify_intro(tmp_path, capsys):
    assert main(["classify", query_file(tmp_path, "intro")]) == OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "Tractable"
    assert doc["certificate"]["extensions"][0]["virtual_atoms"][0]["vars"] == ["x", "z", "y"]


def test_classify_matmul(tmp_path, capsys):
    assert main(["classify", query_file(tmp_path, "body-iso-matmul")]) == OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "Intractable" and doc["hypothesis"] == "mat-mul"


def test_classify_separated(tmp_path, capsys):
    main(["classify", query_file(tmp_path, "separated")])
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "Unknown" and doc["notes"]


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.ucq"
    p.write_text("Q(x) <- R(x,")
    assert main(["classify", str(p)]) == INPUT_ERROR
    assert "error" in capsys.readouterr().err


def test_missing_file_exit(tmp_path):
    assert main(["classify", str(tmp_path / "nope.ucq")]) == INPUT_ERROR


def test_enumerate_intro(intro, capsys):
    assert main(["enumerate", *intro]) == OK
    lines = capsys.readouterr().out.splitlines()
    assert sorted(json.loads(x) for x in lines) == [["1", "2", "3"], ["1", "3", "4"]]


def test_enumerate_limit_and_stats(intro, capsys):
    assert main(["enumerate", *intro, "--limit", "1", "--stats"]) == OK
    out = capsys.readouterr()
    assert len(out.out.splitlines()) == 1
    stats = json.loads(out.err)
    assert "preprocessing_steps" in stats and "max_delay_steps" in stats


def test_enumerate_not_tractable(tmp_path, capsys):
    q = query_file(tmp_path, "body-iso-matmul")
    m = write_database({f"R{i}": {("1", "2")} for i in range(1, 5)}, tmp_path / "db")
    assert main(["enumerate", q, str(m)]) == NOT_TRACTABLE
    assert json.loads(capsys.readouterr().err)["kind"] == "Intractable"


def test_enumerate_schema_error(tmp_path):
    q = query_file(tmp_path, "intro")
    m = write_database({"R1": {("1", "2")}}, tmp_path / "db")
    assert main(["enumerate", q, str(m)]) == INPUT_ERROR


def test_check_ok_and_fault(intro, capsys):
    assert main(["check", *intro]) == OK
    assert main(["check", *intro, "--inject-fault"]) == CHECK_FAILED
    assert "missing" in capsys.readouterr().out


def test_check_seed_sweep(tmp_path, capsys):
    q = query_file(tmp_path, "yellow")
    for seed in range(20):
        d = tmp_path / f"g{seed}"
        assert main(["gadget", "random", "--query", q, "--size", "6", "--seed", str(seed), "--out", str(d)]) == OK
        assert main(["check", q, str(d / "manifest.json")]) == OK


def test_gadget_matmul(tmp_path, capsys):
    out = tmp_path / "mm"
    assert main(["gadget", "matmul", "--size", "3", "--out", str(out)]) == OK
    assert len(list(out.glob("*.csv"))) == 3
    db = load_database(out / "manifest.json")
    assert set(db.relations) == {"R1", "R2", "R3"}


def test_gadget_unknown_kind(tmp_path):
    assert main(["gadget", "nope", "--out", str(tmp_path)]) == INPUT_ERROR


def test_gadget_deterministic(tmp_path):
    for d in ("a", "b"):
        main(["gadget", "triangle-list", "--size", "6", "--seed", "4", "--out", str(tmp_path / d)])
    assert (tmp_path / "a" / "R1.csv").read_text() == (tmp_path / "b" / "R1.csv").read_text()


def test_bench_csv(tmp_path):
    q = query_file(tmp_path, "intro")
    out = tmp_path / "bench.csv"
    assert main(["bench", q, "--sizes", "50,200", "--brute-force", "50", "--out", str(out)]) == OK
    rows = list(csv.DictReader(out.open()))
    assert [r["method"] for r in rows] == ["engine", "brute-force", "engine"]
    assert all(int(r["answers"]) > 0 for r in rows)
