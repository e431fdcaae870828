import json
import subprocess
import sys

import pytest

from lexjoin.cli import main

FIVE_TEXT = "Q(x1,x2,x3,x4,x5) :- R1(x1,x5), R2(x2,x4), R3(x3,x4), R4(x3,x5).\n"


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "q.jq").write_text("Q(x,y) :- R(x), S(y).\n")
    (tmp_path / "R.csv").write_text("1\n2\n")
    (tmp_path / "S.csv").write_text("1\n2\n")
    (tmp_path / "manifest.json").write_text(
        json.dumps(
            {
                "relations": {
                    "R": {"file": "R.csv", "types": ["int"]},
                    "S": {"file": "S.csv", "types": ["int"]},
                }
            }
        )
    )
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_five_variable_query(tmp_path, capsys):
    qfile = tmp_path / "five.jq"
    qfile.write_text(FIVE_TEXT)
    code, out, _ = run(capsys, "analyze", qfile, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert payload["iota"] == "3"
    assert payload["acyclic"] is True
    assert ["x1", "x3", "x5"] in payload["disruptive_trios"]
    bags = [sorted(b["variables"]) for b in payload["bags"]]
    assert ["x1", "x2", "x3"] in bags


def test_analyze_trio_free_iota_one(tmp_path, capsys):
    qfile = tmp_path / "path.jq"
    qfile.write_text("Q(a,b,c) :- R(a,b), S(b,c).\n")
    code, out, _ = run(capsys, "analyze", qfile, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["iota"] == "1"
    assert payload["disruptive_trios"] == []


def test_analyze_malformed_query_exit_2(tmp_path, capsys):
    qfile = tmp_path / "bad.jq"
    qfile.write_text("Q(x :- R(x).\n")
    code, _, err = run(capsys, "analyze", qfile)
    assert code == 2
    assert "error" in err


def test_build_access_pipeline(workdir, capsys):
    idx = workdir / "q.idx"
    code, out, _ = run(
        capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", idx
    )
    assert code == 0
    stats = json.loads(out)
    assert stats["schema"] == 1
    assert stats["count"] == "4"

    code, out, _ = run(capsys, "count", "-i", idx)
    assert code == 0 and out.strip() == "4"

    code, out, _ = run(capsys, "access", "-i", idx, "-j", "0")
    assert code == 0 and out.strip() == "1,1"

    code, out, _ = run(capsys, "enum", "-i", idx, "--from", "0", "--to", "4")
    assert code == 0
    assert out.splitlines() == ["1,1", "1,2", "2,1", "2,2"]

    code, out, _ = run(capsys, "rank", "-i", idx, "-t", "2,1")
    assert code == 0 and out.strip() == "2"

    code, out, _ = run(capsys, "quantile", "-i", idx, "-q", "1/2")
    assert code == 0 and out.strip() == "1,2"

    code, out, _ = run(capsys, "test", "-i", idx, "-t", "2,2")
    assert code == 0 and out.strip() == "true"

    code, out, _ = run(capsys, "test", "-i", idx, "-t", "2,9")
    assert code == 0 and out.strip() == "false"


def test_access_out_of_bounds_exit_3(workdir, capsys):
    idx = workdir / "q.idx"
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", idx)
    code, _, err = run(capsys, "access", "-i", idx, "-j", "4")
    assert code == 3
    assert "out of bounds" in err


def test_rank_not_an_answer_exit_3(workdir, capsys):
    idx = workdir / "q.idx"
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", idx)
    code, _, err = run(capsys, "rank", "-i", idx, "-t", "9,9")
    assert code == 3
    assert "not an answer" in err


def test_enum_matches_oracle(workdir, capsys):
    idx = workdir / "q.idx"
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", idx)
    code, enum_out, _ = run(capsys, "enum", "-i", idx, "--from", "0")
    assert code == 0
    code, oracle_out, _ = run(
        capsys, "oracle", "-q", workdir / "q.jq", "-m", workdir / "manifest.json"
    )
    assert code == 0
    assert enum_out == oracle_out


def test_sample_deterministic_under_seed(workdir, capsys):
    idx = workdir / "q.idx"
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", idx)
    code, first, _ = run(capsys, "sample", "-i", idx, "-n", "2", "--seed", "9")
    code2, second, _ = run(capsys, "sample", "-i", idx, "-n", "2", "--seed", "9")
    assert code == code2 == 0
    assert first == second
    assert len(first.splitlines()) == 2


def test_rebuild_byte_identical(workdir, capsys):
    a, b = workdir / "a.idx", workdir / "b.idx"
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", a)
    run(capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "manifest.json", "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_missing_manifest_exit_2(workdir, capsys):
    code, _, err = run(
        capsys, "build", "-q", workdir / "q.jq", "-m", workdir / "nope.json", "-o", workdir / "x.idx"
    )
    assert code == 2


@pytest.mark.parametrize("family", ["star", "setdisj", "zeroclique", "lw"])
def test_gen_families_deterministic(tmp_path, capsys, family):
    d1, d2 = tmp_path / "g1", tmp_path / "g2"
    args = ["gen", family, "--seed", "5", "--k", "2", "--per-relation", "12"]
    if family == "zeroclique":
        args += ["--parts", "3", "--part-size", "4", "--planted"]
    code, _, _ = run(capsys, *args, "-o", d1)
    assert code == 0
    code, _, _ = run(capsys, *args, "-o", d2)
    assert code == 0
    files1 = sorted(p.name for p in d1.iterdir())
    assert files1 == sorted(p.name for p in d2.iterdir())
    for name in files1:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    sidecar = json.loads((d1 / "gen.json").read_text())
    assert sidecar["schema"] == 1
    assert sidecar["seed"] == 5
    if family == "zeroclique":
        assert sidecar["planted_clique"] is not None


def test_gen_star_builds_and_counts(tmp_path, capsys):
    d = tmp_path / "star"
    code, _, _ = run(
        capsys, "gen", "star", "-o", d, "--seed", "3", "--k", "2",
        "--per-relation", "20", "--x-domain", "6", "--z-domain", "6",
    )
    assert code == 0
    idx = tmp_path / "star.idx"
    code, out, _ = run(capsys, "build", "-q", d / "query.jq", "-m", d / "manifest.json", "-o", idx)
    assert code == 0
    stats = json.loads(out)
    assert int(stats["count"]) > 0


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "lexjoin", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "analyze" in proc.stdout
