from __future__ import annotations

import json

import pytest

from cpccodes import cli, model

RANGE = "563700000:563800000"


def run(*argv):
    return cli.main(["-q", *argv])


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("run")
    assert run("pipeline", "--range", RANGE, "--out", str(d)) == 0
    return d


def test_empty_range_succeeds(tmp_path):
    out = tmp_path / "codes.jsonl"
    summary = tmp_path / "s.json"
    assert run("search", "--range", "0:0", "--out", str(out), "--summary", str(summary)) == 0
    assert out.read_text() == ""
    s = json.loads(summary.read_text())
    assert s["total_checked"] == 0 and s["valid_count"] == 0 and s["class_count"] == 0


def test_search_outputs(tmp_path):
    out, summary, hist = tmp_path / "c.jsonl", tmp_path / "s.json", tmp_path / "h.csv"
    assert run("search", "--range", RANGE, "--out", str(out), "--summary", str(summary), "--hist", str(hist)) == 0
    lines = out.read_text().splitlines()
    s = json.loads(summary.read_text())
    assert s["valid_count"] == len(lines) > 0
    assert set(s) >= {"total_checked", "valid_count", "min", "median", "class_count"}
    assert hist.read_text().startswith("bin,count\n")
    for line in lines[:50]:
        rec = json.loads(line)
        t = model.from_json(rec["code"])
        assert model.is_valid_code(t) and model.to_index(t) == rec["index"]


def test_stage_commands_match_pipeline(tmp_path, pipeline_dir):
    codes = pipeline_dir / "codes.jsonl"
    routed, lowered, simp = tmp_path / "r.jsonl", tmp_path / "l.jsonl", tmp_path / "s.jsonl"
    assert run("route", "--input", str(codes), "--out", str(routed)) == 0
    assert run("lower", "--input", str(routed), "--out", str(lowered), "--circuits", str(tmp_path / "g.jsonl")) == 0
    assert run("simplify", "--input", str(lowered), "--out", str(simp)) == 0
    assert simp.read_text() == (pipeline_dir / "compiled.jsonl").read_text()
    first = json.loads((tmp_path / "g.jsonl").read_text().splitlines()[0])
    assert all(g["kind"] in ("SP", "SWAP", "H", "P", "PDAG", "Z", "X") for g in first["seq"]["gates"])


def test_verify_and_canon(tmp_path, pipeline_dir):
    assert run("verify", "--input", str(pipeline_dir / "compiled.jsonl"), "--out", str(tmp_path / "v.json")) == 0
    assert json.loads((tmp_path / "v.json").read_text())["invalid"] == 0
    assert run("canon", "--input", str(pipeline_dir / "codes.jsonl"), "--out", str(tmp_path / "k.jsonl")) == 0
    assert (tmp_path / "k.jsonl").read_text() == (pipeline_dir / "codes.jsonl").read_text()


def test_verify_flags_invalid_records(tmp_path):
    bad = tmp_path / "bad.jsonl"
    rec = {"code": model.to_json(model.AdjacencyTriple.zeros(3, 4)), "index": 0, "cpc_count": 0}
    bad.write_text(json.dumps(rec) + "\n")
    assert run("verify", "--input", str(bad), "--out", str(tmp_path / "v.json")) == cli.EXIT_DATA


def test_malformed_lines_are_counted(tmp_path, pipeline_dir, caplog):
    src = (pipeline_dir / "codes.jsonl").read_text().splitlines()
    f = tmp_path / "mixed.jsonl"
    f.write_text("\n".join(src[:3] + ["{not json", '{"code": 5}'] + src[3:6]) + "\n")
    with caplog.at_level("WARNING"):
        assert run("verify", "--input", str(f), "--out", str(tmp_path / "v.json")) == 0
    v = json.loads((tmp_path / "v.json").read_text())
    assert v["records"] == 6 and v["malformed_lines"] == 2
    assert any(":4:" in r.getMessage() for r in caplog.records)


def test_report_unit_weights_follow_l_order(tmp_path, pipeline_dir):
    d = tmp_path / "rep"
    assert run("report", "--input", str(pipeline_dir / "compiled.jsonl"), "--weights", "1,1,1", "--out", str(d)) == 0
    rep = json.loads((d / "report.json").read_text())
    recs = [json.loads(x) for x in (pipeline_dir / "compiled.jsonl").read_text().splitlines()]
    assert rep["optimum"]["r_weighted"] == rep["optimum"]["l_total"] == min(r["l_total"] for r in recs)
    assert (d / "hist_l_total.csv").exists() and (d / "hist_two_qubit_count.csv").exists()


def test_pipeline_finds_the_optimum(pipeline_dir):
    rep = json.loads((pipeline_dir / "report.json").read_text())
    o = rep["optimum"]
    assert (o["cpc_count"], o["swap_count"], o["local_count"], o["l_total"]) == (14, 13, 7, 34)


def test_thread_count_does_not_change_output(tmp_path, pipeline_dir):
    d = tmp_path / "t2"
    assert run("pipeline", "--range", RANGE, "--threads", "2", "--out", str(d)) == 0
    for name in ("codes.jsonl", "compiled.jsonl", "report.json"):
        assert (d / name).read_bytes() == (pipeline_dir / name).read_bytes()


def test_gzip_round_trip(tmp_path, pipeline_dir):
    gz = tmp_path / "codes.jsonl.gz"
    assert run("route", "--input", str(pipeline_dir / "codes.jsonl"), "--out", str(gz)) == 0
    assert run("verify", "--input", str(gz), "--out", str(tmp_path / "v.json")) == 0


def test_stats_histogram(tmp_path, pipeline_dir):
    out = tmp_path / "h.csv"
    assert run("stats", "--input", str(pipeline_dir / "compiled.jsonl"), "--metric", "local_count", "--out", str(out)) == 0
    assert out.read_text().startswith("bin,count\n7,")
    # an unpopulated metric is a data error
    assert run("stats", "--input", str(pipeline_dir / "codes.jsonl"), "--metric", "l_total") == cli.EXIT_DATA


def test_simulate_csv(tmp_path):
    out = tmp_path / "sim.csv"
    assert run("simulate", "--p", "0.001,0.002", "--exact-weight", "2", "--out", str(out)) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "p,raw,postselected,yield" and len(rows) == 3
    a, b = (list(map(float, r.split(","))) for r in rows[1:])
    assert b[2] / a[2] == pytest.approx(4, rel=0.2)
    assert run("simulate", "--px", "0.01", "--pz", "0.01", "--shots", "1000", "--seed", "1") == 0


def test_faultscan(tmp_path, capsys):
    assert run("faultscan", "--circuit", "hardened422") == 0
    assert json.loads(capsys.readouterr().out)["violations"] == 0
    assert run("faultscan", "--circuit", "crosscheckless422") == 0
    assert json.loads(capsys.readouterr().out)["violations"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["search", "--range", "5:1"],
        ["search", "--range", "x"],
        ["search", "--n", "3", "--k", "3"],
        ["route", "--input", "missing-flag-value", "--layout", "0,0,1"],
        ["simulate", "--px", "0.1"],
        ["simulate", "--p", "0.1", "--shots", "10", "--exact-weight", "1"],
        ["faultscan", "--circuit", "nope"],
        ["pipeline", "--threads", "0"],
    ],
)
def test_config_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "missing-flag-value").write_text(
        json.dumps({"code": model.to_json(model.from_index(563768403, 3, 4)), "index": 563768403, "cpc_count": 14}) + "\n"
    )
    assert run(*argv) == cli.EXIT_CONFIG


def test_missing_input_is_a_data_error(tmp_path):
    assert run("route", "--input", str(tmp_path / "nope.jsonl")) == cli.EXIT_DATA
    assert run("simulate", "--code", str(tmp_path / "nope.json"), "--p", "0.1", "--shots", "5") == cli.EXIT_DATA
