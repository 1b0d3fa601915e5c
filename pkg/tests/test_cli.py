import csv
import io
import json

import pytest
from click.testing import CliRunner

from trasdim.cli import EXIT_USAGE, cli, main
from trasdim.covers import ColoredCover, validate_cover
from trasdim.spaces import WindowSpec, make_window


def run(args, **kw):
    return CliRunner().invoke(cli, args, **kw)


def test_decide_exit_codes(tmp_path):
    base = ["decide", "--space", "zn", "--side", "4"]
    sat = run(base + ["--radii", "3", "--diam", "8"])
    assert sat.exit_code == 0
    doc = json.loads(sat.output)
    assert doc["certificate"]["verdict"] == "SAT"
    W = make_window(WindowSpec("zn", 4))
    assert validate_cover(ColoredCover.from_json(doc["certificate"]["witness"]), W, 8).accepted
    assert run(base + ["--radii", "3", "--diam", "2"]).exit_code == 1
    unknown = run(["decide", "--space", "zn", "--side", "3", "--dims", "2", "--radii", "2,2",
                   "--diam", "3", "--budget", "10000"])
    assert unknown.exit_code == 2
    assert json.loads(unknown.output)["certificate"]["verdict"] == "UNKNOWN"


@pytest.mark.parametrize("args", [
    ["decide", "--space", "zn", "--side", "4", "--radii", "x", "--diam", "1"],
    ["decide", "--space", "zn", "--side", "4", "--radii", "0", "--diam", "1"],
    ["decide", "--space", "zn", "--side", "4", "--radii", "2", "--diam", "-1"],
    ["decide", "--space", "moon", "--side", "4", "--radii", "2", "--diam", "1"],
    ["decide", "--side", "4", "--radii", "2", "--diam", "1"],
    ["decide", "--spec", "{not json", "--radii", "2", "--diam", "1"],
    ["decide", "--spec", '{"family":"zn","side":2,"bogus":1}', "--radii", "2", "--diam", "1"],
    ["decide", "--space", "zn", "--side", "4", "--radii", "2", "--diam", "1", "--budget", "5"],
    ["verify", "--suite", "nope"],
    ["ord", "--system", '{"universe":[1],"members":[[2]]}'],
    ["ord"],
    ["scan", "--space", "zn", "--radii", "2", "--sides", "a..b"],
    ["bogus-command"],
])
def test_usage_errors_exit_64(args, capsys):
    assert main(args) == EXIT_USAGE


def test_decide_uses_cache_dir(tmp_path):
    args = ["decide", "--space", "zn", "--side", "4", "--radii", "3,3", "--diam", "1",
            "--cache-dir", str(tmp_path), "--out", str(tmp_path / "cert.json")]
    assert run(args).exit_code == 0
    assert run(args).exit_code == 0
    assert len((tmp_path / "results.jsonl").read_text().splitlines()) == 1
    assert json.loads((tmp_path / "cert.json").read_text())["certificate"]["verdict"] == "SAT"


def test_decide_reads_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("TRASDIM_CACHE_DIR", str(tmp_path))
    assert run(["decide", "--space", "zn", "--side", "2", "--radii", "2", "--diam", "4"]).exit_code == 0
    assert (tmp_path / "results.jsonl").exists()


def test_scan_csv():
    res = run(["scan", "--space", "zn", "--radii", "3,3", "--sides", "2..4"])
    assert res.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(res.output)))
    assert [r["side"] for r in rows] == ["2", "3", "4"]
    assert all(r["status"] == "OK" and r["min_diameter"] == "1" for r in rows)


def test_scan_cap_and_unknown():
    res = run(["scan", "--space", "zn", "--dims", "2", "--radii", "2,2", "--sides", "2", "--diam-cap", "2"])
    rows = list(csv.DictReader(io.StringIO(res.output)))
    assert rows[0]["status"] == "UNSAT-at-cap" and res.exit_code == 0
    res = run(["scan", "--space", "zn", "--dims", "2", "--radii", "2,2", "--sides", "3", "--diam-cap", "3",
               "--budget", "10000"])
    assert res.exit_code == 2
    assert list(csv.DictReader(io.StringIO(res.output)))[0]["status"] == "UNKNOWN"


def test_scan_parallel_matches_sequential():
    args = ["scan", "--space", "zn", "--radii", "2,3", "--sides", "3,5"]
    assert run(args).output == run(args + ["--jobs", "2"]).output


def test_verify_report():
    res = run(["verify", "--suite", "ord-rank", "--trials", "20", "--seed", "3"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    short = run(["verify", "--suite", "lemmaD", "--trials", "20", "--seed", "3"])
    assert json.loads(short.output)["checks"][0]["passed"] == doc["checks"][0]["passed"]
    assert doc["ok"] and doc["seed"] == 3
    assert {c["name"] for c in doc["checks"]} == {"ord-equals-max-size", "derivative-composition"}


def test_ord_commands():
    res = run(["ord", "--system", '{"universe":[1,2,3],"members":[[1],[1,2]]}'])
    assert res.exit_code == 0 and json.loads(res.output)["ordinal"] == "2"
    res = run(["ord", "--truncated", '{"window":{"family":"zn","side":4},"diameter":1,"r_max":3}'])
    assert json.loads(res.output)["ordinal"] == "1"


def test_cover_and_window_export(tmp_path):
    res = run(["cover", "--space", "zn", "--side", "12", "--dims", "2", "--kind", "zn", "--n", "2", "--r", "3"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["report"]["accepted"] and len(doc["cover"]["entries"]) == 3
    res = run(["window", "--space", "lomega", "--side", "2", "--level-cap", "2"])
    points = json.loads(res.output)["points"]
    assert points[0] == {"level": 1, "coords": [-2]} and len(points) == 5 + 9
    out = tmp_path / "w.csv"
    run(["window", "--space", "zn", "--side", "1", "--format", "csv", "--distances", "--out", str(out)])
    assert out.read_text().splitlines()[1] == "[-1],0,1,2"


def test_spec_decide_examples():
    res = run(["decide", "--space", "zn", "--dims", "1", "--side", "9", "--radii", "3,3", "--diam", "1"])
    assert res.exit_code == 0
    W = make_window(WindowSpec("zn", 9))
    cover = ColoredCover.from_json(json.loads(res.output)["certificate"]["witness"])
    assert validate_cover(cover, W, 1).accepted and cover.radii == (3, 3)
    res = run(["decide", "--space", "zn", "--dims", "2", "--side", "3", "--radii", "2,2", "--diam", "3"])
    assert res.exit_code == 1
    assert main(["decide", "--space", "zn", "--side", "3", "--diam", "3"]) == EXIT_USAGE
    assert main(["scan", "--space", "zn", "--radii", "2", "--sides", "5..4"]) == EXIT_USAGE


def test_tower_scan_bounded_by_construction():
    res = run(["scan", "--space", "lomega", "--level-cap", "2", "--radii", "3,1", "--sides", "6..12"])
    rows = list(csv.DictReader(io.StringIO(res.output)))
    assert res.exit_code == 0 and len(rows) == 7
    built = run(["cover", "--space", "lomega", "--side", "12", "--level-cap", "2", "--kind", "lomega",
                 "--n", "1", "--tau", "3"])
    bound = json.loads(built.output)["diameter"]
    assert all(r["status"] == "OK" and int(r["min_diameter"]) <= bound for r in rows)
