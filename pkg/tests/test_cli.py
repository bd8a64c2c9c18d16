import csv
import json

import jsonschema
import pytest

from weaktype.cli import dispatch, parse_schedule, read_config
from weaktype.report import format_value, load_schema, render_csv, render_json, write_report


def run(tmp_path, *argv):
    return dispatch(list(argv) + ["--out-dir", str(tmp_path)])


def manifest(tmp_path, command):
    doc = json.loads((tmp_path / f"{command}.manifest.json").read_text())
    jsonschema.validate(doc, load_schema("manifest"))
    return doc


def test_parse_schedule():
    assert parse_schedule("1e3:1e4:x2") == [1000, 2000, 4000, 8000]
    assert parse_schedule("5,10,20") == [5, 10, 20]


def test_read_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\nsamples = 500\nr-max = 2.5\n\n")
    assert read_config(p) == {"samples": "500", "r_max": "2.5"}


def test_ms_bound(tmp_path, capsys):
    assert run(tmp_path, "ms-bound", "--d", "1") == 0
    assert capsys.readouterr().out.strip() == "1.5"
    assert (tmp_path / "ms-bound.csv").read_text() == "d,ms_bound\n1,1.5\n"
    assert manifest(tmp_path, "ms-bound")["status"] == "ok"


def test_eval_point(tmp_path, capsys):
    assert run(tmp_path, "eval-point", "--d", "1", "--x", "0.25", "--lattice") == 0
    assert capsys.readouterr().out.startswith("value 2 at r 0.25")


def test_eval_point_measure_file(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"dimension": 1, "points": [{"x": [0.0]}, {"x": [1.0]}]}))
    jsonschema.validate(json.loads(m.read_text()), load_schema("delta_measure"))
    assert run(tmp_path, "eval-point", "--d", "1", "--x", "0.5", "--measure", str(m)) == 0
    assert "value 2 at r 0.5" in capsys.readouterr().out


def test_claims_csv(tmp_path):
    assert run(tmp_path, "claims", "--t", "3", "--u", "0.125", "--d-schedule", "1e3:1e6:x2") == 0
    rows = list(csv.DictReader((tmp_path / "claims.csv").open()))
    assert "holds" in rows[0]
    assert len(rows) == 2 * 10
    assert all(r["holds"] == "true" for r in rows)


def test_claims_json_schema(tmp_path):
    assert run(tmp_path, "claims", "--t", "5", "--u", "0.25", "--claim", "claim2",
               "--d-schedule", "1e3:4e3:x2", "--format", "json") == 0
    doc = json.loads((tmp_path / "claims.json").read_text())
    jsonschema.validate(doc, load_schema("claim_report"))


def test_mc_bound_schema_and_manifest(tmp_path):
    assert run(tmp_path, "mc-bound", "--d", "2", "--samples", "4000", "--format", "json",
               "--seed", "3") == 0
    doc = json.loads((tmp_path / "mc-bound.json").read_text())
    jsonschema.validate(doc, load_schema("mc_report"))
    man = manifest(tmp_path, "mc-bound")
    assert man["seed"] == 3 and man["parameters"]["samples"] == 4000
    assert man["outputs"] == [str(tmp_path / "mc-bound.json")]


def test_certificate_schema(tmp_path, capsys):
    assert run(tmp_path, "certificate", "--d", "100000", "--t", "3", "--format", "json") == 0
    doc = json.loads((tmp_path / "certificate.json").read_text())
    jsonschema.validate(doc, load_schema("certificate"))
    assert doc["rows"][0]["asymptotic"] is True


def test_other_commands(tmp_path):
    assert run(tmp_path, "eu-exact", "--d", "1000", "--t", "2") == 0
    assert run(tmp_path, "union-bound", "--d", "1000", "--t", "2") == 0
    assert run(tmp_path, "sweep", "--d-list", "1,2", "--samples", "2000") == 0
    trace = tmp_path / "trace.csv"
    cfg = tmp_path / "best.json"
    assert run(tmp_path, "oned-search", "--n", "4", "--iterations", "20", "--restarts", "2",
               "--trace", str(trace), "--save-config", str(cfg)) == 0
    assert trace.read_text().startswith("iteration,value,step\n")
    jsonschema.validate(json.loads(cfg.read_text()), load_schema("oned_config"))
    assert len(manifest(tmp_path, "oned-search")["outputs"]) == 3


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("samples = 1000\nseed = 77\n")
    assert run(tmp_path, "mc-bound", "--d", "1", "--config", str(cfg), "--seed", "5") == 0
    params = manifest(tmp_path, "mc-bound")["parameters"]
    assert params["samples"] == 1000 and params["seed"] == 5


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("WEAKTYPE_OUT", str(tmp_path))
    assert dispatch(["ms-bound", "--d", "2"]) == 0
    assert (tmp_path / "ms-bound.csv").exists()


def test_exit_codes(tmp_path):
    assert dispatch(["no-such-command"]) == 2
    assert run(tmp_path, "eval-point", "--d", "2", "--x", "0.1,0.2,0.3") == 2
    assert manifest(tmp_path, "eval-point")["status"] == "usage-error"
    assert run(tmp_path, "claims", "--t", "2", "--claim", "claim9") == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus_key = 1\n")
    assert run(tmp_path, "ms-bound", "--d", "1", "--config", str(bad)) == 2
    blocked = tmp_path / "file"
    blocked.write_text("")
    assert dispatch(["ms-bound", "--d", "1", "--out-dir", str(tmp_path),
                     "--output", str(blocked / "x.csv")]) == 1
    assert manifest(tmp_path, "ms-bound")["status"] == "failed"


@pytest.mark.parametrize("command", ["claims", "eu-exact", "union-bound", "mc-bound", "sweep",
                                     "oned-search", "ms-bound", "certificate", "eval-point"])
def test_help_exits_cleanly(command, capsys):
    assert dispatch([command, "--help"]) == 0
    assert "default" in capsys.readouterr().out


def test_help_shows_defaults(capsys):
    dispatch(["oned-search", "--help"])
    out = capsys.readouterr().out
    assert "default: 16" in out and "default: 400" in out and "default: 20" in out


def test_report_formatting(tmp_path):
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(True) == "true" and format_value(float("inf")) == "inf"
    rows = [{"a": 0.1 + 0.2, "b": 2}]
    assert render_csv(rows, ("a", "b")) == "a,b\n0.3,2\n"
    assert json.loads(render_json(rows, ("b", "a"))) == {"rows": [{"a": 0.3, "b": 2}]}
    p1 = write_report(rows, "json", tmp_path / "x.json", ("a", "b"))
    first = p1.read_bytes()
    write_report(rows, "json", tmp_path / "x.json", ("a", "b"))
    assert p1.read_bytes() == first
    with pytest.raises(ValueError):
        write_report(rows, "xml", tmp_path / "x.xml", ("a",))
