import io
import json

import pytest

from weightlab.cli import EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_OK, EXIT_SCHEMA, EXIT_USAGE, run
from weightlab.config import Config, load_config, parse_grid
from weightlab.errors import SchemaError
from weightlab.report import Report


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def results(text):
    return {r["name"]: r for r in json.loads(text)["results"]}


def test_check_three_holds():
    code, text = call("check", "--seq", "gevrey:1", "--cond", "lc,mg,fdb")
    assert code == EXIT_OK
    res = results(text)
    assert [res[c]["value"]["trend"] for c in ("lc", "mg", "fdb")] == ["holds"] * 3
    assert res["mg"]["context"]["n"] == 64


def test_compare_triangle():
    code, text = call("compare", "--a", "factorial", "--b", "gevrey:1")
    assert code == EXIT_OK and results(text)["relation"]["value"]["kind"] == "triangle"


def test_conjugate_value():
    code, text = call("conjugate", "--omega", "log_power:2", "--x", "4")
    assert results(text)["conjugate"]["value"]["value"][0] == pytest.approx(4.0, rel=1e-9)


def test_usage_and_schema_exit_codes(tmp_path):
    assert call("check")[0] == EXIT_USAGE
    assert call("check", "--seq", "nope")[0] == EXIT_SCHEMA
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert call("check", "--seq", str(bad))[0] == EXIT_SCHEMA
    assert call("conjugate", "--x", "1")[0] == EXIT_USAGE


def test_validation_error_exit_code():
    assert call("check", "--seq", "factorial", "--n", "4")[0] == EXIT_INVALID


def test_strict_turns_inconclusive_into_exit_3(tmp_path):
    import numpy as np
    from weightlab.seqcore import from_m
    k = np.arange(65.0)
    path = tmp_path / "osc.json"
    path.write_text(from_m(k ** 2 * (k % 2)).to_json())  # oscillating m: FdB inconclusive
    code, text = call("check", "--seq", str(path), "--cond", "fdb")
    assert code == EXIT_OK and results(text)["fdb"]["value"]["trend"] == "inconclusive"
    assert call("check", "--seq", str(path), "--cond", "fdb", "--strict")[0] == EXIT_INCONCLUSIVE
    assert call("check", "--seq", "gevrey:1", "--cond", "fdb", "--strict")[0] == EXIT_OK


def test_csv_output():
    code, text = call("check", "--seq", "gevrey:1", "--cond", "mg", "--format", "csv")
    lines = text.strip().splitlines()
    assert lines[0] == "name,condition,at_truncation,trend,constant,witness"
    assert lines[1].startswith("mg,-,True,holds,")


def test_build_and_check_matrix_file(tmp_path):
    path = tmp_path / "omega.json"
    code, _ = call("build-matrix", "--from", "omega", "--name", "log_power:2", "--out", str(path))
    assert code == EXIT_OK and path.exists()
    code, text = call("matrix-check", "--cond", "mg", str(path))
    per_x = results(text)["mg:roumieu"]["value"]["per_x"]
    assert all(e["witness"] == [2 * e["x"], 2 * e["x"]] for e in per_x)


def test_matrix_relate_names():
    code, text = call("matrix-relate", "gevrey:0.5,1,2,3", "phi:tlogt", "--lambda-grid", "0.5,1,2,3")
    assert code == EXIT_OK
    assert results(text)["relation"]["value"]["kind"] == "approx"


def test_witness_subcommands():
    code, text = call("witness", "mg-violation", "--matrix", "omega:log_power:2", "--x", "1",
                      "--n-value", "2", "--y", "1")
    assert results(text)["violation"]["value"]["pair"] == [2, 5]
    code, text = call("witness", "char-derivs", "--seq", "gevrey:1", "--n", "128", "--j-max", "8")
    assert code == EXIT_OK
    code, text = call("witness", "family", "--seq", "recip:factorial", "--n", "4096")
    assert results(text)["R_Roum"]["value"]["verdict"]["trend"] == "holds"
    code, text = call("witness", "blocks", "--matrix", "gevrey:0.5,1,2,3", "--b", "gevrey:3")
    assert code == EXIT_INVALID and "partial" in results(text)


def test_export_round_trip(tmp_path):
    code, text = call("export", "--seq", "gevrey:2", "--n", "16")
    path = tmp_path / "s.json"
    path.write_text(text)
    code2, text2 = call("export", "--seq", str(path))
    assert json.loads(text2) == json.loads(text)


def test_reproduce_deterministic(tmp_path):
    a, b = call("reproduce"), call("reproduce")
    assert a[0] == EXIT_OK and a[1] == b[1]
    assert all(r["value"]["passed"] for r in json.loads(a[1])["results"])


def test_report_round_trip():
    _, text = call("check", "--seq", "gevrey:1", "--cond", "lc,mg")
    rep = Report.from_json(text)
    assert Report.from_json(rep.to_json()) == rep
    assert rep.to_json() == text


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "w.cfg"
    cfg.write_text("n = 32\nlambda_grid = 2^-1..2\n")
    c = load_config(str(cfg))
    assert c.n == 32 and c.lambda_grid == (0.5, 1.0, 2.0, 4.0)
    monkeypatch.setenv("WEIGHTLAB_CONFIG", str(cfg))
    _, text = call("check", "--seq", "factorial", "--cond", "lc")
    assert json.loads(text)["config"]["n"] == 32
    _, text = call("check", "--seq", "factorial", "--cond", "lc", "--n", "16")
    assert json.loads(text)["config"]["n"] == 16


def test_config_errors(tmp_path):
    cfg = tmp_path / "w.cfg"
    cfg.write_text("bogus = 1\n")
    with pytest.raises(SchemaError):
        load_config(str(cfg))
    with pytest.raises(SchemaError):
        parse_grid("a,b")
    assert load_config(None) == Config()
