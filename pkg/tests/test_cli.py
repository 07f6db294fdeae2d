import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from pompeiu_lab import cli

FAST = ["range_product", "dragomir_linf", "pre_gruss"]


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_eval():
    assert run("eval", "--expr", "c*x-1", "--at", "2", "--param", "c=1") == (0, "1\n")
    code, text = run("eval", "--expr", "x^2 - 4*x + 4", "--at", "0.1")
    assert code == 0 and float(text) == 0.1 ** 2 - 0.4 + 4


def test_seventeen_digits():
    code, text = run("eval", "--expr", "1/3", "--at", "0")
    assert text.strip() == "0.33333333333333331"
    assert float(text) == 1 / 3


def test_functional_phat():
    code, text = run("functional", "--kind", "Phat", "--f", "1", "--g", "1", "--a", "1",
                     "--b", "2")
    d = json.loads(text)
    assert code == 0
    assert d["product_form"] == pytest.approx(1 / 12, rel=1e-13)
    assert d["double_form"] == pytest.approx(1 / 12, rel=1e-9)
    assert d["discrepancy"] < 1e-9


@pytest.mark.parametrize("argv", [
    ["--kind", "T", "--f", "x", "--g", "x"],
    ["--kind", "P", "--f", "x", "--g", "1"],
    ["--kind", "Phat_h", "--f", "x", "--g", "1", "--h", "x^2"],
    ["--kind", "weighted", "--f", "x", "--g", "1", "--h", "1", "--w", "x"],
    ["--kind", "hardy", "--f", "1"],
    ["--kind", "hardy_p", "--f", "1", "--p", "2"],
    ["--kind", "hardy_h", "--f", "1", "--h", "x"],
    ["--kind", "hardy_phi", "--f", "x"],
])
def test_functional_kinds(argv):
    code, text = run("functional", *argv, "--a", "1", "--b", "2")
    assert code == 0
    assert "product_form" in json.loads(text)


def test_functional_missing_argument():
    assert run("functional", "--kind", "Phat", "--f", "x", "--a", "1", "--b", "2")[0] == 1


def test_bound_example():
    code, text = run("bound", "--id", "dragomir_linf", "--f", "3*x-1", "--g", "3*x-1",
                     "--a", "1", "--b", "2")
    d = json.loads(text)
    jsonschema.validate(d, cli.BOUND_REPORT_SCHEMA)
    assert code == 0 and d["status"] == "holds"
    assert d["lhs"] == pytest.approx(1 / 12, abs=1e-9)
    assert d["rhs"] == pytest.approx(1 / 12, abs=1e-12)


def test_bound_with_ranges():
    code, text = run("bound", "--id", "range_product", "--f", "1", "--g", "1", "--a", "1",
                     "--b", "2", "--range", "1,1,1,1")
    assert code == 0 and json.loads(text)["rhs"] == pytest.approx(0.5)


def test_bound_violated_exit_code():
    code, text = run("bound", "--id", "range_product_as_printed", "--f", "-1", "--g", "1",
                     "--a", "1", "--b", "2", "--range=-1,-1,1,1")
    assert code == 2 and json.loads(text)["status"] == "violated"


def test_bound_usage_errors():
    assert run("bound", "--id", "nope", "--f", "x", "--a", "1", "--b", "2")[0] == 1
    assert run("bound", "--id", "pecaric_ungar", "--f", "x", "--a", "1", "--b", "2")[0] == 1
    assert run("bound", "--id", "gruss_classic", "--f", "x", "--g", "x", "--a", "1",
               "--b", "2")[0] == 1
    assert run("bound", "--id", "gruss_classic", "--f", "x +", "--g", "x", "--a", "1",
               "--b", "2")[0] == 1
    assert run("bound", "--id", "gruss_classic", "--f", "x", "--g", "x", "--a", "2",
               "--b", "1")[0] == 1


def test_mvt_boggio():
    code, text = run("mvt", "--variant", "boggio", "--f", "x", "--h", "x^2-4*x+4",
                     "--x1", "-1", "--x2", "1")
    d = json.loads(text)
    assert code == 0
    assert d["xi_roots"] == pytest.approx([0.5], abs=1e-12)
    assert abs(d["residuals"][0]) <= 1e-10


def test_mvt_no_root_exit_code():
    code, _ = run("mvt", "--variant", "pompeiu", "--f", "sign(x - 1.5)", "--x1", "1",
                  "--x2", "2")
    assert code == 3


def test_mvt_numeric_failure():
    code, _ = run("mvt", "--variant", "boggio", "--f", "x", "--h", "ln(x)", "--x1", "-1",
                  "--x2", "1")
    assert code == 3


def test_usage():
    assert run()[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("--help")[0] == 0


def _write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_suite_outputs(tmp_path):
    path = _write(tmp_path, {"bounds": FAST, "samples": 6, "seed": 3})
    out = tmp_path / "rep.json"
    code, _ = run("suite", "--config", path, "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    jsonschema.validate(rep, cli.SUITE_REPORT_SCHEMA)
    rows = list(csv.reader(open(tmp_path / "rep.csv")))
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    assert [r[0] for r in rows[1:]] == FAST
    assert all(r[1] == "6" for r in rows[1:])


def test_suite_violation_exit_code(tmp_path):
    path = _write(tmp_path, {"bounds": ["range_product_as_printed"], "samples": 20, "seed": 1})
    out = tmp_path / "rep.json"
    code, _ = run("suite", "--config", path, "--out", str(out))
    rep = json.loads(out.read_text())
    assert code == 2 and rep["tallies"]["range_product_as_printed"]["violated"] > 0
    assert list((tmp_path / "rep_counterexamples").iterdir())


def test_suite_zero_exit_iff_no_violation(tmp_path):
    path = _write(tmp_path, {"bounds": ["range_product"], "samples": 20, "seed": 1})
    out = tmp_path / "rep.json"
    assert run("suite", "--config", path, "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["tallies"]["range_product"]["violated"] == 0


def test_suite_empty(tmp_path):
    out = tmp_path / "rep.json"
    assert run("suite", "--config", _write(tmp_path, {"bounds": []}), "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["tallies"] == {}


@pytest.mark.parametrize("cfg", [{"bounds": ["x"], "extra": 1}, {"samples": 3},
                                 {"bounds": ["no_such_bound"]}, {"bounds": [], "seed": -1},
                                 {"bounds": [], "quad": {"abs_tol": 0}}])
def test_suite_bad_config(tmp_path, cfg):
    assert run("suite", "--config", _write(tmp_path, cfg))[0] == 1


def test_suite_unreadable_config(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run("suite", "--config", str(p))[0] == 1
    assert run("suite", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_sharpness():
    code, text = run("sharpness", "--id", "dragomir_linf", "--family", "c*x - 1",
                     "--box", "c=0.1:5", "--a", "1", "--b", "2", "--budget", "12")
    d = json.loads(text)
    jsonschema.validate(d, cli.SHARPNESS_SCHEMA)
    assert code == 0 and d["best_ratio"] == pytest.approx(1, abs=1e-9)


def test_sharpness_bad_box():
    assert run("sharpness", "--id", "pre_gruss", "--family", "c*x", "--box", "c=1",
               "--a", "1", "--b", "2")[0] == 1


def test_list():
    code, text = run("list")
    assert code == 0 and "dragomir_linf" in text and "_as_printed" not in text
    code, text = run("list", "--errata", "--json")
    ids = [r["id"] for r in json.loads(text)]
    assert "four_case_as_printed" in ids


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "pompeiu_lab", "eval", "--expr", "ln(x)",
                        "--at", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and float(r.stdout) == 0
