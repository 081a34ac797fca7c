import csv
import json

import pytest

from semiformal import cli


def run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = cli.main([*args, "--output", str(out)])
    return code, out


def test_props(tmp_path):
    code, out = run(tmp_path, "props", "--seed", "42", "--cases", "20")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config_echo"]["seed"] == 42
    assert len(doc["checks"]) == 15
    assert all(c["status"] == "pass" and c["detail"]["passed"] == 20 for c in doc["checks"])


def test_hilbert(tmp_path):
    code, out = run(tmp_path, "hilbert", "--coeffs", "2,-1", "--max-r", "8", "--eps", "1e-8")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["reports"][0]["B_r"] == "-2"
    ids = [c["id"] for c in doc["checks"]]
    assert ids == sorted(ids)


def test_hilbert_csv(tmp_path):
    code, out = run(tmp_path, "hilbert", "--coeffs", "1,-3,1", "--max-r", "3", "--format", "csv", name="h.csv")
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][:3] == ["r", "B_r", "B_r_residue"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
    assert rows[1][1] == "8"


def test_bbr_with_tables(tmp_path):
    table = tmp_path / "t.csv"
    code, out = run(tmp_path, "bbr", "--b", "1", "--alpha", "1", "--max-n", "200", "--max-k", "12", "--emit-tables", str(table))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["v_prefix"][:5] == ["1", "2", "5", "16", "65"]
    assert doc["info"]["norm_induction"]["status"] == "fail"
    rows = list(csv.reader(table.open()))
    assert rows[0][:4] == ["n", "u_n", "v_n", "v_n(1)"] and len(rows) == 202


def test_deterministic_and_parallel(tmp_path):
    _, a = run(tmp_path, "hilbert", "--coeffs", "2,-1", "--max-r", "4", name="a.json")
    _, b = run(tmp_path, "hilbert", "--coeffs", "2,-1", "--max-r", "4", name="b.json")
    _, c = run(tmp_path, "hilbert", "--coeffs", "2,-1", "--max-r", "4", "--jobs", "2", name="c.json")
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "reports"))
    assert cli.main(["props", "--cases", "2"]) == 0
    assert (tmp_path / "reports" / "props-report.json").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["hilbert", "--coeffs", "2,x"],
        ["hilbert", "--coeffs", "0,1"],
        ["bbr", "--b", "1,1", "--alpha", "1"],
        ["bbr", "--b", "1", "--alpha", "1", "--max-n", "3"],
        ["props", "--eps", "0"],
        ["props", "--eps", "abc"],
        ["props", "--cases", "0"],
    ],
)
def test_config_errors(tmp_path, args):
    code, out = run(tmp_path, *args)
    assert code == cli.EXIT_CONFIG
    assert not out.exists()


def test_unwritable_output(tmp_path):
    target = tmp_path / "dir"
    target.mkdir()
    assert cli.main(["props", "--cases", "2", "--output", str(target)]) == cli.EXIT_CONFIG


def test_exit_codes_from_statuses():
    mk = lambda *ss: [{"status": s} for s in ss]
    assert cli.exit_code(mk("pass", "pass")) == 0
    assert cli.exit_code(mk("pass", "undecided")) == 3
    assert cli.exit_code(mk("undecided", "fail", "pass")) == 1


def test_failure_is_reported(tmp_path, monkeypatch):
    # a failing suite must surface as exit 1 with the report still written
    def broken(name, seed, cases):
        from semiformal.verdict import Verdict

        return Verdict.of(name, name != "shift_product", cases=cases)

    monkeypatch.setattr(cli, "run_suite", broken)
    code, out = run(tmp_path, "props", "--cases", "2")
    assert code == 1
    doc = json.loads(out.read_text())
    assert [c["id"] for c in doc["checks"] if c["status"] == "fail"] == ["props/shift_product"]
