import csv
import io
import json
import subprocess
import sys

import pytest

from twosquares.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    return dict(line.split(None, 1) for line in out.strip().splitlines())


@pytest.mark.parametrize(
    "n, x, verdict",
    [("72", "21", "N (fails at 3^2)"), ("72", "23", "N (fails at 2^3)"), ("8", "5", "S"), ("1", "0", "S")],
)
def test_classify(capsys, n, x, verdict):
    code, out, _ = run(capsys, "classify", n, x)
    assert code == 0
    assert kv(out)["verdict"] == verdict


def test_count_golden(capsys):
    code, out, _ = run(capsys, "count", "72", "--format", "csv")
    assert code == 0
    assert out == "n,S,N,r_S,r_S_decimal,r_N,r_N_decimal\n72,35,37,35/72,0.486111,37/72,0.513889\n"


@pytest.mark.parametrize("n, field, value", [("8", "S", "5"), ("1", "S", "1"), ("72", "N", "37")])
def test_count_values(capsys, n, field, value):
    _, out, _ = run(capsys, "count", n)
    assert kv(out)[field] == value


def test_table_csv(capsys):
    _, out, _ = run(capsys, "table", "12", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12
    assert rows[3] == {"n": "4", "S": "3", "N": "1", "r_S": "3/4", "r_S_decimal": "0.750000",
                       "r_N": "1/4", "r_N_decimal": "0.250000"}


@pytest.mark.parametrize("max_n", ["1", "128"])
def test_oracle_check(capsys, max_n):
    code, out, _ = run(capsys, "oracle-check", max_n, "--format", "kv")
    assert code == 0
    assert out.splitlines()[-1] == f"max_n={max_n} result=all agree"


def test_asymptotics_defaults_to_csv(capsys):
    _, out, _ = run(capsys, "asymptotics", "2", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    by_key = {(r["i"], r["s"]): r for r in rows}
    assert by_key["1", "1"]["density_N"] == "0/1"
    assert (by_key["1", "2"]["density_N"], by_key["1", "2"]["limit"]) == ("2/9", "1/4")
    assert (by_key["2", "2"]["density_N"], by_key["2", "2"]["limit"]) == ("20/63", "11/32")
    assert by_key["2", "2"]["density_N_decimal"] == "0.317460"


def test_search_small(capsys, tmp_path):
    ck = tmp_path / "ck.json"
    code, out, err = run(capsys, "search", "--limit", "40", "--resume", str(ck))
    assert code == 0
    assert kv(out)["best"] == "none"
    assert json.loads(ck.read_text())["cursor"] == 36


def test_search_outputs_and_resume(capsys, tmp_path):
    ck, rows, members = tmp_path / "ck.json", tmp_path / "rows.csv", tmp_path / "a.txt"
    code, out, _ = run(capsys, "search", "--limit", "100", "--resume", str(ck),
                       "--csv-out", str(rows), "--members-out", str(members))
    assert code == 0
    first = kv(out)
    assert first["n"] == "72" and first["count"] == "2"
    assert members.read_text().split() == ["23", "71"]
    assert rows.read_text().splitlines()[0] == "n,k,m,count,density,density_decimal"
    # rerunning against a finished checkpoint scans nothing new
    _, out2, _ = run(capsys, "search", "--limit", "100", "--resume", str(ck))
    assert kv(out2) == first


def test_search_threads_identical(capsys):
    outs = [run(capsys, "search", "--limit", "20000", "--threads", t)[1] for t in ("1", "4")]
    assert outs[0] == outs[1]


def test_certify_lift(capsys):
    code, out, _ = run(capsys, "certify-lift", "23", "--k", "3", "--m", "9", "--samples", "200")
    assert code == 0
    assert kv(out)["result"] == "all non-representable"


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "5", "7"],
        ["count", "0"],
        ["search", "--limit", "3"],
        ["certify-lift", "0", "--k", "3", "--m", "9"],
        ["certify-lift", "23", "--k", "3", "--m", "5"],
        ["asymptotics", "0", "2"],
    ],
)
def test_precondition_violations_exit_nonzero(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "error" in err


def test_malformed_arguments():
    with pytest.raises(SystemExit) as exc:
        main(["classify", "seven", "1"])
    assert exc.value.code == 2


def test_checkpoint_io_failure(capsys, tmp_path):
    code, _, err = run(capsys, "search", "--limit", "100", "--resume", str(tmp_path / "no" / "ck.json"))
    assert code == 1 and "I/O error" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "twosquares", "classify", "8", "3"],
                         capture_output=True, text=True, check=True)
    assert "N (fails at 2^3)" in res.stdout
