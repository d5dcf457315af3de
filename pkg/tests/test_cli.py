import csv
import io
import json
import subprocess
import sys

import pytest

from ecgroups.cli import main
from ecgroups.report import SCHEMAS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_occurs_csv(capsys):
    code, out, _ = run(capsys, "occurs", "--m", "11", "--k", "1", "--candidates")
    assert code == 0
    assert out == "m,k,order,occurs,witnesses,candidates\n11,1,121,false,,111;122;133\n"


def test_occurs_json_witnesses(capsys):
    code, out, _ = run(capsys, "occurs", "--m", "1", "--k", "1", "--witnesses", "--format", "json")
    (row,) = json.loads(out)
    assert code == 0 and row["occurs"] is True
    assert [p for p, _ in row["witnesses"]] == [2, 3]
    assert list(row) == SCHEMAS["occurs"].split(",")


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--max-m", "5", "--max-k", "5"],
        ["count-r", "--max-m", "22", "--max-k", "2"],
        ["density-scan", "--max-m", "4", "--k-grid", "1,3,9"],
        ["shapes-for-prime", "--p", "2", "--max-m", "1"],
        ["curves", "--p", "5"],
        ["verify-ruck", "--p-max", "13"],
        ["m-of-g", "--m", "1", "--k", "5"],
        ["aut", "--m", "2", "--k", "1"],
        ["cl-ratio", "--m", "2", "--k", "1"],
        ["rho", "--k", "2", "--j", "1", "--d", "5,35"],
        ["sieve", "--k", "1", "--j", "0", "--max-m", "100", "--y", "2,3"],
        ["euler-product", "--d", "4", "--y", "10", "--terms", "0"],
        ["fund-disc", "--d", "3,4,12"],
        ["t-sum", "--d", "3", "--max-k", "10"],
        ["discrepancy", "--y", "0", "--h", "10"],
        ["ratios", "--max-m", "1,2,11", "--max-k", "1"],
    ],
)
def test_every_subcommand_emits_its_schema(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out.splitlines()[0] == SCHEMAS[argv[0]]
    code, out, _ = run(capsys, *argv, "--format", "json")
    rows = json.loads(out)
    assert rows and all(list(r) == SCHEMAS[argv[0]].split(",") for r in rows)


def test_values_in_reports(capsys):
    _, out, _ = run(capsys, "count", "--max-m", "2", "--max-k", "2")
    assert table(out) == [{"M": "2", "K": "2", "count": "4", "density": "1", "strategy": "direct"}]
    _, out, _ = run(capsys, "fund-disc", "--d", "1,12")
    assert [(r["d1"], r["a"]) for r in table(out)] == [("4", "1/2"), ("3", "2")]
    _, out, _ = run(capsys, "discrepancy", "--y", "0", "--h", "10")
    assert table(out)[0]["discrepancy"] == "2.16798581949"
    _, out, _ = run(capsys, "t-sum", "--d", "4", "--max-k", "2")
    assert table(out)[0]["t_sum"] == "5"
    _, out, _ = run(capsys, "shapes-for-prime", "--p", "2", "--max-m", "1")
    assert [r["k"] for r in table(out)] == ["1", "2", "3", "4", "5"]


def test_underscored_integers_accepted(capsys):
    code, out, _ = run(capsys, "count", "--max-m", "1_0", "--max-k", "1_0", "--strategy", "direct")
    assert code == 0 and table(out)[0]["M"] == "10"


def test_precondition_exit_code(capsys):
    code, out, err = run(capsys, "occurs", "--m", "0", "--k", "1")
    assert code == 3 and out == "" and "m, k >= 1" in err
    code, _, _ = run(capsys, "discrepancy", "--y", "0", "--h", "10", "--q", "6", "--a", "2")
    assert code == 3
    code, _, err = run(capsys, "count", "--max-m", "100", "--max-k", "100", "--mem-budget", "10")
    assert code == 3 and "budget" in err


def test_usage_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["occurs", "--m", "x", "--k", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_verify_ruck_reports_ok(capsys):
    code, out, err = run(capsys, "verify-ruck", "--p-max", "30")
    assert code == 0 and err.strip() == "OK"
    assert {r["status"] for r in table(out)} == {"OK"}
    assert [r["p"] for r in table(out)] == ["5", "7", "11", "13", "17", "19", "23", "29"]


def test_output_file_and_timing(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, err = run(capsys, "aut", "--m", "2", "--k", "1", "--output", str(target), "--timing")
    assert code == 0 and out == ""
    assert target.read_text() == "m,k,order,aut\n2,1,4,6\n"
    assert err.startswith("elapsed ")


def test_ratios_needs_matching_lists(capsys):
    code, _, _ = run(capsys, "ratios", "--max-m", "1,2,3", "--max-k", "1,2")
    assert code == 3


def test_golden_mismatch_exit_code(tmp_path, capsys):
    code, _, _ = run(capsys, "golden", "--dir", str(tmp_path), "--only", "census_97", "--bless")
    assert code == 0
    path = tmp_path / "census_97.csv"
    lines = path.read_text().splitlines(keepends=True)
    lines[1] = lines[1].rsplit(",", 1)[0] + ",999999\n"
    path.write_text("".join(lines))
    code, out, err = run(capsys, "golden", "--dir", str(tmp_path), "--only", "census_97")
    assert code == 4 and "MISMATCH" in out and err.strip().endswith("FAIL")
    code, out, _ = run(capsys, "golden", "--dir", str(tmp_path), "--only", "euler_products")
    assert code == 4 and "MISSING" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ecgroups", "occurs", "--m", "2", "--k", "1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("2,1,4,true")
