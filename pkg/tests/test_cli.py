import json
import subprocess
import sys

import pytest

from mockheegner.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_json(capsys):
    code, out, _ = run(capsys, "construct", "--p", "7", "--case", "1")
    assert code == 0
    d = json.loads(out)
    assert d["verdict"] == "nontorsion"
    assert d["curve"] == "x^3+y^3=7"
    assert d["comparison"]["status"] == "MATCH"
    X, Y, Z = (int(t) for t in d["point"]["projective"].strip("()").split(":"))
    assert X**3 + Y**3 == 7 * Z**3


def test_construct_markdown(capsys):
    code, out, _ = run(capsys, "construct", "--p", "13", "--case", "2", "--format", "markdown")
    assert code == 0
    assert out.startswith("## x^3 + y^3 = 169")
    assert "- verdict: nontorsion" in out


def test_construct_torsion(capsys):
    code, out, _ = run(capsys, "construct", "--p", "61", "--case", "2")
    assert code == 0
    d = json.loads(out)
    assert d["verdict"] == "torsion" and d["point"] is None


@pytest.mark.parametrize("p, msg", [(11, "p ≡ 2 (mod 9) unsupported"), (49, "49 is not prime")])
def test_construct_rejects_p(capsys, p, msg):
    code, _, err = run(capsys, "construct", "--p", str(p), "--case", "1")
    assert code == 2
    assert msg in err


def test_usage_errors():
    with pytest.raises(SystemExit) as e:
        main(["construct", "--p", "7", "--case", "3"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["construct", "--p", "7", "--case", "1", "--digits", "20"])
    assert e.value.code == 2


def test_construct_stage_error(capsys):
    # the precision cap forbids any escalation, so recognition fails for a large point
    code, _, err = run(capsys, "construct", "--p", "97", "--case", "1", "--digits", "60", "--max-digits", "60")
    assert code == 1
    assert err.startswith("error: [descend]")


@pytest.mark.parametrize("suite", ["constants", "shimura"])
def test_verify_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "| suite | check | result | detail |"
    assert all("| PASS |" in line for line in lines[2:])


def test_verify_parametrization_json(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "parametrization", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 6 and all(r["pass"] for r in rows)


def test_verify_detects_uncertified_order(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "parametrization", "--order", "60")
    assert code == 1
    assert "below certification bound" in out


def test_verify_shimura_for_p(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "shimura", "--p", "31", "--format", "json")
    assert code == 0
    assert {r["check"].split(":")[0] for r in json.loads(out)} == {"p=31 case 1", "p=31 case 2"}


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--max-p", "7", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [(r["p"], r["case"]) for r in rows] == [(7, 1), (7, 2)]
    for r in rows:
        assert r["L_alg"] == 1 and r["L_alg_status"] == "MATCH"
        assert r["point_status"] == "MATCH" and r["three_is_cube_status"] == "MATCH"


def test_table_markdown_all_match(capsys):
    code, out, _ = run(capsys, "table", "--max-p", "43", "--jobs", "2")
    assert code == 0
    assert "DIFFER" not in out
    assert out.count("MATCH") == 3 * 8
    assert "### x^3+y^3=p^2" in out


def test_table_skip_lvalue(capsys):
    code, out, _ = run(capsys, "table", "--max-p", "13", "--skip-lvalue", "--format", "json")
    assert code == 0
    assert all("L_alg" not in r for r in json.loads(out))


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "mockheegner", "construct", "--p", "7", "--case", "2"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(out.stdout)["comparison"] == {"status": "MATCH", "multiple": 2}
