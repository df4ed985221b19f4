import json
import subprocess
import sys
from pathlib import Path

import pytest

from dmodres import __version__
from dmodres.cli import SCHEMA, main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "-")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == SCHEMA and data["version"] == __version__
    assert data["command"] == argv[0]
    return data["result"]


def test_mul(capsys):
    code, out, _ = run(capsys, "mul", "dt", "t", "--n", "0", "--p", "1", "--homogenized")
    assert code == 0 and out.strip() == "t*dt + h"
    assert report(capsys, "mul", "dx1", "x1", "--n", "1")["product"] == "x1*dx1 + 1"


def test_gb_and_syz(capsys):
    res = report(capsys, "gb", "--n", "2", "--gens", "dx1; dx2")
    assert sorted(r[0] for r in res["basis"]) == ["dx1", "dx2"]
    res = report(capsys, "syz", "--n", "2", "--gens", "dx1; dx2")
    assert len(res["syzygies"]) == 1


def test_res_minres_betti(capsys):
    res = report(capsys, "res", "--n", "2", "--homogenized", "--gens", "dx1; dx2")
    assert [m["rank"] for m in res["complex"]["modules"]][:3] == [1, 2, 1]
    res = report(capsys, "betti", "--n", "2", "--gens", "dx1; dx2")
    assert res["betti"] == {"0,0": 1, "1,1": 2, "2,2": 1}


def test_betti_without_minimalizing_fails(capsys):
    code, _, err = run(capsys, "betti", "--n", "1", "--gens", "[1, dx1]; [0, x1]", "--no-minimalize")
    assert code == 1 and "minimalize" in err


def test_bfun(capsys):
    code, out, _ = run(capsys, "bfun", "--f", "x1^2+x2^2", "--weights", "1/2,1/2")
    assert code == 0 and out.strip() == "(s+1)^2"
    res = report(capsys, "bfun", "--f", "x1^2+x2^2+x3^2+x4^2", "--weights", "1/2,1/2,1/2,1/2",
                 "--certify")
    assert (res["kprime"], res["k1"], res["certified"]) == (2, 1, True)


def test_annfs(capsys):
    res = report(capsys, "annfs", "--f", "x1^2+x2^3", "--weights", "1/2,1/3")
    assert [g["name"] for g in res["generators"]] == ["X1", "X2", "e1", "e2", "e1^e2"]


def test_restrict(capsys):
    res = report(capsys, "restrict", "--n", "0", "--p", "1", "--gens", "dt", "--k1", "0",
                 "--order", "FV")
    assert [m["rank"] for m in res["complex"]["modules"]][0] == 1
    code, _, _ = run(capsys, "restrict", "--n", "1", "--gens", "dx1", "--k1", "0")
    assert code == 2


def test_strict(capsys):
    res = report(capsys, "strict", "--n", "0", "--p", "1", "--gens", "[t, 1]", "--shifts-f", "1,0")
    assert res["t_injective"] is False


def test_lc_golden(capsys):
    res = report(capsys, "lc", "--f", "x1^2+x2^3", "--weights", "1/2,1/3")
    golden = json.loads((GOLDEN / "lc_cusp.json").read_text())
    assert golden["schema"] == SCHEMA
    assert res == golden["result"]


def test_json_file_output(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "bfun", "--f", "x1^2+x2^3", "--weights", "1/2,1/3", "--json", str(path))
    assert code == 0 and out.strip() == "(s+5/6)*(s+1)*(s+7/6)"
    assert json.loads(path.read_text())["result"]["k1"] == 0


@pytest.mark.parametrize("argv", [
    ["mul", "x1 +", "x1", "--n", "1"],
    ["mul", "x1", "--n", "1"],
    ["gb", "--n", "1", "--gens", "x2"],
    ["gb", "--n", "1"],
    ["gb", "--n", "1", "--gens", "x1", "--order", "lex"],
    ["gb", "--n", "1", "--gens", "x1", "--order", "V"],
    ["gb", "--n", "1", "--gens", "[x1, 1]; x1"],
    ["bfun", "--f", "x1^2"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_error_reports_offset(capsys):
    code, _, err = run(capsys, "mul", "x1 +", "x1", "--n", "1")
    assert code == 2 and "offset 4" in err


def test_math_error_exit_1(capsys):
    code, _, err = run(capsys, "bfun", "--f", "x1^2+x2^3", "--weights", "1/2,1/2")
    assert code == 1 and "theta" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dmodres", "mul", "dx1", "x1", "--n", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "x1*dx1 + 1"
