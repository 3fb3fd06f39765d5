import json
import math

import pytest

from hypvol import serialize
from hypvol.chains import boundary, loads_chain
from hypvol.cli import complex_value, real_value, run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None), out


def test_number_parsing():
    assert real_value("sqrt(2)-1") == math.sqrt(2) - 1
    assert real_value("2.5") == 2.5
    z = complex_value("0.05@pi/5")
    assert abs(abs(z) - 0.05) < 1e-15 and abs(math.atan2(z.imag, z.real) - math.pi / 5) < 1e-12
    assert complex_value("1+2j") == 1 + 2j


def test_serializer_uses_17_digits():
    text = serialize.dumps({"x": 0.1, "n": 3, "c": 1 + 2j})
    assert '"x": 0.10000000000000001' in text
    assert json.loads(text)["x"] == 0.1


def test_borel_check(capsys):
    code, doc, _ = run_json(capsys, ["borel-check", "--n", "3", "--samples", "40", "--seed", "42",
                                     "--tol", "1e-8"])
    assert code == 0 and doc["status"] == "PASS"
    assert doc["result"]["max_residual"] < 1e-8
    assert doc["config"]["seed"] == 42


def test_surface_chain_emit(capsys, tmp_path):
    path = tmp_path / "chain.txt"
    code, doc, _ = run_json(capsys, ["surface-chain", "--genus", "2", "--emit", str(path)])
    assert code == 0
    z = loads_chain(path.read_text())
    assert len(z) == 6 and boundary(z).norm1() == 2
    assert doc["result"]["boundary_norm1"] == 2


def test_certify_schottky(capsys):
    code, doc, _ = run_json(capsys, ["certify-schottky", "--alpha", "101", "--beta", "101"])
    assert code == 0
    assert doc["result"]["type"] == "SchottkyCertificate"
    assert doc["result"]["inequalities"][0]["margin"] > 0


def test_exit_codes(capsys):
    # certificate not found
    assert run(["certify-dense", "--alpha", "101", "--beta", "101"]) == 2
    # budget exceeded
    assert run(["find-exponents", "--theta", "sqrt(2)-1", "--tau0", "1e-9", "--max-n", "100"]) == 3
    # invalid input
    assert run(["certify-dense", "--bogus"]) == 4
    assert run(["frobnicate"]) == 4
    assert run(["surface-chain", "--genus", "1"]) == 4
    assert run(["certify-schottky", "--alpha", "1", "--beta", "3"]) == 4
    err = capsys.readouterr().err
    assert '"exit_code": 4' in err


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("HYPVOL_SEED", "42")
    _, doc, _ = run_json(capsys, ["cocycle-check", "--samples", "10"])
    assert doc["config"]["seed"] == 42
    monkeypatch.setenv("HYPVOL_SEED", "nope")
    assert run(["cocycle-check", "--samples", "10"]) == 4


def test_seminorm_bound_artifacts(capsys, tmp_path):
    code, doc, _ = run_json(capsys, ["seminorm-bound", "--genus-max", "5", "--out-dir",
                                     str(tmp_path)])
    assert code == 0
    assert (tmp_path / "ratios.png").stat().st_size > 0
    rows = (tmp_path / "ratios.csv").read_text().splitlines()
    assert rows[0] == "g,value,norm1,ratio" and len(rows) == 5
    assert json.loads((tmp_path / "report.json").read_text()) == doc


FAST_COMMANDS = [
    ["borel-check", "--n", "2", "--samples", "20"],
    ["cocycle-check", "--samples", "50"],
    ["surface-chain", "--genus", "3"],
    ["certify-dense", "--alpha", "0.05@pi/5", "--beta", "0.05", "--log-params"],
    ["certify-dense", "--family", "rho-theta"],
    ["certify-dense", "--family", "dense-psl2r"],
    ["certify-schottky", "--alpha", "101", "--beta", "101"],
    ["find-exponents", "--theta", "sqrt(2)-1", "sqrt(3)-1", "--tau0", "0.01"],
    ["approximate", "--angle", "1.5707963267948966", "--eps", "0.2", "--max-nodes", "20000"],
]


@pytest.mark.parametrize("argv", FAST_COMMANDS, ids=lambda a: a[0])
def test_byte_identical_reruns(capsys, argv):
    argv = argv + ["--seed", "42"]
    c1, _, out1 = run_json(capsys, argv)
    c2, _, out2 = run_json(capsys, argv)
    assert c1 == c2 == 0
    assert out1 == out2
