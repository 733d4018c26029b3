import json

import pytest

from lkm3.cli import EXIT_FAIL, EXIT_OK, EXIT_TRUNC, EXIT_USAGE, RunConfig, main
from lkm3.jacobiforms import generators


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(fmt="xml")
    with pytest.raises(ValueError):
        RunConfig(box=(0, 4))
    with pytest.raises(ValueError):
        RunConfig(jobs=0)


def test_verify_tables(capsys):
    rc, out, _ = run(capsys, "verify", "tables")
    assert rc == EXIT_OK
    assert out.rstrip().endswith(", 0 failures")
    assert "FAIL" not in out


def test_lift_header(capsys):
    rc, out, _ = run(capsys, "lift", "--t", "1", "--combination", "1,0")
    assert rc == EXIT_OK
    head = dict(ln.split("=", 1) for ln in out.splitlines()[:7])
    assert head == {"t": "1", "combination": "1,0", "A": "1/2", "B": "1/2", "C": "1/2", "weight": "5", "parity": "0"}


def test_lift_json(capsys):
    rc, out, _ = run(capsys, "lift", "--t", "2", "--box-n", "2", "--box-m", "2", "--format", "json")
    body = json.loads(out)
    assert rc == EXIT_OK and body["weight"] == "2"
    assert body["divisors"] and all(d[2] in (0, 1) for d in body["divisors"])
    rc2, out2, _ = run(capsys, "lift", "--t", "2", "--box-n", "2", "--box-m", "2", "--format", "json")
    assert out == out2


def test_classify_all(capsys):
    rc, out, _ = run(capsys, "classify", "--format", "json", "--jobs", "3")
    recs = json.loads(out)
    assert rc == EXIT_OK and len(recs) == 29
    assert recs[0]["name"] == "Delta_5" and recs[0]["rho"] == ["1/2", "1/2", "1/2"]
    rc, text, _ = run(capsys, "classify", "--t", "9")
    assert text.splitlines()[-1] == "1 records"


def test_basis_text(capsys, tmp_path):
    out = tmp_path / "b.txt"
    rc, stdout, _ = run(capsys, "basis", "--t", "1", "--out", str(out))
    assert rc == EXIT_OK and stdout == ""
    assert "t=1" in out.read_text()


def test_usage_errors(capsys):
    assert run(capsys, "lift", "--t", "5")[0] == EXIT_USAGE
    assert run(capsys, "lift", "--t", "1", "--combination", "1,0,0")[0] == EXIT_USAGE
    assert run(capsys, "lift", "--t", "1", "--box-n", "0")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--t", "x")[0] == EXIT_USAGE
    rc, _, err = run(capsys, "verify", "--dataset", "/nonexistent.json")
    assert rc == EXIT_USAGE and err


def test_insufficient_truncation(capsys):
    rc, _, err = run(capsys, "lift", "--t", "1", "--q-order", "1")
    assert rc == EXIT_TRUNC and "O(q^10)" in err


def test_reflective_file(capsys, tmp_path):
    phi = generators(3)["phi0_1"]
    p = tmp_path / "f.json"
    p.write_text(json.dumps(phi.to_records()))
    rc, out, _ = run(capsys, "reflective", str(p))
    assert rc == EXIT_OK and out.startswith("reflective")
    p.write_text("{")
    assert run(capsys, "reflective", str(p))[0] == EXIT_USAGE


def test_reflective_violation(capsys, tmp_path):
    from lkm3.jacobiforms import JacobiFourier

    phi = generators(3)["phi0_1"]
    bad = phi + JacobiFourier({(0, 3): 1, (0, -3): 1}, 0, 1, phi.q_trunc)
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad.to_records()))
    rc, out, _ = run(capsys, "reflective", str(p))
    assert rc == EXIT_FAIL and out == "not reflective: f(0, -3) = 1\n"
