import json

import pytest

from skewtorsion.catalog import catalog_list
from skewtorsion.cli import main

EXPECTED = {"broken_jacobi": 2, "broken_acm": 1, "broken_3ad": 1}


def run(*argv):
    return main(list(argv))


def test_list(capsys):
    assert run("--list") == 0
    names = {d["name"] for d in json.loads(capsys.readouterr().out)}
    assert {"sp2_s7", "su2_3ad", "broken_jacobi"} <= names


def test_no_command_is_usage_error(capsys):
    assert run() == 2


@pytest.mark.parametrize("name", [d["name"] for d in catalog_list()])
def test_exit_code_contract_over_catalog(name, tmp_path, capsys):
    path = tmp_path / "r.json"
    code = run("verify", "--model", name, "--report", str(path))
    assert code == EXPECTED.get(name, 0)
    if code != 2:
        # 0 exactly when the structured report passes
        assert json.loads(path.read_text())["passed"] == (code == 0)
    else:
        assert not path.exists()
        assert "error:" in capsys.readouterr().err


def test_refusal_names_gate(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert run("verify", "--model", "sp2_s7", "--params", "1,1", "--suite", "nk", "--report", str(path)) == 1
    checks = json.loads(path.read_text())["checks"]
    refused = [c for c in checks if c["status"] == "refused"]
    assert refused and "xi-invariance" in refused[0]["name"]
    assert "xi-invariance" in capsys.readouterr().out


def test_all_suites_skip_quotients_off_parallel_line(tmp_path):
    path = tmp_path / "r.json"
    assert run("verify", "--model", "sp2_s7", "--params", "1,1", "--report", str(path)) == 0
    data = json.loads(path.read_text())
    assert any(c["name"] == "nk: not applicable" and c["status"] == "vacuous" for c in data["checks"])


@pytest.mark.parametrize("mode", ["float", "rational"])
def test_reports_are_byte_identical(tmp_path, mode):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("verify", "--model", "su2_3ad", "--mode", mode, "--report", str(p)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_rational_verify_reports_exact_zeros(tmp_path):
    path = tmp_path / "r.json"
    assert run("verify", "--model", "sp2_s7", "--params", "1,2", "--suite", "canonical-connection",
               "--mode", "rational", "--report", str(path)) == 0
    data = json.loads(path.read_text())
    assert data["arithmetic_mode"] == "rational"
    assert all(c["residual"] == 0 for c in data["checks"])


def test_tower_float_noise_floor(tmp_path):
    path = tmp_path / "r.json"
    assert run("tower", "--model", "sp2_s7", "--params", "0.1,0.2", "--tol", "1e-15", "--report", str(path)) == 1
    worst = max(c["residual"] for c in json.loads(path.read_text())["checks"] if c["residual"] is not None)
    assert 1e-15 < worst < 1e-9
    assert run("tower", "--model", "sp2_s7", "--params", "0.1,0.2") == 0


def test_tower_rational_clears_the_floor():
    assert run("tower", "--model", "sp2_s7", "--params", "1/10,1/5", "--tol", "1e-15", "--mode", "rational") == 0


def test_tower_on_three_sphere_reports_vacuous_stage(capsys):
    assert run("tower", "--model", "su2_3ad", "--params", "1,2") == 0
    assert "VACUOUS" in capsys.readouterr().out


def test_model_file_and_load_errors(tmp_path, capsys):
    from skewtorsion.catalog import load
    from skewtorsion.modelfile import dump_model
    good = tmp_path / "s3.yaml"
    dump_model(load("su2_3ad", (1, 2)), good)
    assert run("verify", "--model", str(good), "--suite", "3ad") == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text(good.read_text() + "extra: 1\n")
    assert run("verify", "--model", str(bad)) == 2
    assert "unknown field 'extra'" in capsys.readouterr().err
    assert run("verify", "--model", "no_such_model") == 2


def test_tower_help_documents_tolerance_demo(capsys):
    with pytest.raises(SystemExit):
        run("tower", "--help")
    assert "--tol 1e-15" in capsys.readouterr().out
