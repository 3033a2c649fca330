from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from belltrig import atlas
from belltrig.cli import build_parser, run, to_json


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(text: str) -> dict[str, str]:
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_gram_example(capsys):
    code, out, _ = call(capsys, "gram", "--cos", "0.9,0.9,0.0")
    f = fields(out)
    assert code == 0
    assert float(f["determinant"]) == pytest.approx(-0.62, abs=1e-15)
    assert f["feasible"] == "false"


def test_gram_vectors(capsys):
    code, out, _ = call(capsys, "--format", "json", "gram", "--vectors", "1,0", "0,1", "0.6,0.8")
    data = json.loads(out)
    assert code == 0 and data["n"] == 3
    assert data["min_eigenvalue"] == pytest.approx(0.0, abs=1e-15)


def test_chsh_family_example(capsys):
    code, out, _ = call(capsys, "chsh", "--family", "--phi", "0.7853981633974483")
    f = fields(out)
    assert code == 0
    assert float(f["value"]) == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    assert f["region"] == "quantum_violation"


def test_chsh_vectors_json(capsys):
    s = "0.7071067811865476"
    code, out, _ = call(capsys, "chsh", "--a", "1,0", "--b", f"{s},{s}", "--c", f"{s},-{s}", "--d", "0,1", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["theta_bc"] == pytest.approx(math.pi / 2)
    assert data["factor_form"]["cosine_factor"] == pytest.approx(1.0)


def test_lhv_check_vertices_reports_real_counts(capsys):
    code, out, _ = call(capsys, "lhv", "--check-vertices")
    f = fields(out)
    assert code == 0
    assert f["summary"] == "60/64 Wigner vertices satisfy P12 + P23 >= P13; 16/16 CHSH terms equal 2"
    assert f["anticorrelated_vertices_satisfied"] == "8"


def test_lhv_enumerate_and_assignments(capsys):
    code, out, _ = call(capsys, "--format", "json", "lhv", "--enumerate", "--anticorrelated")
    assert code == 0 and len(json.loads(out)["domains"]) == 8
    code, out, _ = call(capsys, "lhv", "--assignments", "++++", "+-+-", "--format", "json")
    assert code == 0 and json.loads(out)["chsh_value"] == 0.0


def test_lhv_distribution(tmp_path, capsys):
    path = tmp_path / "d.json"
    path.write_text(json.dumps([1 / 64] * 64))
    code, out, _ = call(capsys, "lhv", "--distribution", str(path))
    assert code == 0 and fields(out)["satisfied"] == "true"


def test_wigner_requires_convention(capsys):
    code, _, err = call(capsys, "wigner", "--theta12", "pi/3", "--theta23", "pi/3", "--theta13", "2pi/3")
    assert code == 2 and "convention" in err


def test_wigner_violation(capsys):
    code, out, _ = call(capsys, "wigner", "--theta12", "60", "--theta23", "60", "--theta13", "120",
                        "--degrees", "--convention", "spin")
    f = fields(out)
    assert code == 0 and f["satisfied"] == "false"
    assert float(f["lhs"]) == pytest.approx(0.25)


def test_wigner_config_file(tmp_path, capsys):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"theta_12": 1.0, "theta_23": 1.0, "theta_13": 2.0}))
    assert call(capsys, "wigner", "--config", str(path))[0] == 2
    assert call(capsys, "wigner", "--config", str(path), "--convention", "photon")[0] == 0


@pytest.mark.parametrize(
    "argv, option",
    [
        (["angle", "--x", "1,zz", "--y", "1,0"], "--x"),
        (["angle", "--x", "1,0", "--y", "2,0"], "y"),
        (["chsh", "--family", "--phi", "quarter"], "--phi"),
        (["sample", "--theta", "7"], "theta"),
        (["optrig", "--matrix", "1,2;3"], "--matrix"),
        (["gram", "--cos", "0.1,0.2"], "--cos"),
    ],
)
def test_domain_errors_exit_1_and_name_argument(capsys, argv, option):
    code, out, err = call(capsys, *argv)
    assert code == 1
    assert out == ""
    assert option in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nosuch"],
        ["--tol", "bogus=1", "angle", "--x", "1,0", "--y", "1,0"],
        ["--tol", "angle", "angle", "--x", "1,0", "--y", "1,0"],
        ["sample", "--theta", "1", "--n", "many"],
        ["sweep", "--family", "chsh_planar_grid"],
        ["chsh"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_tolerance_override(capsys):
    argv = ["angle", "--x", "1,0", "--y", "1.000001,0"]
    assert call(capsys, *argv)[0] == 1
    assert call(capsys, "--tol", "angle=1e-5", *argv)[0] == 0
    assert call(capsys, *argv, "--tol", "angle=1e-5")[0] == 0


def test_options_before_and_after_subcommand(capsys):
    a = call(capsys, "--seed", "5", "sample", "--theta", "1", "--n", "1000")[1]
    b = call(capsys, "sample", "--theta", "1", "--n", "1000", "--seed", "5")[1]
    c = call(capsys, "sample", "--theta", "1", "--n", "1000")[1]
    assert a == b != c


def test_env_seed_fallback(capsys, monkeypatch):
    base = ["sample", "--theta", "1", "--n", "1000"]
    flag = call(capsys, *base, "--seed", "9")[1]
    monkeypatch.setenv("BELLTRIG_SEED", "9")
    assert call(capsys, *base)[1] == flag
    assert call(capsys, *base, "--seed", "0")[1] != flag  # flag wins
    monkeypatch.setenv("BELLTRIG_SEED", "nine")
    assert call(capsys, *base)[0] == 2


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, stdout, err = call(capsys, "sweep", "--family", "wigner_coplanar", "--convention", "spin",
                             "--range", "0:pi:pi/12", "--range", "0:pi:pi/12", "--out", str(out))
    assert code == 0 and stdout == "" and "169 records" in err
    names, recs = atlas.read_atlas(out)
    assert names == ["theta_12", "theta_23"] and len(recs) == 169


def test_sweep_unwritable_path(tmp_path, capsys):
    code, _, err = call(capsys, "sweep", "--family", "chsh_planar_family", "--out", str(tmp_path / "no" / "a.csv"))
    assert code == 1 and err


def test_boundary_and_maximize(capsys):
    code, out, _ = call(capsys, "--format", "json", "boundary")
    roots = json.loads(out)["crossings"]
    assert code == 0 and len(roots) == 4
    code, out, _ = call(capsys, "maximize", "--dim", "2", "--starts", "2", "--format", "json")
    assert code == 0 and json.loads(out)["best_value"] == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_optrig(capsys):
    code, out, _ = call(capsys, "optrig", "--matrix", "[[1,0],[0,4]]", "--matrix-b", "2,0;0,3", "--numeric")
    f = fields(out)
    assert code == 0
    assert float(f["cos_phi"]) == pytest.approx(0.8) and float(f["sin_phi"]) == pytest.approx(0.6)
    assert float(f["cos_phi_numeric"]) == pytest.approx(0.8, abs=1e-9)
    assert f["accretivity.accretive"] == "true"


def test_csv_output_format(capsys):
    code, out, _ = call(capsys, "--format", "csv", "chsh", "--bound", "--phi", "pi/2")
    header, row = out.strip().split("\n")
    assert header == "phi,bound"
    assert row.split(",")[1] == "2.8284271247461898"


def test_numbers_have_17_significant_digits():
    assert to_json({"x": 0.1, "y": [1.0 / 3.0]}) == '{\n  "x": 0.10000000000000001,\n  "y": [0.33333333333333331]\n}'


def test_every_subcommand_has_help_with_formula():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == {
        "angle", "gram", "optrig", "wigner", "chsh", "lhv", "sample", "sweep", "maximize", "boundary"
    }
    for name, p in sub.choices.items():
        assert p.description and any(ch in p.description for ch in "=<>"), name


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "belltrig", "chsh", "--bound", "--phi", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "bound: 2" in res.stdout
