import csv
import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from fockmorph.cli import EXIT_INVALID, EXIT_OK, EXIT_PROPERTY, main


def cfg(name):
    return str(resources.files("fockmorph") / "data" / "configs" / f"{name}.yaml")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_basis_tabular(capsys):
    code, out, _ = run(capsys, "basis", "--config", cfg("free-field"), "--format", "tabular")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0] == ["index", "particles", "n0", "n1"] and len(rows) == 11


def test_free_field_spectrum_lists_occupation_sums(capsys):
    code, out, _ = run(capsys, "spectrum", "--config", cfg("free-field"))
    rep = json.loads(out)
    expect = sorted(a + 2 * b for a in range(4) for b in range(4) if a + b <= 3)
    assert code == EXIT_OK
    assert rep["eigenvalues"] == pytest.approx(expect, abs=1e-12)
    assert rep["checks"]["eigen_residual"]["passed"]


def test_tabular_floats_have_17_significant_digits(capsys):
    _, out, _ = run(capsys, "spectrum", "--config", cfg("cutoff-polynomial"), "--format", "tabular")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    for _, val in rows:
        assert float(format(float(val), ".17g")) == float(val)
        assert val == format(float(val), ".17g")


def test_cutoff_polynomial_ess_report(capsys):
    code, out, _ = run(capsys, "ess", "--config", cfg("cutoff-polynomial"))
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["ess"]["method"] == "hvz_recursion"
    assert rep["checks"]["witness_defect"]["value"] <= 1e-9
    assert rep["checks"]["witness_defect"]["tolerance"] == 1e-9


def test_pauli_fierz_form_bound_report(capsys):
    code, out, _ = run(capsys, "spectrum", "--config", cfg("pauli-fierz"))
    rep = json.loads(out)
    cs = [r["constant"] for r in rep["form_bound"]]
    assert [r["r"] for r in rep["form_bound"]] == [1, 10, 100]
    assert cs[0] >= cs[1] >= cs[2]
    assert rep["checks"]["form_bound_constant_nonincreasing_in_r"]["passed"]
    assert rep["checks"]["form_bound_corrected_constant"]["passed"]
    # the squared constant is smaller than the optimal one at r = 10 and 100
    assert not rep["checks"]["form_bound_stated_constant_exact"]["passed"]
    assert code == EXIT_PROPERTY


@pytest.mark.parametrize("name", ["free-field", "cutoff-polynomial"])
def test_mourre_and_trotter(capsys, name):
    code, out, _ = run(capsys, "mourre", "--config", cfg(name), "--jobs", "2")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["checks"]["numeric_within_theory_union_point_spectrum"]["passed"]
    code, out, _ = run(capsys, "trotter", "--config", cfg(name))
    assert code == EXIT_OK and "errors" in json.loads(out)["trotter"]


def test_verify_selected_suites(capsys):
    code, out, _ = run(capsys, "verify", "ccr", "morphism", "--seed", "7")
    rep = json.loads(out)
    assert code == EXIT_OK and {e["suite"] for e in rep["ledger"]} == {"ccr", "morphism"}
    ccr = [e for e in rep["ledger"] if e["suite"] == "ccr" and e["tolerance"] == 1e-10]
    assert max(e["defect"] for e in ccr) <= 1e-10


def test_out_directory(tmp_path, capsys):
    code, _, _ = run(capsys, "trotter", "--config", cfg("free-field"), "--out", str(tmp_path), "--format", "tabular")
    assert code == EXIT_OK and (tmp_path / "trotter.csv").exists()
    run(capsys, "basis", "--config", cfg("free-field"), "--out", str(tmp_path))
    assert json.loads((tmp_path / "report.json").read_text())["command"] == "basis"


def test_reports_are_deterministic_and_untimed(capsys):
    a = run(capsys, "mourre", "--config", cfg("free-field"))[1]
    b = run(capsys, "mourre", "--config", cfg("free-field"), "--jobs", "3")[1]
    assert a == b and "timing" not in a
    c = json.loads(run(capsys, "basis", "--config", cfg("free-field"), "--timing")[1])
    assert "timing_seconds" in c


def test_validation_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "verify", "nonsense")[0] == EXIT_INVALID
    assert run(capsys, "spectrum")[0] == EXIT_INVALID
    p = tmp_path / "bad.yaml"
    p.write_text("basis: {d: 2, n_max: 2, spin: 1}\none_particle: {h: [[1, 0], [0, 1]]}\n")
    code, _, err = run(capsys, "spectrum", "--config", str(p))
    assert code == EXIT_INVALID and "basis.spin" in err
    assert run(capsys, "ess", "--config", cfg("pauli-fierz"))[0] == EXIT_INVALID
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == EXIT_INVALID
    with pytest.raises(SystemExit) as e:
        main(["verify", "--seed", "x"])
    assert e.value.code == EXIT_INVALID


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fockmorph", "verify", "basis"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["passed"]
