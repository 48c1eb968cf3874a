import csv
import io
import json

import pytest

from app.main import main
from app.schemas.phase import PhasePoint

def run_json(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err

def error_document(err):
    """Last JSON line of stderr; log records may precede it."""
    for line in reversed(err.strip().splitlines()):
        try:
            doc = json.loads(line)
        except ValueError:
            continue
        if isinstance(doc, dict) and "error" in doc:
            return doc
    raise AssertionError(f"no error document in stderr: {err!r}")

def test_free_energy_json_document(capsys, free_energy):
    code, doc, _ = run_json(capsys, ["free-energy", "--tau", "0.3", "--t", "-0.02"])
    assert code == 0
    assert doc["schema"] == "ising2mm/1"
    assert doc["config"]["command"] == "free-energy"
    assert doc["config"]["parameters"]["tau"] == 0.3
    assert doc["method"] == "uv"
    expected = free_energy.F_eval(PhasePoint(tau=0.3, t=-0.02)).value
    assert doc["F"] == pytest.approx(expected, abs=1e-12)

def test_free_energy_lambda_method(capsys):
    code, uv, _ = run_json(capsys, ["free-energy", "--tau", "0.3", "--t", "-0.02"])
    code2, lam, _ = run_json(capsys, ["free-energy", "--tau", "0.3", "--t", "-0.02", "--method", "lambda"])
    assert code == code2 == 0
    assert lam["method"] == "lambda"
    assert lam["F"] == pytest.approx(uv["F"], abs=1e-9)

def test_positive_t_is_a_domain_error(capsys):
    code, doc, err = run_json(capsys, ["free-energy", "--tau", "0.3", "--t", "0.01"])
    assert code == 2
    assert doc is None
    error = error_document(err)
    assert error["error"] == "DomainError"
    assert error["region"] == "outside"

def test_beyond_critical_value_reports_region(capsys):
    code, _, err = run_json(capsys, ["sigma", "--tau", "0.3", "--t", "-0.2"])
    assert code == 2
    error = error_document(err)
    assert error["error"] == "BranchPointReached"
    assert error["region"] == "outside"
    assert error["t_critical"] < 0

def test_sigma_command(capsys):
    code, doc, _ = run_json(capsys, ["sigma", "--tau", "0.25", "--t", str(-5.0 / 72.0)])
    assert code == 0
    assert doc["hit_branch_point"] is True
    assert doc["sigma"] == pytest.approx(1.0, abs=1e-12)

def test_usage_error_exits_2(capsys):
    assert main(["free-energy", "--tau", "0.3"]) == 2
    assert main(["no-such-command"]) == 2

def test_sweep_csv_has_header_and_tau_major_rows(capsys):
    code = main(["sweep", "--tau-range", "0.2:0.4:2", "--t-range", "-0.5:-0.01:2", "--format", "csv"])
    out, _ = capsys.readouterr()
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == "tau,t,H,region,sigma,F"
    assert [(float(r["tau"]), float(r["t"])) for r in rows] == [(0.2, -0.5), (0.2, -0.01), (0.4, -0.5), (0.4, -0.01)]
    outside = [r for r in rows if r["region"] == "outside"]
    assert len(outside) == 2
    assert all(r["F"] == "" and r["sigma"] == "" for r in outside)
    assert all(r["F"] != "" for r in rows if r["region"] == "genus_zero_interior")

def test_malformed_range(capsys):
    code, _, err = run_json(capsys, ["sweep", "--tau-range", "0.2:0.4", "--t-range", "-0.1:-0.01:2"])
    assert code == 2
    assert error_document(err)["argument"] == "--tau-range"

def test_global_options_before_or_after_subcommand(capsys):
    assert main(["--format", "table", "sigma", "--tau", "0.3", "--t", "-0.02"]) == 0
    before, _ = capsys.readouterr()
    assert main(["sigma", "--tau", "0.3", "--t", "-0.02", "--format", "table"]) == 0
    after, _ = capsys.readouterr()
    assert before == after
    header = before.splitlines()[0].split()
    assert "sigma" in header and "region" in header

def test_out_writes_file(capsys, tmp_path):
    target = tmp_path / "phase.json"
    assert main(["phase", "--a", "1", "--b", "1", "--c", "1", "--out", str(target)]) == 0
    out, _ = capsys.readouterr()
    assert out == ""
    doc = json.loads(target.read_text())
    assert doc["region"] == "multicritical"
    assert doc["tau"] == pytest.approx(0.25)

def test_config_file_layers_under_flags(capsys, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("# sweep settings\nthreads=2\nseed=11\nformat=csv\n")
    code, doc, _ = run_json(capsys, ["sigma", "--tau", "0.3", "--t", "-0.02",
                                     "--config", str(config), "--threads", "3", "--format", "json"])
    assert code == 0
    assert doc["config"]["threads"] == 3
    assert doc["config"]["seed"] == 11
    assert doc["config"]["format"] == "json"
    assert doc["config"]["overrides"] == ["seed", "threads"]

def test_config_file_alone_sets_format(capsys, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("format=csv\n")
    assert main(["sigma", "--tau", "0.3", "--t", "-0.02", "--config", str(config)]) == 0
    out, _ = capsys.readouterr()
    assert out.startswith("tau,t,H,region")

@pytest.mark.parametrize("content", ["colour=blue\n", "threads=many\n"])
def test_bad_config_file(capsys, tmp_path, content):
    config = tmp_path / "run.conf"
    config.write_text(content)
    code, _, err = run_json(capsys, ["sigma", "--tau", "0.3", "--t", "-0.02", "--config", str(config)])
    assert code == 2
    assert error_document(err)["error"] == "DomainError"

def test_missing_config_file(capsys, tmp_path):
    code, _, err = run_json(capsys, ["sigma", "--tau", "0.3", "--t", "-0.02", "--config", str(tmp_path / "nope")])
    assert code == 2
    assert "not found" in error_document(err)["detail"]

def test_phase_surface(capsys):
    code, doc, _ = run_json(capsys, ["phase", "--surface", "high", "--b", "0.7", "--c", "0.5"])
    assert code == 0
    assert doc["discriminant_scaled"] < 1e-8

def test_phase_without_coordinates(capsys):
    code, _, _ = run_json(capsys, ["phase"])
    assert code == 2

def test_series_exact(capsys):
    code, doc, _ = run_json(capsys, ["series", "--tau", "1/2", "--exact", "--order", "3"])
    assert code == 0
    assert doc["series"]["exact"][1] == "-16/9"

def test_series_rejects_bad_fraction(capsys):
    code, _, _ = run_json(capsys, ["series", "--tau", "one half"])
    assert code == 2

def test_enumerate_exact(capsys):
    code, doc, _ = run_json(capsys, ["enumerate", "--vmax", "2", "--exact", "--graphs"])
    assert code == 0
    assert doc["enumeration"]["exact"][1] == "-16/9"
    assert doc["graph_sums"]["order1"] == pytest.approx(8.0)

def test_enumerate_cap(capsys):
    code, _, err = run_json(capsys, ["enumerate", "--vmax", "5"])
    assert code == 2
    assert error_document(err)["error"] == "CapExceeded"

def test_sigma_coeffs(capsys):
    code, doc, _ = run_json(capsys, ["sigma-coeffs", "--tau", "0.3", "--order", "8", "--ratio", "6"])
    assert code == 0
    coefficients = doc["coefficients"]
    assert len(coefficients["by_reversion"]) == 8
    assert coefficients["by_reversion"][0] == pytest.approx(3.0 / (0.09 - 1.0))
    assert doc["ratio"]["V"] == 6

def test_curve_branch_points(capsys):
    code, doc, _ = run_json(capsys, ["curve", "--a", "1.1", "--b", "0.85", "--c", "0.6"])
    assert code == 0
    assert 0 < doc["alpha"] < doc["beta"]
    assert doc["stationarity_decay"] >= 1.9

def test_curve_sextic_residual_csv(capsys):
    code = main(["curve", "--a", "1.1", "--b", "0.85", "--c", "0.6", "--emit", "sextic-residual", "--format", "csv"])
    out, _ = capsys.readouterr()
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 64
    assert max(float(r["residual"]) for r in rows) < 1e-8

def test_check_passes(capsys):
    code, doc, _ = run_json(capsys, ["check", "--suite", "discriminant", "--samples", "10", "--seed", "5"])
    assert code == 0
    assert doc["passed"] is True
    assert doc["seed"] == 5

def test_check_failure_exits_1_with_witnesses(capsys, monkeypatch):
    monkeypatch.setattr("app.services.checks.DISCRIMINANT_TOL", -1.0)
    code, doc, err = run_json(capsys, ["check", "--suite", "discriminant", "--samples", "4"])
    assert code == 1
    assert doc["passed"] is False
    error = error_document(err)
    assert error["error"] == "CertificateFailure"
    failures = error["witness"]["failures"]
    assert len(failures) == 4
    assert [f["surface"] for f in failures] == ["low", "high", "gamma_b", "low"]
    assert "b" not in failures[2]
