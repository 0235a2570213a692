"""CLI behavior: exit codes, frozen stdout lines, artifacts, config handling.

Everything runs in-process through main(argv) except one real subprocess
smoke test for the installed console script.
"""

import json
import subprocess
import sys

import pytest

from cavityspdc.cli import CATALOG_ENV_VAR, main

WORKED_SPECTRUM_ARGS = [
    "spectrum", "--material", "PPLN", "--interaction", "eoe",
    "--pump-nm", "780", "--poling-period-um", "144.31703969372734",
    "--temperature-c", "81.46", "--l-cm", "0.1", "--r1", "1.0",
    "--r2", "0.95", "--alpha-db-cm", "0.06",
    "--window-nm", "1559.9", "1561.9", "--detect-threshold", "0.5",
]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _catalog_file(tmp_path, name="cat.json"):
    entries = [{
        "material": "unobtainium",
        "axis": "e",
        "form": "constant",
        "coefficients": {"n": 2.0},
        "wavelength_range_um": [0.2, 10.0],
        "temperature_range_c": [-50, 500],
        "citation": "test fixture",
    }]
    path = tmp_path / name
    path.write_text(json.dumps(entries))
    return str(path)


def test_console_script_help_smoke():
    proc = subprocess.run(
        ["cavityspdc", "--help"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert "usage: cavityspdc" in proc.stdout
    for name in ("dispersion", "cavity", "spectrum", "design", "sweep"):
        assert name in proc.stdout


def test_no_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_dispersion_stdout(capsys):
    code, out, _ = run(
        ["dispersion", "--material", "PPLN", "--axis", "e",
         "--wavelength-nm", "1560", "--temperature-c", "80.14"],
        capsys,
    )
    assert code == 0
    assert "material = PPLN/e" in out
    assert "n = 2.139850300" in out
    assert "group_index = 2.184746215" in out


def test_dispersion_json_artifact(tmp_path, capsys):
    dest = tmp_path / "n.json"
    code, out, _ = run(
        ["dispersion", "--material", "PPKTP", "--axis", "z",
         "--wavelength-nm", "1560", "--temperature-c", "25",
         "--json-out", str(dest)],
        capsys,
    )
    assert code == 0
    assert f"wrote {dest}" in out
    doc = json.loads(dest.read_text())
    assert doc["n"] == pytest.approx(1.8156049160062257, rel=1e-12)
    assert doc["group_index"] == pytest.approx(1.8516577478009454, rel=1e-9)
    assert "Bierlein" in doc["citation"]


def test_dispersion_missing_parameter(capsys):
    code, _, err = run(
        ["dispersion", "--material", "PPLN", "--axis", "e", "--wavelength-nm", "1560"],
        capsys,
    )
    assert code == 2
    assert "missing required parameter" in err


def test_dispersion_validity_error_exit_code(capsys):
    code, _, err = run(
        ["dispersion", "--material", "PPLN", "--axis", "e",
         "--wavelength-nm", "90000", "--temperature-c", "80"],
        capsys,
    )
    assert code == 1
    assert err.startswith("error:")


def test_cavity_stdout_frozen(capsys):
    code, out, _ = run(
        ["cavity", "--l-cm", "0.1", "--r1", "1", "--r2", "0.95",
         "--alpha-db-cm", "0.06"],
        capsys,
    )
    assert code == 0
    assert "rho = 0.947378676" in out
    assert "finesse = 116.2268" in out
    assert "p_out = 0.949529" in out


def test_cavity_mode_figures_lines(capsys):
    code, out, _ = run(
        ["cavity", "--l-cm", "0.1", "--r1", "1", "--r2", "0.95",
         "--alpha-db-cm", "0.06",
         "--group-index-signal", "2.1847462149452192",
         "--group-index-idler", "2.2637712155157734"],
        capsys,
    )
    assert code == 0
    assert "fsr_signal_ghz = 68.610362" in out
    assert "fsr_idler_ghz = 66.215273" in out
    assert "mode_bandwidth_mhz = 580.010883" in out
    assert "coherence_time_ns = 0.548800" in out


def test_cavity_domain_error_exit_code(capsys):
    # rho below the finesse domain floor
    code, _, err = run(
        ["cavity", "--l-cm", "0.1", "--r1", "0.1", "--r2", "0.1"], capsys
    )
    assert code == 1
    assert err.startswith("error:")


def test_cavity_usage_error_exit_code(capsys):
    code, _, err = run(["cavity", "--l-cm", "0.1", "--r1", "1"], capsys)
    assert code == 2
    assert "missing required parameter" in err


def test_spectrum_artifacts(tmp_path, capsys):
    csv_path = tmp_path / "spec.csv"
    clusters_path = tmp_path / "clusters.json"
    svg_path = tmp_path / "spec.svg"
    code, out, _ = run(
        WORKED_SPECTRUM_ARGS
        + ["--csv-out", str(csv_path), "--clusters-out", str(clusters_path),
           "--svg-out", str(svg_path)],
        capsys,
    )
    assert code == 0
    assert "modes = 1" in out
    assert "clusters = 1" in out
    assert "cluster 0: center 1560.85" in out
    n_grid = int(next(l for l in out.splitlines() if l.startswith("grid_points")).split("=")[1])
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "lambda_s_nm,lambda_i_nm,airy_s,airy_i,phasematch,S"
    assert len(rows) == n_grid + 1
    report = json.loads(clusters_path.read_text())
    assert len(report) == 1
    assert report[0]["modes"][0]["center_nm"] == pytest.approx(1560.851, abs=1e-2)
    svg = svg_path.read_bytes()
    assert svg.startswith(b"<?xml") or b"<svg" in svg


def test_spectrum_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(WORKED_SPECTRUM_ARGS + ["--csv-out", str(a)], capsys)
    run(WORKED_SPECTRUM_ARGS + ["--threads", "3", "--csv-out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_spectrum_budget_error_exit_code(capsys):
    code, _, err = run(WORKED_SPECTRUM_ARGS + ["--max-points", "100"], capsys)
    assert code == 1
    assert "error:" in err


def test_spectrum_convolved_needs_fwhm(tmp_path, capsys):
    code, _, err = run(
        WORKED_SPECTRUM_ARGS + ["--convolved-csv-out", str(tmp_path / "c.csv")],
        capsys,
    )
    assert code == 2
    assert "convolve_fwhm_nm" in err


def _spectrum_config(tmp_path, **top_overrides):
    doc = {
        "command": "spectrum",
        "parameters": {
            "material": "PPLN", "interaction": "eoe", "pump_nm": 780.0,
            "poling_period_um": 144.31703969372734, "temperature_c": 81.46,
            "length_cm": 0.1, "r1": 1.0, "r2": 0.95, "alpha_db_cm": 0.06,
            "window_nm": [1559.9, 1561.9], "detect_threshold": 0.5,
        },
    }
    doc.update(top_overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_spectrum_config_matches_inline(tmp_path, capsys):
    cfg = _spectrum_config(tmp_path)
    code_cfg, out_cfg, _ = run(["spectrum", "--config", cfg], capsys)
    code_inl, out_inl, _ = run(WORKED_SPECTRUM_ARGS, capsys)
    assert code_cfg == code_inl == 0
    assert out_cfg == out_inl


def test_config_excludes_inline_flags(tmp_path, capsys):
    cfg = _spectrum_config(tmp_path)
    code, _, err = run(
        ["spectrum", "--config", cfg, "--material", "PPLN"], capsys
    )
    assert code == 2
    assert "excludes inline flags" in err


def test_config_command_mismatch(tmp_path, capsys):
    cfg = _spectrum_config(tmp_path)
    code, _, err = run(["cavity", "--config", cfg], capsys)
    assert code == 2
    assert "does not match" in err


def test_config_unknown_top_field(tmp_path, capsys):
    cfg = _spectrum_config(tmp_path, notes="hello")
    code, _, err = run(["spectrum", "--config", cfg], capsys)
    assert code == 2
    assert "unknown field" in err


def test_config_unknown_parameter(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "command": "cavity",
        "parameters": {"length_cm": 0.1, "r1": 1.0, "r2": 0.95, "bogus": 3},
    }))
    code, _, err = run(["cavity", "--config", str(path)], capsys)
    assert code == 2
    assert "unknown parameter" in err


def test_config_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(["cavity", "--config", str(path)], capsys)
    assert code == 2
    assert "invalid JSON" in err


def test_config_envelope_must_be_bool(tmp_path, capsys):
    cfg = _spectrum_config(tmp_path)
    doc = json.loads(open(cfg).read())
    doc["parameters"]["envelope"] = "yes"
    open(cfg, "w").write(json.dumps(doc))
    code, _, err = run(["spectrum", "--config", cfg], capsys)
    assert code == 2
    assert "true/false" in err


def test_catalog_flag_and_env_precedence(tmp_path, capsys, monkeypatch):
    cat = _catalog_file(tmp_path)
    query = ["dispersion", "--material", "unobtainium", "--axis", "e",
             "--wavelength-nm", "1560", "--temperature-c", "25"]
    # flag
    code, out, _ = run(query + ["--catalog", cat], capsys)
    assert code == 0 and "n = 2.000000000" in out
    # env var
    monkeypatch.setenv(CATALOG_ENV_VAR, cat)
    code, out, _ = run(query, capsys)
    assert code == 0 and "n = 2.000000000" in out
    # the flag wins over a broken env path
    monkeypatch.setenv(CATALOG_ENV_VAR, str(tmp_path / "missing.json"))
    code, out, _ = run(query + ["--catalog", cat], capsys)
    assert code == 0 and "n = 2.000000000" in out
    # broken env path alone is a config error
    code, _, err = run(query, capsys)
    assert code == 2
    assert "error:" in err


def test_config_catalog_path(tmp_path, capsys):
    cat = _catalog_file(tmp_path)
    path = tmp_path / "disp.json"
    path.write_text(json.dumps({
        "command": "dispersion",
        "parameters": {"material": "unobtainium", "axis": "e",
                       "wavelength_nm": 1560.0, "temperature_c": 25.0},
        "catalog_path": cat,
    }))
    code, out, _ = run(["dispersion", "--config", str(path)], capsys)
    assert code == 0
    assert "n = 2.000000000" in out


def test_design_subcommand(tmp_path, capsys):
    dest = tmp_path / "design.json"
    code, out, _ = run(
        ["design", "--material", "PPLN", "--interaction", "eoe",
         "--pump-nm", "780", "--target-nm", "1560", "--max-length-cm", "0.5",
         "--alpha-db-cm", "0.06", "--pinned-length-cm", "0.1",
         "--pinned-r2", "0.95", "--json-out", str(dest)],
        capsys,
    )
    assert code == 0
    assert "length_cm = 0.1" in out
    assert "temperature_c = 81.4600" in out
    assert "finesse = 116.2268" in out
    assert "p_out = 0.949529" in out
    assert "clusters = 2" in out
    doc = json.loads(dest.read_text())
    assert doc["poling_period_um"] == pytest.approx(144.317040, rel=1e-6)
    assert all(len(c["modes"]) == 1 for c in doc["clusters"])


def test_design_domain_error_exit_code(capsys):
    # empty tuning window: a physics failure, not a usage failure
    code, _, err = run(
        ["design", "--material", "PPLN", "--interaction", "eoe",
         "--pump-nm", "780", "--target-nm", "1560", "--max-length-cm", "0.5",
         "--alpha-db-cm", "0.06", "--pinned-length-cm", "0.1",
         "--pinned-r2", "0.95", "--operating-temperature-c", "75",
         "--tune-halfwidth-c", "0.2"],
        capsys,
    )
    assert code == 1
    assert "error:" in err


def test_sweep_finesse_curve(tmp_path, capsys):
    dest = tmp_path / "f.csv"
    code, out, _ = run(
        ["sweep", "--kind", "finesse_curve", "--pump-nm", "780",
         "--material", "PPLN", "--interaction", "eoe",
         "--from-nm", "1540", "--to-nm", "1580", "--n-points", "11",
         "--temperature-c", "80.14", "--csv-out", str(dest)],
        capsys,
    )
    assert code == 0
    assert "points = 11" in out
    assert "finite = 11" in out
    rows = dest.read_text().splitlines()
    assert rows[0] == "lambda_s_nm,f_m1"
    assert len(rows) == 12


def test_sweep_cavity(tmp_path, capsys):
    dest = tmp_path / "cav.csv"
    code, out, _ = run(
        ["sweep", "--kind", "cavity", "--param", "r2",
         "--start", "0.5", "--stop", "0.99", "--n-points", "5",
         "--l-cm", "0.1", "--alpha-db-cm", "0.06", "--csv-out", str(dest)],
        capsys,
    )
    assert code == 0
    assert "points = 5" in out
    rows = dest.read_text().splitlines()
    assert rows[0] == "r2,finesse,p_out"
    finesses = [float(r.split(",")[1]) for r in rows[1:]]
    assert finesses == sorted(finesses)


def test_sweep_cavity_missing_base(capsys):
    code, _, err = run(
        ["sweep", "--kind", "cavity", "--param", "r2",
         "--start", "0.5", "--stop", "0.9"],
        capsys,
    )
    assert code == 2
    assert "missing base value" in err


def test_sweep_bad_kind_in_config(tmp_path, capsys):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"command": "sweep", "parameters": {"kind": "sideways"}}))
    code, _, err = run(["sweep", "--config", str(path)], capsys)
    assert code == 2
    assert "finesse_curve" in err


def test_unwritable_output_exit_code(tmp_path, capsys):
    dest = tmp_path / "no-such-dir" / "x.json"
    code, out, err = run(
        ["dispersion", "--material", "PPLN", "--axis", "e",
         "--wavelength-nm", "1560", "--temperature-c", "80",
         "--json-out", str(dest)],
        capsys,
    )
    assert code == 1
    assert "cannot write output" in err
    assert not dest.exists()
    # the computation itself succeeded before the write failed
    assert "n = " in out
