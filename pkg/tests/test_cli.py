import json
import subprocess
import sys

import numpy as np
import pytest

from schmidt_thermo.cli import build_parser, main, resolve_scenario
from schmidt_thermo.verification import CRITERIA

FREE_SCENARIO = "name: tq1_free\nsystem: {builtin: TQ1, lambda: 0.0}\nrun: {t_max: 2.0, dt: 0.001}\nmc: {n_samples: 5000, seed: 7}\n"


def _report(path):
    return json.loads((path / "report.json").read_text())


def test_models_lists_builtins(capsys):
    assert main(["models"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == ["TQ1", "QUTRIT1", "JC_TRUNC"]


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "schmidt_thermo", "models"], capture_output=True, text=True)
    assert out.returncode == 0 and "JC_TRUNC" in out.stdout


def test_scenario_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("system: {builtin: TQ1\nrun: [\n")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "parse error" in capsys.readouterr().err
    assert main(["verify"]) == 2
    assert main(["verify", "--model", "FOO"]) == 2
    assert main(["verify", str(bad), "--model", "TQ1"]) == 2
    assert main(["verify", "--model", "TQ1", "--dt", "-1"]) == 2
    assert not (tmp_path / "o").exists()


def test_flags_override_file(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(FREE_SCENARIO)
    args = build_parser().parse_args(["run", str(path), "--dt", "0.002", "--mc-samples", "10", "--seed", "3"])
    sc = resolve_scenario(args)
    assert (sc.dt, sc.t_max, sc.mc_samples, sc.seed) == (0.002, 2.0, 10, 3)


def test_probe_gauge(capsys, tmp_path):
    assert main(["probe-gauge", "--model", "TQ1", "--t-max", "4", "--out", str(tmp_path)]) == 0
    diag = json.loads(capsys.readouterr().out)
    assert diag["degeneracy_flags"] == 0
    assert diag["rank_transitions"] == [0.001]
    assert json.loads((tmp_path / "gauge.json").read_text()) == diag


def test_decoupled_run_writes_flat_series(tmp_path):
    path = tmp_path / "free.yaml"
    path.write_text(FREE_SCENARIO)
    out = tmp_path / "out"
    assert main(["run", str(path), "--out", str(out), "--no-refine"]) == 0
    for name in ("schmidt", "energy", "thermo", "residuals"):
        header = (out / f"{name}.csv").read_text().splitlines()[0]
        assert header.startswith("t,")
    data = np.genfromtxt(out / "thermo.csv", delimiter=",", names=True)
    for col in ("dQ1", "dW1", "dQ2", "dW2", "Q1", "W1", "Q2", "W2", "dQ_int", "dW_int"):
        assert np.nanmax(np.abs(data[col])) < 1e-8
    energy = np.genfromtxt(out / "energy.csv", delimiter=",", names=True)
    assert np.nanmax(np.abs(energy["E1_plus_E2"] - energy["H0"])) < 1e-6
    report = _report(out)
    assert report["summary"]["all_passed"] and report["summary"]["fail"] == 0


def test_series_are_byte_identical_across_runs(tmp_path):
    path = tmp_path / "free.yaml"
    path.write_text(FREE_SCENARIO.replace("lambda: 0.0", "lambda: 0.5").replace("t_max: 2.0", "t_max: 1.0"))
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        main(["run", str(path), "--out", str(out), "--no-refine", "--mc-samples", "2000"])
    for name in ("schmidt.csv", "energy.csv", "thermo.csv", "residuals.csv", "report.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_csv_values_round_trip_exactly(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(FREE_SCENARIO.replace("lambda: 0.0", "lambda: 0.5").replace("t_max: 2.0", "t_max: 0.2"))
    main(["run", str(path), "--out", str(tmp_path), "--no-refine", "--mc-samples", "100"])
    from schmidt_thermo.model import load_scenario
    from schmidt_thermo.verification import simulate

    sc = load_scenario(path)
    sim = simulate(sc.system, sc.t_max, sc.dt)
    data = np.loadtxt(tmp_path / "schmidt.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1:3], sim.st.s**2)


def test_halving_dt_quarters_residuals(tmp_path):
    reports = []
    for dt in ("1e-3", "5e-4"):
        out = tmp_path / dt
        main(["verify", "--model", "TQ1", "--t-max", "4", "--dt", dt, "--mc-samples", "2000", "--no-refine",
              "--out", str(out)])
        reports.append({c["id"]: c for c in _report(out)["checks"]})
    for cid in ("C2.energy_conservation", "C3.flux_balance", "C3.first_law_2", "C9.ds_equals_im_z"):
        ratio = reports[0][cid]["residual"] / reports[1][cid]["residual"]
        assert 3.5 < ratio < 4.5, cid


def test_default_tq1_run_passes(tmp_path):
    out = tmp_path / "tq1"
    assert main(["run", "--model", "TQ1", "--out", str(out)]) == 0
    report = _report(out)
    ids = [c["id"] for c in report["checks"]]
    assert len(ids) == len(set(ids))
    assert {c["criterion"] for c in report["checks"]} == set(CRITERIA)
    assert all(c["status"] == "pass" for c in report["checks"])
    for c in report["checks"]:
        assert set(c) >= {"id", "status", "residual", "tolerance", "coverage", "estimate", "stderr"}
    mc = [c for c in report["checks"] if c["id"] == "C5.phi_of_hamiltonian"][0]
    assert mc["stderr"] > 0
