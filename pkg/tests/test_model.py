import json

import numpy as np
import pytest
import yaml

from schmidt_thermo.model import (BUILTIN_MODELS, SIGMA_X, SIGMA_Z, ModelError, Scenario, ScenarioError,
                                  SystemSpec, build_total_hamiltonian, builtin_model, decode_complex, encode_complex,
                                  initial_energy, load_scenario, scenario_from_tree, scenario_to_tree)

E0 = np.array([1.0, 0.0])


def test_free_hamiltonian_kron_sum():
    spec = SystemSpec(SIGMA_Z / 2, SIGMA_Z / 2, np.eye(4), 0.0, E0, E0)
    assert np.allclose(build_total_hamiltonian(spec), np.diag([1, 0, 0, -1]))


def test_scalar_coupling():
    spec = SystemSpec(np.zeros((2, 2)), np.zeros((2, 2)), np.eye(4), 2.0, E0, E0)
    assert np.allclose(build_total_hamiltonian(spec), 2 * np.eye(4))


def test_tq1_hamiltonian_and_energy():
    spec = builtin_model("TQ1")
    expected = np.array([[1, 0, 0, 0.5], [0, 0, 0.5, 0], [0, 0.5, 0, 0], [0.5, 0, 0, -1]])
    assert spec.dims == (2, 2)
    assert np.allclose(build_total_hamiltonian(spec), expected)
    assert initial_energy(spec) == pytest.approx(1.0, abs=1e-15)


def test_builtins_construct_and_unknown_name():
    assert set(BUILTIN_MODELS) == {"TQ1", "QUTRIT1", "JC_TRUNC"}
    assert builtin_model("QUTRIT1").dims == (2, 3)
    assert builtin_model("JC_TRUNC").dims == (2, 8)
    assert builtin_model("JC_TRUNC", N2=4).dims == (2, 4)
    with pytest.raises(ModelError, match="available"):
        builtin_model("FOO")


def test_jc_uses_number_operator():
    spec = builtin_model("JC_TRUNC", N2=5)
    assert np.allclose(spec.H2, np.diag(np.arange(5)))


@pytest.mark.parametrize("field, value, match", [
    ("V", np.kron(SIGMA_X, np.array([[0, 1], [0, 0]])), "V is not hermitian"),
    ("H1", np.array([[0, 1j], [0, 0]]), "H1 is not hermitian"),
    ("phi1_0", np.array([1.0, 1.0]), "phi1_0 is not normalized"),
    ("V", np.eye(3), "expected N1\\*N2"),
])
def test_spec_validation_names_the_field(field, value, match):
    kwargs = dict(H1=SIGMA_Z, H2=SIGMA_Z, V=np.eye(4), lam=0.1, phi1_0=E0, phi2_0=E0)
    kwargs[field] = value
    with pytest.raises(ModelError, match=match):
        SystemSpec(**kwargs)


def test_spec_arrays_are_frozen():
    spec = builtin_model("TQ1")
    with pytest.raises(ValueError):
        spec.H1[0, 0] = 3


def test_scenario_validation():
    spec = builtin_model("TQ1")
    with pytest.raises(ScenarioError):
        Scenario(spec, dt=0.0)
    with pytest.raises(ScenarioError):
        Scenario(spec, t_max=1e-4, dt=1e-3)
    with pytest.raises(ScenarioError, match="unknown outputs"):
        Scenario(spec, outputs=("plots",))


def test_load_builtin_scenario(tmp_path):
    path = tmp_path / "tq1.yaml"
    path.write_text("system:\n  builtin: TQ1\nrun:\n  t_max: 10\n  dt: 0.001\n")
    sc = load_scenario(path)
    assert sc.t_max == 10 and sc.dt == 0.001 and sc.name == "tq1"
    assert sc.system.same_as(builtin_model("TQ1"))


def test_explicit_matrices_reproduce_builtin(tmp_path):
    sc = Scenario(builtin_model("TQ1"), name="explicit")
    path = tmp_path / "explicit.yaml"
    path.write_text(yaml.safe_dump(scenario_to_tree(sc, explicit=True)))
    loaded = load_scenario(path)
    assert loaded.system.same_as(builtin_model("TQ1"), atol=0)
    # JSON is a YAML subset, so the same loader reads it
    jpath = tmp_path / "explicit.json"
    jpath.write_text(json.dumps(scenario_to_tree(sc, explicit=True)))
    assert load_scenario(jpath).system.same_as(builtin_model("TQ1"), atol=0)


def test_non_hermitian_v_in_file_is_named(tmp_path):
    tree = scenario_to_tree(Scenario(builtin_model("TQ1")), explicit=True)
    bad = np.kron(SIGMA_X, SIGMA_X).astype(complex)
    bad[0, 3] = 2.0
    tree["system"]["V"] = encode_complex(bad)
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(tree))
    with pytest.raises(ScenarioError, match="V is not hermitian"):
        load_scenario(path)


def test_parse_errors_report_location(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("system: {builtin: TQ1\nrun: [\n")
    with pytest.raises(ScenarioError, match="line 2"):
        load_scenario(path)
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "missing.yaml")
    with pytest.raises(ScenarioError, match="missing 'system'"):
        scenario_from_tree({"run": {"dt": 0.1}})


def test_lambda_override():
    sc = scenario_from_tree({"system": {"builtin": "TQ1", "lambda": 0.0}})
    assert sc.system.lam == 0.0 and sc.system.name == "TQ1"


def test_real_two_by_two_is_not_read_as_pairs():
    real = decode_complex([[1.0, 2.0], [2.0, -1.0]], "H1", 2)
    np.testing.assert_array_equal(real, [[1, 2], [2, -1]])
    pairs = decode_complex([[[0, 0], [0, -1]], [[0, 1], [0, 0]]], "H1", 2)
    np.testing.assert_array_equal(pairs, [[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(decode_complex([1.0, 0.0], "phi1_0", 1), [1, 0])
    np.testing.assert_array_equal(decode_complex([[0, 1], [1, 0]], "phi1_0", 1), [1j, 1])
    with pytest.raises(ScenarioError, match="H1"):
        decode_complex([1.0, 2.0], "H1", 2)


def test_shipped_scenarios_load():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "scenarios"
    custom = load_scenario(root / "custom_qubits.yaml")
    np.testing.assert_array_equal(custom.system.H1, np.diag([1, -1]))
    assert custom.outputs == ("schmidt", "energy", "thermo")
    assert load_scenario(root / "tq1.yaml").system.same_as(builtin_model("TQ1"))
