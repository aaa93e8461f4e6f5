"""Bipartite Hamiltonians, initial product states and scenario files.

Product-basis ordering is subsystem-1-major everywhere in the package: the
basis vector ``|l1>|l2>`` has index ``l1 * N2 + l2``, which is what
``np.kron`` and a C-order ``reshape(N1, N2)`` produce.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .numerics import TOL, as_cmatrix, as_cvector, hermiticity_error


class ModelError(ValueError):
    pass


class ScenarioError(ValueError):
    pass


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |0> = (1, 0) is the sigma_z = +1 (upper) level
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


def lowering(n: int) -> np.ndarray:
    """Truncated annihilation operator, ``a|k> = sqrt(k)|k-1>``."""
    return np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)


def basis_vector(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return v


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Hamiltonian data ``H1 x 1 + 1 x H2 + lam V`` and the initial product state."""

    H1: np.ndarray
    H2: np.ndarray
    V: np.ndarray
    lam: float
    phi1_0: np.ndarray
    phi2_0: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        arrays = {}
        for key in ("H1", "H2", "V"):
            try:
                m = as_cmatrix(getattr(self, key), key)
            except ValueError as exc:
                raise ModelError(str(exc)) from None
            if m.shape[0] != m.shape[1]:
                raise ModelError(f"{key} is not square: shape {m.shape}")
            err = hermiticity_error(m)
            if err > TOL.tol_herm:
                raise ModelError(f"{key} is not hermitian (max |A - A^dag| = {err:.3g})")
            arrays[key] = m
        for key in ("phi1_0", "phi2_0"):
            try:
                arrays[key] = as_cvector(getattr(self, key), key)
            except ValueError as exc:
                raise ModelError(str(exc)) from None
            norm = np.linalg.norm(arrays[key])
            if abs(norm - 1.0) > TOL.tol_norm:
                raise ModelError(f"{key} is not normalized (norm = {norm:.15g})")
        n1, n2 = arrays["H1"].shape[0], arrays["H2"].shape[0]
        if arrays["V"].shape[0] != n1 * n2:
            raise ModelError(f"V has dimension {arrays['V'].shape[0]}, expected N1*N2 = {n1 * n2}")
        if arrays["phi1_0"].shape[0] != n1:
            raise ModelError(f"phi1_0 has dimension {arrays['phi1_0'].shape[0]}, expected N1 = {n1}")
        if arrays["phi2_0"].shape[0] != n2:
            raise ModelError(f"phi2_0 has dimension {arrays['phi2_0'].shape[0]}, expected N2 = {n2}")
        for key, m in arrays.items():
            m.setflags(write=False)
            object.__setattr__(self, key, m)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def N1(self) -> int:
        return self.H1.shape[0]

    @property
    def N2(self) -> int:
        return self.H2.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return self.N1, self.N2

    def with_coupling(self, lam: float) -> "SystemSpec":
        return replace(self, lam=lam)

    def free_hamiltonian(self, subsystem: int) -> np.ndarray:
        return self.H1 if subsystem == 1 else self.H2

    def initial_state(self) -> np.ndarray:
        return np.kron(self.phi1_0, self.phi2_0)

    def same_as(self, other: "SystemSpec", atol: float = 1e-14) -> bool:
        return self.dims == other.dims and abs(self.lam - other.lam) <= atol and all(
            np.allclose(getattr(self, k), getattr(other, k), atol=atol, rtol=0)
            for k in ("H1", "H2", "V", "phi1_0", "phi2_0")
        )


def build_total_hamiltonian(spec: SystemSpec) -> np.ndarray:
    n1, n2 = spec.dims
    return np.kron(spec.H1, np.eye(n2)) + np.kron(np.eye(n1), spec.H2) + spec.lam * spec.V


def initial_energy(spec: SystemSpec) -> float:
    psi = spec.initial_state()
    return float(np.real(psi.conj() @ build_total_hamiltonian(spec) @ psi))


def _tq1() -> SystemSpec:
    e0 = basis_vector(2, 0)
    return SystemSpec(
        H1=SIGMA_Z / 2, H2=SIGMA_Z / 2, V=np.kron(SIGMA_X, SIGMA_X), lam=0.5,
        phi1_0=e0, phi2_0=e0, name="TQ1",
    )


def _exchange_coupling(n2: int) -> np.ndarray:
    a = lowering(n2)
    return np.kron(SIGMA_PLUS, a) + np.kron(SIGMA_MINUS, a.conj().T)


def _qutrit1() -> SystemSpec:
    return SystemSpec(
        H1=SIGMA_Z / 2, H2=np.diag([1.0, 0.0, -1.0]).astype(complex), V=_exchange_coupling(3),
        lam=0.3, phi1_0=basis_vector(2, 0), phi2_0=basis_vector(3, 1), name="QUTRIT1",
    )


def _jc_trunc(n2: int = 8) -> SystemSpec:
    if n2 < 2:
        raise ModelError("JC_TRUNC needs N2 >= 2")
    # oscillator frequency 1, resonant with the sigma_z/2 qubit splitting
    h2 = np.diag(np.arange(n2, dtype=float)).astype(complex)
    return SystemSpec(
        H1=SIGMA_Z / 2, H2=h2, V=_exchange_coupling(n2), lam=0.1,
        phi1_0=basis_vector(2, 0), phi2_0=basis_vector(n2, 0), name="JC_TRUNC",
    )


BUILTIN_MODELS = {"TQ1": _tq1, "QUTRIT1": _qutrit1, "JC_TRUNC": _jc_trunc}

MODEL_SUMMARIES = {
    "TQ1": "two qubits, H1=H2=sz/2, V=sx(x)sx, lambda=0.5, initial |0>|0>",
    "QUTRIT1": "qubit x qutrit, H2=diag(1,0,-1), exchange coupling, lambda=0.3, initial |0>|1>",
    "JC_TRUNC": "qubit x truncated oscillator (N2=8), H2=a^dag a, lambda=0.1, initial |0>|vac>",
}


def builtin_model(name: str, **options) -> SystemSpec:
    """Built-in benchmark system by name; ``JC_TRUNC`` accepts ``N2=...``."""
    key = name.upper()
    if key not in BUILTIN_MODELS:
        raise ModelError(f"unknown model {name!r}; available: {', '.join(BUILTIN_MODELS)}")
    if key == "JC_TRUNC":
        return _jc_trunc(int(options.get("N2", 8)))
    if options:
        raise ModelError(f"model {key} takes no options, got {sorted(options)}")
    return BUILTIN_MODELS[key]()


@dataclass(frozen=True, eq=False)
class Scenario:
    system: SystemSpec
    t_max: float = 10.0
    dt: float = 1e-3
    outputs: tuple[str, ...] = ("schmidt", "energy", "thermo", "residuals")
    mc_samples: int = 100_000
    seed: int = 12345
    name: str = "scenario"

    def __post_init__(self):
        if not self.dt > 0:
            raise ScenarioError(f"run.dt must be > 0, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ScenarioError(f"run.t_max must be >= dt, got t_max={self.t_max}, dt={self.dt}")
        if self.mc_samples < 1:
            raise ScenarioError(f"mc.n_samples must be >= 1, got {self.mc_samples}")
        unknown = set(self.outputs) - set(OUTPUT_FAMILIES)
        if unknown:
            raise ScenarioError(f"unknown outputs {sorted(unknown)}; allowed: {list(OUTPUT_FAMILIES)}")


OUTPUT_FAMILIES = ("schmidt", "energy", "thermo", "residuals")


def decode_complex(obj, name: str, ndim: int) -> np.ndarray:
    """Nested lists -> complex array of rank ``ndim``.

    Leaves are either bare reals or ``[re, im]`` pairs; the expected rank
    decides which, so a real 2x2 matrix is not mistaken for two pairs.
    """
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name}: not a numeric array") from None
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == ndim:
        return arr.astype(complex)
    raise ScenarioError(f"{name}: unexpected shape {arr.shape}")


def encode_complex(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _system_from_tree(tree: dict[str, Any]) -> SystemSpec:
    if not isinstance(tree, dict):
        raise ScenarioError("system: expected a mapping")
    if "builtin" in tree:
        opts = {"N2": tree["N2"]} if "N2" in tree else {}
        spec = builtin_model(str(tree["builtin"]), **opts)
        if "lambda" in tree:
            spec = spec.with_coupling(float(tree["lambda"]))
        return spec
    missing = [k for k in ("H1", "H2", "V", "lambda", "phi1_0", "phi2_0") if k not in tree]
    if missing:
        raise ScenarioError(f"system: missing fields {missing}")
    fields = {k: decode_complex(tree[k], k, 1 if k.startswith("phi") else 2)
              for k in ("H1", "H2", "V", "phi1_0", "phi2_0")}
    for key, n in (("N1", fields["H1"].shape[0]), ("N2", fields["H2"].shape[0])):
        if key in tree and int(tree[key]) != n:
            raise ScenarioError(f"system.{key}={tree[key]} disagrees with matrix dimension {n}")
    return SystemSpec(lam=float(tree["lambda"]), name=str(tree.get("name", "custom")), **fields)


def scenario_from_tree(tree: dict[str, Any], name: str = "scenario") -> Scenario:
    if not isinstance(tree, dict):
        raise ScenarioError("scenario: top level must be a mapping")
    if "system" not in tree:
        raise ScenarioError("scenario: missing 'system'")
    try:
        system = _system_from_tree(tree["system"])
    except ModelError as exc:
        raise ScenarioError(f"system: {exc}") from None
    run = tree.get("run", {}) or {}
    mc = tree.get("mc", {}) or {}
    kwargs: dict[str, Any] = {"system": system, "name": str(tree.get("name", name))}
    if "t_max" in run:
        kwargs["t_max"] = float(run["t_max"])
    if "dt" in run:
        kwargs["dt"] = float(run["dt"])
    if "n_samples" in mc:
        kwargs["mc_samples"] = int(mc["n_samples"])
    if "seed" in mc:
        kwargs["seed"] = int(mc["seed"])
    if "outputs" in tree:
        kwargs["outputs"] = tuple(tree["outputs"])
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    """Read a YAML (or JSON) scenario file and validate it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"{path}: parse error{where}: {getattr(exc, 'problem', exc)}") from None
    return scenario_from_tree(tree, name=path.stem)


def scenario_to_tree(sc: Scenario, explicit: bool = True) -> dict[str, Any]:
    s = sc.system
    system: dict[str, Any]
    if explicit:
        system = {
            "name": s.name, "N1": s.N1, "N2": s.N2, "lambda": s.lam,
            "H1": encode_complex(s.H1), "H2": encode_complex(s.H2), "V": encode_complex(s.V),
            "phi1_0": encode_complex(s.phi1_0), "phi2_0": encode_complex(s.phi2_0),
        }
    else:
        system = {"builtin": s.name, "lambda": s.lam}
    return {
        "name": sc.name,
        "system": system,
        "run": {"t_max": sc.t_max, "dt": sc.dt},
        "mc": {"n_samples": sc.mc_samples, "seed": sc.seed},
        "outputs": list(sc.outputs),
    }


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_system(N1: int, N2: int, lam: float = 0.3, seed: int = 0, name: str = "RANDOM") -> SystemSpec:
    """Generic system: random hermitian H1, H2, non-factorizable V, random pure initial states."""
    rng = np.random.default_rng(seed)
    phi1 = rng.standard_normal(N1) + 1j * rng.standard_normal(N1)
    phi2 = rng.standard_normal(N2) + 1j * rng.standard_normal(N2)
    return SystemSpec(
        H1=random_hermitian(N1, rng, 0.5), H2=random_hermitian(N2, rng, 0.5),
        V=random_hermitian(N1 * N2, rng, 0.5), lam=lam,
        phi1_0=phi1 / np.linalg.norm(phi1), phi2_0=phi2 / np.linalg.norm(phi2), name=name,
    )
