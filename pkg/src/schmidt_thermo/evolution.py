"""Exact propagation of the global pure state on a uniform time grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemSpec, build_total_hamiltonian
from .numerics import PreconditionError, dagger, expm_hermitian_prop, hermitian_eig


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (K+1, N1*N2)
    spec: SystemSpec

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def index_of(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))

    def reduced_states(self, subsystem: int) -> np.ndarray:
        return reduced_states(self.states, self.spec.dims, subsystem)

    def energies(self) -> np.ndarray:
        h = build_total_hamiltonian(self.spec)
        return np.real(np.einsum("ki,ij,kj->k", self.states.conj(), h, self.states))


def grid_size(t_max: float, dt: float) -> int:
    if not dt > 0:
        raise PreconditionError(f"dt must be > 0, got {dt}")
    if t_max < 0:
        raise PreconditionError(f"t_max must be >= 0, got {t_max}")
    k = int(round(t_max / dt))
    if abs(k * dt - t_max) > 1e-9 * max(1.0, t_max):
        raise PreconditionError(f"t_max={t_max} is not an integer multiple of dt={dt}")
    return k


def propagate(spec: SystemSpec, t_max: float, dt: float) -> Trajectory:
    """Apply the one-step propagator ``exp(-i H dt)`` repeatedly from ``phi1_0 x phi2_0``."""
    n_steps = grid_size(t_max, dt)
    step = expm_hermitian_prop(build_total_hamiltonian(spec), dt)
    states = np.empty((n_steps + 1, spec.N1 * spec.N2), dtype=complex)
    states[0] = spec.initial_state()
    for k in range(n_steps):
        states[k + 1] = step @ states[k]
    drift = np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0))
    if drift > 1e-9:
        raise RuntimeError(f"norm drift {drift:.3g} exceeds 1e-9")
    return Trajectory(np.arange(n_steps + 1) * dt, states, spec)


def propagators(spec: SystemSpec, times: np.ndarray) -> np.ndarray:
    """``exp(-i H t)`` for every ``t`` in ``times``, shape ``(len(times), D, D)``."""
    w, v = hermitian_eig(build_total_hamiltonian(spec))
    phases = np.exp(-1j * np.outer(times, w))
    return np.einsum("ij,kj,lj->kil", v, phases, v.conj())


def reduced_states(psi: np.ndarray, dims: tuple[int, int], subsystem: int) -> np.ndarray:
    """Partial traces of one state ``(D,)`` or a stack ``(K, D)``."""
    n1, n2 = dims
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != n1 * n2:
        raise PreconditionError(f"state dimension {psi.shape[-1]} != N1*N2 = {n1 * n2}")
    c = psi.reshape(psi.shape[:-1] + (n1, n2))
    if subsystem == 1:
        return c @ dagger(c)
    if subsystem == 2:
        return np.swapaxes(c, -1, -2) @ c.conj()
    raise PreconditionError(f"subsystem must be 1 or 2, got {subsystem}")


def reduced_state(psi: np.ndarray, dims: tuple[int, int], subsystem: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise PreconditionError("reduced_state takes a single state vector")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise PreconditionError(f"state is not normalized (norm = {norm:.15g})")
    return reduced_states(psi, dims, subsystem)
