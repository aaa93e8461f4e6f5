"""Internal energies, heat and work rates, and the interaction bookkeeping.

Rates use central differences on the uniform grid.  Heat rates need the
radius-1 stencil, work rates (a derivative of a derivative) radius 2;
entries whose stencil is unavailable are NaN.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .effective import LocalGenerator
from .evolution import Trajectory
from .lindblad import _check_window, central_difference
from .model import SystemSpec
from .schmidt import SchmidtTrajectory


def _diag(basis: np.ndarray, op: np.ndarray, r: int) -> np.ndarray:
    """``Re <phi_l| op |phi_l>`` for the first ``r`` columns; ``op`` may be a stack."""
    b = basis[..., :r]
    if op.ndim == 2:
        return np.real(np.einsum("...al,ab,...bl->...l", b.conj(), op, b))
    return np.real(np.einsum("...al,...ab,...bl->...l", b.conj(), op, b))


def _z(B1: np.ndarray, B2: np.ndarray, psi: np.ndarray, spec: SystemSpec, r: int) -> np.ndarray:
    n1, n2 = spec.dims
    vpsi = (psi @ (spec.lam * spec.V).T).reshape(psi.shape[:-1] + (n1, n2))
    return np.einsum("...al,...ab,...bl->...l", B1[..., :r].conj(), vpsi, B2[..., :r].conj())


def internal_energy(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> float:
    rho = st.frames[k].reduced_state(gen.subsystem)
    return float(np.real(np.trace(rho @ gen.H_eff[k])))


def _diag_H(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> np.ndarray:
    r = st.s.shape[1]
    return _diag(st.basis(gen.subsystem)[k], gen.H_eff[k], r)


def heat_rate(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> float:
    """``sum_l d(s_l^2)/dt <phi_l|H^(j)|phi_l>``."""
    _check_window(st, k)
    m = int(st.M[k])
    ds2 = central_difference(st.s**2, k, st.dt)[:m]
    return float(ds2 @ _diag_H(st, gen, k)[:m])


def heat_rate_trace(st: SchmidtTrajectory, gen: LocalGenerator, k: int, rho_series=None) -> float:
    """``Tr(d rho_j/dt H^(j))`` with ``d rho/dt`` by central difference."""
    _check_window(st, k)
    rho = st.rho(gen.subsystem) if rho_series is None else rho_series
    return float(np.real(np.trace(central_difference(rho, k, st.dt) @ gen.H_eff[k])))


def work_rate(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> float:
    """``sum_l s_l^2 d/dt <phi_l|H^(j)|phi_l>`` (radius-2 stencil)."""
    _check_window(st, k, 2)
    m = int(st.M[k])
    d = (_diag_H(st, gen, k + 1) - _diag_H(st, gen, k - 1)) / (2 * st.dt)
    return float(st.s[k, :m] ** 2 @ d[:m])


def work_rate_trace(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> float:
    """``Tr(rho_j dH^(j)/dt)`` with ``dH/dt`` a central difference of the generator series."""
    _check_window(st, k, 2)
    rho = st.frames[k].reduced_state(gen.subsystem)
    return float(np.real(np.trace(rho @ central_difference(gen.H_eff, k, st.dt))))


def z_series(traj: Trajectory, st: SchmidtTrajectory, k: int, l: int | None = None):
    """``z_l = <phi_l^(1) phi_l^(2)| lam V |Psi(t_k)>``; all ``l < min(N1, N2)`` if ``l`` is None."""
    r = st.s.shape[1]
    z = _z(st.B1[k], st.B2[k], traj.states[k], traj.spec, r)
    return z if l is None else complex(z[l])


def heat_split(st: SchmidtTrajectory, gens, spec: SystemSpec, k: int) -> tuple[float, float, float]:
    """``(dQ_F1, dQ_F2, dQ_int)``: free-Hamiltonian heat per side and the interaction part."""
    _check_window(st, k)
    m = int(st.M[k])
    r = st.s.shape[1]
    ds2 = central_difference(st.s**2, k, st.dt)[:m]
    qf1 = float(ds2 @ _diag(st.B1[k], spec.H1, r)[:m])
    qf2 = float(ds2 @ _diag(st.B2[k], spec.H2, r)[:m])
    z = _z(st.B1[k], st.B2[k], st.frames[k].state(), spec, r)[:m]
    return qf1, qf2, float(np.imag(np.sum(z**2)))


def work_total_int(st: SchmidtTrajectory, spec: SystemSpec, k: int) -> float:
    """Interaction work rate ``sum_l s_l Re(dz_l/dt) - Im(sum_l z_l^2)/2``.

    This equals the summed work rate of both subsystems only when
    ``sum_l s_l^2 d/dt(<H1>_l + <H2>_l)`` vanishes (see :func:`free_drift_rate`).
    """
    _check_window(st, k)
    m = int(st.M[k])
    r = st.s.shape[1]
    zs = [_z(st.B1[i], st.B2[i], st.frames[i].state(), spec, r)[:m] for i in (k - 1, k, k + 1)]
    dz = (zs[2] - zs[0]) / (2 * st.dt)
    return float(st.s[k, :m] @ np.real(dz) - 0.5 * np.imag(np.sum(zs[1] ** 2)))


def free_drift_rate(st: SchmidtTrajectory, spec: SystemSpec, k: int) -> float:
    """``sum_l s_l^2 d/dt(<phi_l|H1|phi_l> + <phi_l|H2|phi_l>)``."""
    _check_window(st, k)
    m = int(st.M[k])
    r = st.s.shape[1]
    f = [_diag(st.B1[i], spec.H1, r) + _diag(st.B2[i], spec.H2, r) for i in (k - 1, k + 1)]
    return float(st.s[k, :m] ** 2 @ ((f[1] - f[0]) / (2 * st.dt))[:m])


def diagonal_identity_residual(traj: Trajectory, st: SchmidtTrajectory, gens, spec: SystemSpec,
                        k: int, l: int) -> float:
    """Residual of ``<H^(1)>_l + <H^(2)>_l = <H1>_l + <H2>_l + Re(z_l)/s_l``."""
    _check_window(st, k)
    s = st.s[k, l]
    if s**2 <= st.eps_rank:
        warnings.warn(f"s_{l} below eps_rank at t={st.times[k]:.6g}; identity skipped", stacklevel=2)
        return float("nan")
    g1, g2 = gens
    r = st.s.shape[1]
    lhs = _diag_H(st, g1, k)[l] + _diag_H(st, g2, k)[l]
    free = _diag(st.B1[k], spec.H1, r)[l] + _diag(st.B2[k], spec.H2, r)[l]
    z = z_series(traj, st, k, l)
    return float(abs(lhs - free - z.real / s))


def _fd(series: np.ndarray, dt: float, mask: np.ndarray) -> np.ndarray:
    out = np.full(series.shape, np.nan, dtype=series.dtype)
    ks = np.flatnonzero(mask)
    out[ks] = (series[ks + 1] - series[ks - 1]) / (2 * dt)
    return out


def cumulative_trapezoid(times: np.ndarray, rate: np.ndarray) -> np.ndarray:
    """Running integral of ``rate``; NaN gaps are bridged by linear interpolation."""
    ok = np.isfinite(rate)
    if not ok.any():
        return np.full(times.shape, np.nan)
    filled = np.interp(times, times[ok], rate[ok])
    out = np.zeros_like(times)
    out[1:] = np.cumsum(0.5 * (filled[1:] + filled[:-1]) * np.diff(times))
    return out


@dataclass(frozen=True, eq=False)
class ThermoRecord:
    times: np.ndarray
    energy_total0: float
    E: dict  # j -> internal energy <H^(j)(t)>
    E_can: dict  # j -> energy with the traceless (canonical) generator
    dE: dict
    dQ: dict  # sum form
    dQ_trace: dict
    dW: dict  # sum form
    dW_trace: dict
    dQ_can: dict
    dW_can: dict
    Q: dict
    W: dict
    dQ_F: dict
    dQ_int: np.ndarray
    dW_int: np.ndarray  # interaction-work formula
    free_drift: np.ndarray
    z: np.ndarray  # (K+1, r), zero for l >= M
    ds_dt: np.ndarray  # (K+1, r)
    diagonal_residual: np.ndarray  # (K+1, r), NaN outside support / stencil
    valid1: np.ndarray
    valid2: np.ndarray

    def first_law_residual(self, j: int) -> np.ndarray:
        return self.dE[j] - self.dQ[j] - self.dW[j]

    def flux_balance_residual(self) -> np.ndarray:
        return self.dE[1] + self.dE[2]

    def energy_residual(self) -> np.ndarray:
        return self.E[1] + self.E[2] - self.energy_total0

    def total_heat_rate(self) -> np.ndarray:
        return self.dQ[1] + self.dQ[2]

    def total_work_rate(self) -> np.ndarray:
        return self.dW[1] + self.dW[2]


def thermo_record(traj: Trajectory, st: SchmidtTrajectory, gens: dict) -> ThermoRecord:
    """All thermodynamic series on the grid, computed from aligned Schmidt frames."""
    spec = traj.spec
    dt = st.dt
    r = st.s.shape[1]
    v1, v2 = st.valid(1), st.valid(2)
    s, s2 = st.s, st.s**2
    support = np.arange(r)[None, :] < st.M[:, None]
    ds2 = _fd(s2, dt, v1)
    E, E_can, dE, dQ, dQt, dW, dWt, dQc, dWc, Q, W, dQF = ({} for _ in range(12))
    D = {}
    for j in (1, 2):
        g = gens[j]
        B = st.basis(j)
        n = B.shape[-1]
        d = np.where(v1[:, None], _diag(B, np.nan_to_num(g.H_eff), r), np.nan)
        D[j] = d
        E[j] = np.sum(s2 * d, axis=1)
        trace_h = np.real(np.trace(g.H_eff, axis1=1, axis2=2))
        E_can[j] = E[j] - trace_h / n
        dE[j] = np.where(v2, _fd(E[j], dt, v2), np.nan)
        dQ[j] = np.sum(np.where(support, ds2 * d, 0.0), axis=1)
        dQ[j][~v1] = np.nan
        rho = traj.reduced_states(j)
        drho = _fd(rho, dt, v1)
        dQt[j] = np.real(np.einsum("kab,kba->k", drho, g.H_eff))
        dd = _fd(d, dt, v2)
        dW[j] = np.sum(np.where(support, s2 * dd, 0.0), axis=1)
        dW[j][~v2] = np.nan
        dH = _fd(g.H_eff, dt, v2)
        dWt[j] = np.real(np.einsum("kab,kba->k", rho, dH))
        dWt[j][~v2] = np.nan
        dQc[j] = dQ[j] - trace_h / n * np.sum(np.where(support, ds2, 0.0), axis=1)
        dWc[j] = dW[j] - _fd(trace_h, dt, v2) / n
        Q[j] = cumulative_trapezoid(st.times, dQ[j])
        W[j] = cumulative_trapezoid(st.times, dW[j])
        free = _diag(B, spec.free_hamiltonian(j), r)
        D[("F", j)] = free
        dQF[j] = np.sum(np.where(support, ds2 * free, 0.0), axis=1)
        dQF[j][~v1] = np.nan

    z = np.where(support, _z(st.B1, st.B2, traj.states, spec, r), 0.0)
    dz = _fd(z, dt, v1)
    dQ_int = np.imag(np.sum(z**2, axis=1))
    dW_int = np.sum(np.where(support, s * np.real(dz), 0.0), axis=1) - 0.5 * dQ_int
    dW_int[~v1] = np.nan
    free_sum = D[("F", 1)] + D[("F", 2)]
    free_drift = np.sum(np.where(support, s2 * _fd(free_sum, dt, v1), 0.0), axis=1)
    free_drift[~v1] = np.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        diag_res = np.abs(D[1] + D[2] - free_sum - np.real(z) / s)
    diag_res = np.where(support & v1[:, None], diag_res, np.nan)
    ds = _fd(s, dt, v1)
    from .model import initial_energy

    return ThermoRecord(
        times=st.times, energy_total0=initial_energy(spec), E=E, E_can=E_can, dE=dE, dQ=dQ,
        dQ_trace=dQt, dW=dW, dW_trace=dWt, dQ_can=dQc, dW_can=dWc, Q=Q, W=W, dQ_F=dQF,
        dQ_int=dQ_int, dW_int=dW_int, free_drift=free_drift, z=z, ds_dt=ds, diagonal_residual=diag_res,
        valid1=v1, valid2=v2,
    )
