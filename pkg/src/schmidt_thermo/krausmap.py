"""Reduced dynamics of subsystem 1 as a dynamical map.

The map is ``N_t(X) = Tr_2(U(t) (X (x) |phi2_0><phi2_0|) U(t)^dag)``.  Its Kraus
operators are taken in the instantaneous Schmidt basis of subsystem 2,
which gives a closed-form inverse on the trajectory and lets the
generator ``dN_t/dt o N_t^-1`` be compared with the Schmidt master equation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .effective import SuperOp
from .evolution import Trajectory, propagators
from .lindblad import _check_window
from .numerics import PreconditionError, dagger
from .schmidt import SchmidtTrajectory


class InvertibilityWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class KrausFamily:
    t: float
    K: np.ndarray  # (N2, N1, N1)
    basis2: np.ndarray  # columns |psi_l^(2)> used to take the partial trace

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("lab,bc,ldc->ad", self.K, rho, self.K.conj())

    def completeness_residual(self) -> float:
        n1 = self.K.shape[-1]
        acc = np.einsum("lba,lbc->ac", self.K.conj(), self.K)
        return float(np.max(np.abs(acc - np.eye(n1))))


def _kraus_from_propagator(u: np.ndarray, dims, phi2_0: np.ndarray, basis2: np.ndarray) -> np.ndarray:
    n1, n2 = dims
    u4 = u.reshape(n1, n2, n1, n2)
    # K_l[a, b] = sum_{c, e} conj(psi_l[c]) U[(a, c), (b, e)] phi2_0[e]
    return np.einsum("cl,acbe,e->lab", basis2.conj(), u4, phi2_0)


def kraus_family(traj: Trajectory, st: SchmidtTrajectory, k: int, basis2=None) -> KrausFamily:
    """Kraus operators ``<psi_l(t)| U(t) |phi2_0>`` at ``t_k``.

    By default ``psi_l`` is the aligned Schmidt basis of subsystem 2.
    """
    t = float(traj.times[k])
    b2 = st.B2[k] if basis2 is None else np.asarray(basis2, dtype=complex)
    u = propagators(traj.spec, np.array([t]))[0]
    return KrausFamily(t, _kraus_from_propagator(u, traj.spec.dims, traj.spec.phi2_0, b2), b2)


def kraus_families(traj: Trajectory, st: SchmidtTrajectory, ks) -> list[KrausFamily]:
    ks = np.atleast_1d(ks)
    us = propagators(traj.spec, traj.times[ks])
    return [KrausFamily(float(traj.times[k]), _kraus_from_propagator(u, traj.spec.dims, traj.spec.phi2_0, st.B2[k]),
                        st.B2[k]) for k, u in zip(ks, us)]


def initial_rho1(st: SchmidtTrajectory) -> np.ndarray:
    b = st.B1[0][:, 0]
    return np.outer(b, b.conj())


def kraus_support_property(KF: KrausFamily, st: SchmidtTrajectory, k: int) -> np.ndarray:
    """Per-``l`` residual of ``K_l rho_0 = s_l U^(1)(t) G_l0(0)`` (zero for ``l >= M``)."""
    rho0 = initial_rho1(st)
    u1 = st.B1[k] @ dagger(st.B1[0])
    b0 = st.B1[0]
    m = int(st.M[k])
    out = np.empty(len(KF.K))
    for l, K in enumerate(KF.K):
        lhs = K @ rho0
        if l < m:
            rhs = st.s[k, l] * u1 @ np.outer(b0[:, l], b0[:, 0].conj())
        else:
            rhs = np.zeros_like(lhs)
        out[l] = np.linalg.norm(lhs - rhs)
    return out


def inverse_map(st: SchmidtTrajectory, k: int, rho, eps_factor: float = 10.0) -> np.ndarray:
    """``N_t^-1(rho) = sum_{l<M} G_l0(0)^dag U1^dag rho U1 G_l0(0) / (M s_l^2)``."""
    m = int(st.M[k])
    s2 = st.s[k, :m] ** 2
    if np.any(s2 <= st.eps_rank):
        raise PreconditionError(f"rank degeneracy at t={st.times[k]:.6g}: map not invertible")
    if s2.min() < eps_factor * st.eps_rank:
        warnings.warn(f"near-singular dynamical map at t={st.times[k]:.6g} (min s^2 = {s2.min():.3g})",
                      InvertibilityWarning, stacklevel=2)
    rho = np.asarray(rho, dtype=complex)
    b_t = st.B1[k][:, :m]
    # G_l0(0)^dag U1^dag X U1 G_l0(0) = |phi_0(0)><phi_l(t)| X |phi_l(t)><phi_0(0)|
    c = np.einsum("al,ab,bl->l", b_t.conj(), rho, b_t) / (m * s2)
    return c.sum() * initial_rho1(st)


def dynamical_map_superop(KF: KrausFamily) -> SuperOp:
    n1 = KF.K.shape[-1]
    return SuperOp(n1, np.einsum("lab,lcd->acbd", KF.K, KF.K.conj()).reshape(n1 * n1, n1 * n1))


def generator_action(traj: Trajectory, st: SchmidtTrajectory, k: int, rho) -> np.ndarray:
    """``dN_t/dt (N_t^-1(rho))`` evaluated directly on ``rho``.

    Preferred over materializing :func:`generator_from_map` when ``s_l^2`` is
    small: the matrix form sums ``1/s_l^2``-sized columns that cancel.
    """
    _check_window(st, k)
    before, after = kraus_families(traj, st, [k - 1, k + 1])
    y = inverse_map(st, k, rho)
    return (after.apply(y) - before.apply(y)) / (2.0 * st.dt)


def generator_from_map(traj: Trajectory, st: SchmidtTrajectory, k: int) -> SuperOp:
    """``L_t = dN_t/dt o N_t^-1`` with ``dN_t/dt`` a central difference of map outputs."""
    _check_window(st, k)
    n1 = st.dims[0]
    before, after = kraus_families(traj, st, [k - 1, k + 1])

    def fn(x):
        y = inverse_map(st, k, x)
        return (after.apply(y) - before.apply(y)) / (2.0 * st.dt)

    return SuperOp.from_function(fn, n1)
