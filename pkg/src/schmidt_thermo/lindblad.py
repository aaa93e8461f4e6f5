"""Schmidt-basis master equation in Lindblad form and its symmetry group."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .effective import LocalGenerator, SuperOp
from .numerics import PreconditionError, dagger, haar_unitary
from .schmidt import SchmidtTrajectory


class RankTransitionError(RuntimeError):
    pass


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def central_difference(series: np.ndarray, k: int, dt: float) -> np.ndarray:
    return (series[k + 1] - series[k - 1]) / (2.0 * dt)


def _check_window(st: SchmidtTrajectory, k: int, radius: int = 1) -> None:
    if not st.stencil_ok(k, radius):
        lo, hi = max(k - radius, 0), min(k + radius, len(st) - 1)
        raise RankTransitionError(
            f"stencil around t={st.times[min(max(k, 0), len(st) - 1)]:.6g} (k={k}) is off-grid or "
            f"crosses a rank transition / coefficient node (ranks {st.M[lo:hi + 1].tolist()})")


def ds2_dt(st: SchmidtTrajectory, k: int) -> np.ndarray:
    """Central difference of the squared Schmidt coefficients at ``k``."""
    _check_window(st, k)
    return central_difference(st.s**2, k, st.dt)


def rates(st: SchmidtTrajectory, k: int) -> np.ndarray:
    """``g[l, l'] = d(s_l^2)/dt / (M s_l'^2)`` on the rank-``M`` support."""
    m = int(st.M[k])
    d = ds2_dt(st, k)[:m]
    s2 = st.s[k, :m] ** 2
    return d[:, None] / (m * s2[None, :])


@dataclass(frozen=True, eq=False)
class DissipatorData:
    """Transition operators ``G_ll' = |phi_l><phi_l'|`` and their rates at one grid point."""

    subsystem: int
    t: float
    basis: np.ndarray
    g: np.ndarray  # (M, M)
    M: int

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def G(self, l: int, lp: int) -> np.ndarray:
        return np.outer(self.basis[:, l], self.basis[:, lp].conj())

    def operators(self) -> tuple[np.ndarray, np.ndarray]:
        """All ``N^2`` transition operators, index ``l * N + l'``, with rates (zero off-support)."""
        n = self.dim
        ops = np.einsum("al,bm->lmab", self.basis, self.basis.conj()).reshape(n * n, n, n)
        full = np.zeros((n, n))
        full[: self.M, : self.M] = self.g
        return ops, full.reshape(-1)

    def superop(self) -> SuperOp:
        ops, r = self.operators()
        keep = r != 0
        if not keep.any():
            return SuperOp.zero(self.dim)
        return SuperOp.lindblad(ops[keep], r[keep])

    def zero_sum_residual(self) -> float:
        """``|| sum g_ll' G_ll'^dag G_ll' ||``, which vanishes by normalization of ``s``."""
        ops, r = self.operators()
        acc = np.einsum("k,kba,kbc->ac", r, ops.conj(), ops)
        return float(np.linalg.norm(acc))


def dissipator_data(st: SchmidtTrajectory, subsystem: int, k: int) -> DissipatorData:
    g = rates(st, k)
    return DissipatorData(subsystem, float(st.times[k]), st.basis(subsystem)[k], g, int(st.M[k]))


def dissipator_apply(D: DissipatorData, rho: np.ndarray) -> np.ndarray:
    """Full Lindblad-form action ``sum g (G rho G^dag - 1/2 {G^dag G, rho})`` on any ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (D.dim, D.dim):
        raise PreconditionError(f"rho has shape {rho.shape}, expected {(D.dim, D.dim)}")
    out = np.zeros_like(rho)
    for l in range(D.M):
        for lp in range(D.M):
            gl = D.g[l, lp]
            if gl == 0:
                continue
            G = D.G(l, lp)
            out += gl * (G @ rho @ dagger(G) - 0.5 * anticommutator(dagger(G) @ G, rho))
    return out


def population_term(st: SchmidtTrajectory, subsystem: int, k: int) -> np.ndarray:
    """``sum_l d(s_l^2)/dt |phi_l><phi_l|``, the non-unitary term before it is put in Lindblad form."""
    m = int(st.M[k])
    b = st.basis(subsystem)[k][:, :m]
    return (b * ds2_dt(st, k)[:m]) @ dagger(b)


def schmidt_rhs(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> np.ndarray:
    """``-i [H^(j), rho_j] + sum_l d(s_l^2)/dt G_ll`` at grid index ``k``."""
    j = gen.subsystem
    rho = st.frames[k].reduced_state(j)
    return -1j * commutator(gen.H_eff[k], rho) + population_term(st, j, k)


def master_equation_residual(st: SchmidtTrajectory, gen: LocalGenerator, k: int,
                             rho_series: np.ndarray | None = None) -> float:
    """Frobenius norm of ``FD(rho_j)(t_k) - RHS(t_k)``.

    ``rho_series`` defaults to the reduced states rebuilt from the Schmidt
    frames; pass partial traces of the trajectory for an independent path.
    """
    _check_window(st, k)
    rho = st.rho(gen.subsystem) if rho_series is None else rho_series
    lhs = central_difference(rho, k, st.dt)
    return float(np.linalg.norm(lhs - schmidt_rhs(st, gen, k)))


@dataclass(frozen=True, eq=False)
class LindbladForm:
    """Generator ``-i[H, .] + sum_k r_k (L_k . L_k^dag - 1/2 {L_k^dag L_k, .})``."""

    H: np.ndarray
    ops: np.ndarray  # (n_ops, d, d)
    rates: np.ndarray  # (n_ops,)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def dissipator(self) -> SuperOp:
        return SuperOp.lindblad(self.ops, self.rates)

    def superop(self) -> SuperOp:
        return SuperOp.hamiltonian(self.H) + self.dissipator()

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        return self.superop()(rho)


def schmidt_lindblad_form(st: SchmidtTrajectory, gen: LocalGenerator, k: int) -> LindbladForm:
    D = dissipator_data(st, gen.subsystem, k)
    ops, r = D.operators()
    return LindbladForm(gen.H_eff[k], ops, r)


def symmetry_shift(form: LindbladForm, alpha, beta: float = 0.0) -> LindbladForm:
    """Inhomogeneous shift ``L -> L + alpha 1`` with the compensating Hamiltonian change.

    ``alpha`` holds one complex number per operator; a square ``(M, M)`` array
    addresses the leading ``M x M`` block of an ``(N, N)`` operator grid.
    """
    n_ops = len(form.rates)
    a = np.asarray(alpha, dtype=complex)
    if a.ndim == 2:
        side = int(round(np.sqrt(n_ops)))
        if side * side != n_ops or a.shape[0] > side:
            raise PreconditionError("square alpha needs an N x N operator grid of at least its size")
        full = np.zeros((side, side), dtype=complex)
        full[: a.shape[0], : a.shape[1]] = a
        a = full.reshape(-1)
    if a.shape != (n_ops,):
        raise PreconditionError(f"alpha has {a.size} entries for {n_ops} operators")
    eye = np.eye(form.dim)
    new_ops = form.ops + a[:, None, None] * eye
    shift = np.einsum("k,kab->ab", form.rates * a.conj(), form.ops)
    h = form.H + (shift - dagger(shift)) / 2j + beta * eye
    return LindbladForm(h, new_ops, form.rates.copy())


def sign_matrix(rates_) -> np.ndarray:
    return np.diag(np.sign(np.asarray(rates_, dtype=float)))


def unitary_mixing(form: LindbladForm, A) -> LindbladForm:
    """Mix the operators ``sqrt|r_k| L_k`` by a unitary that preserves ``diag(sgn r)``.

    The returned form carries rates ``sgn r_k`` (``+1``, ``-1`` or ``0``).
    """
    A = np.asarray(A, dtype=complex)
    n_ops = len(form.rates)
    if A.shape != (n_ops, n_ops):
        raise PreconditionError(f"A has shape {A.shape}, expected {(n_ops, n_ops)}")
    J = sign_matrix(form.rates)
    if np.max(np.abs(A @ dagger(A) - np.eye(n_ops))) > 1e-10:
        raise PreconditionError("A is not unitary")
    if np.max(np.abs(A @ J @ dagger(A) - J)) > 1e-10:
        raise PreconditionError("A does not preserve the sign matrix J = diag(sgn g)")
    scaled = np.sqrt(np.abs(form.rates))[:, None, None] * form.ops
    new_ops = np.einsum("kl,lab->kab", A, scaled)
    return LindbladForm(form.H.copy(), new_ops, np.diag(J).copy())


def random_sign_preserving_unitary(rates_, seed=None) -> np.ndarray:
    """Block-diagonal Haar unitary acting within each sign class of ``rates_``."""
    signs = np.sign(np.asarray(rates_, dtype=float))
    rng = np.random.default_rng(seed)
    A = np.zeros((len(signs), len(signs)), dtype=complex)
    for sgn in (-1.0, 0.0, 1.0):
        idx = np.flatnonzero(signs == sgn)
        if idx.size:
            A[np.ix_(idx, idx)] = haar_unitary(idx.size, rng)
    return A


def _support_rates(st: SchmidtTrajectory, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared-coefficient derivatives and the rate matrices at ``ks``, zero off-support."""
    r = st.s.shape[1]
    s2 = st.s**2
    ds2 = (s2[ks + 1] - s2[ks - 1]) / (2 * st.dt)
    on = np.arange(r)[None, :] < st.M[ks][:, None]
    ds2 = np.where(on, ds2, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = ds2[:, :, None] / (st.M[ks][:, None, None] * s2[ks][:, None, :])
    g = np.where(on[:, :, None] & on[:, None, :], g, 0.0)
    return ds2, g


def master_equation_residuals(st: SchmidtTrajectory, gen: LocalGenerator,
                              rho_series: np.ndarray | None = None) -> np.ndarray:
    """:func:`master_equation_residual` at every grid point (NaN where the stencil is unusable)."""
    rho = st.rho(gen.subsystem) if rho_series is None else rho_series
    out = np.full(len(st), np.nan)
    ks = np.flatnonzero(st.valid(1))
    if ks.size == 0:
        return out
    r = st.s.shape[1]
    B = st.basis(gen.subsystem)[ks][:, :, :r]
    ds2, _ = _support_rates(st, ks)
    lhs = (rho[ks + 1] - rho[ks - 1]) / (2 * st.dt)
    h, rk = gen.H_eff[ks], rho[ks]
    rhs = -1j * (h @ rk - rk @ h) + np.einsum("kal,kl,kbl->kab", B, ds2, B.conj())
    out[ks] = np.linalg.norm(lhs - rhs, axis=(1, 2))
    return out


def generator_equivalence_residuals(st: SchmidtTrajectory, subsystem: int,
                                    rho_series: np.ndarray | None = None) -> np.ndarray:
    """Distance between the Lindblad-form dissipator acting on ``rho`` and the population term.

    The two agree on states diagonal in the Schmidt basis; ``rho_series``
    defaults to the partial traces rebuilt from the frames.
    """
    rho = st.rho(subsystem) if rho_series is None else rho_series
    out = np.full(len(st), np.nan)
    ks = np.flatnonzero(st.valid(1))
    if ks.size == 0:
        return out
    r = st.s.shape[1]
    B = st.basis(subsystem)[ks][:, :, :r]
    ds2, g = _support_rates(st, ks)
    rk = rho[ks]
    # matrix elements <phi_l'|rho|phi_l'> feed the jump term
    pops = np.real(np.einsum("kal,kab,kbl->kl", B.conj(), rk, B))
    jump = np.einsum("kal,kl,kbl->kab", B, np.einsum("klm,km->kl", g, pops), B.conj())
    # sum_l g_ll' G_l'l' summed over l gives the weight of each projector in {., rho}
    w = g.sum(axis=1)
    P = np.einsum("kal,kl,kbl->kab", B, w, B.conj())
    diss = jump - 0.5 * (P @ rk + rk @ P)
    pop = np.einsum("kal,kl,kbl->kab", B, ds2, B.conj())
    out[ks] = np.linalg.norm(diss - pop, axis=(1, 2))
    return out
