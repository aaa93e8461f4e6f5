"""Effective local Hamiltonians, superoperators and Haar-averaged maps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (TOL, MCEstimate, PreconditionError, as_cmatrix, dagger, haar_states,
                       haar_unitaries, hermiticity_error, monte_carlo_mean)
from .schmidt import SchmidtTrajectory


class GaugeDiscontinuityError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LocalGenerator:
    """Time series of ``H^(j)(t)`` and ``U^(j)(t)`` for one subsystem.

    ``H_eff`` is NaN where the central difference is unavailable (grid
    ends, stencils across a break).
    """

    subsystem: int
    times: np.ndarray
    H_eff: np.ndarray
    U_local: np.ndarray
    herm_residual: np.ndarray
    valid: np.ndarray

    @property
    def dim(self) -> int:
        return self.H_eff.shape[-1]

    def canonical(self) -> np.ndarray:
        return self.H_eff - (np.trace(self.H_eff, axis1=-2, axis2=-1) / self.dim)[:, None, None] * np.eye(self.dim)


def local_unitaries(st: SchmidtTrajectory, subsystem: int) -> np.ndarray:
    """``U^(j)(t_k) = B_j(t_k) B_j(0)^dag``, mapping the initial Schmidt basis to the current one."""
    b = st.basis(subsystem)
    return b @ dagger(b[0])[None]


def _fd_generator(st: SchmidtTrajectory, subsystem: int, ks: np.ndarray):
    b = st.basis(subsystem)
    h = 1j * (b[ks + 1] - b[ks - 1]) @ dagger(b[ks]) / (2.0 * st.dt)
    resid = np.max(np.abs(h - dagger(h)), axis=(-2, -1))
    return 0.5 * (h + dagger(h)), resid


def effective_hamiltonian(st: SchmidtTrajectory, subsystem: int, k: int,
                          herm_coeff: float = TOL.herm_coeff) -> np.ndarray:
    """``i (dB/dt) B^dag`` at grid index ``k`` by a central difference, hermitized.

    Raises :class:`GaugeDiscontinuityError` if the anti-hermitian residual
    exceeds ``herm_coeff * dt**2``, which signals a jump in the gauge.
    """
    n = len(st)
    if not 1 <= k <= n - 2:
        raise PreconditionError(f"k={k} is not an interior grid index (1..{n - 2})")
    h, resid = _fd_generator(st, subsystem, np.array([k]))
    tol = herm_coeff * st.dt**2
    if resid[0] > tol:
        raise GaugeDiscontinuityError(
            f"anti-hermitian residual {resid[0]:.3g} > {tol:.3g} at t={st.times[k]:.6g}")
    return h[0]


def local_generator(st: SchmidtTrajectory, subsystem: int) -> LocalGenerator:
    n_frames = len(st)
    dim = st.basis(subsystem).shape[-1]
    valid = st.valid(1)
    ks = np.flatnonzero(valid)
    h_eff = np.full((n_frames, dim, dim), np.nan, dtype=complex)
    resid = np.full(n_frames, np.nan)
    if ks.size:
        h_eff[ks], resid[ks] = _fd_generator(st, subsystem, ks)
    return LocalGenerator(subsystem, st.times, h_eff, local_unitaries(st, subsystem), resid, valid)


def canonical_hamiltonian(h, d: int | None = None) -> np.ndarray:
    """Remove the trace: ``H - Tr(H)/d * 1``."""
    h = as_cmatrix(h, "H")
    d = h.shape[0] if d is None else d
    return h - np.trace(h) / d * np.eye(d)


@dataclass(frozen=True, eq=False)
class SuperOp:
    """Linear map on ``d x d`` matrices as a ``d^2 x d^2`` matrix.

    Vectorization is row-major (``X.reshape(-1)``), so that
    ``vec(A X B) = kron(A, B.T) vec(X)``.
    """

    dim: int
    matrix: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        d = self.dim
        flat = x.reshape(x.shape[:-2] + (d * d,))
        return (flat @ self.matrix.T).reshape(x.shape)

    def __add__(self, other: "SuperOp") -> "SuperOp":
        return SuperOp(self.dim, self.matrix + other.matrix)

    def __sub__(self, other: "SuperOp") -> "SuperOp":
        return SuperOp(self.dim, self.matrix - other.matrix)

    def __mul__(self, c: float) -> "SuperOp":
        return SuperOp(self.dim, c * self.matrix)

    __rmul__ = __mul__

    @classmethod
    def zero(cls, d: int) -> "SuperOp":
        return cls(d, np.zeros((d * d, d * d), dtype=complex))

    @classmethod
    def hamiltonian(cls, h) -> "SuperOp":
        """``X -> -i [H, X]``."""
        h = as_cmatrix(h, "H")
        d = h.shape[0]
        eye = np.eye(d)
        return cls(d, -1j * (np.kron(h, eye) - np.kron(eye, h.T)))

    @classmethod
    def lindblad(cls, ops, rates) -> "SuperOp":
        """``X -> sum_k r_k (L_k X L_k^dag - 1/2 {L_k^dag L_k, X})``."""
        ops = np.asarray(ops, dtype=complex)
        rates = np.asarray(rates, dtype=float)
        d = ops.shape[-1]
        eye = np.eye(d)
        sandwich = np.einsum("k,kab,kcd->acbd", rates, ops, ops.conj()).reshape(d * d, d * d)
        ldl = np.einsum("k,kba,kbc->ac", rates, ops.conj(), ops)
        return cls(d, sandwich - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T)))

    @classmethod
    def from_function(cls, fn, d: int) -> "SuperOp":
        cols = []
        for idx in range(d * d):
            e = np.zeros(d * d, dtype=complex)
            e[idx] = 1.0
            cols.append(np.asarray(fn(e.reshape(d, d)), dtype=complex).reshape(-1))
        return cls(d, np.array(cols).T)

    def hermiticity_error(self, n_probe: int = 8, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((n_probe, self.dim, self.dim)) + 1j * rng.standard_normal((n_probe, self.dim, self.dim))
        return float(np.max(np.abs(dagger(self(m)) - self(dagger(m)))))

    def trace_error(self, n_probe: int = 8, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((n_probe, self.dim, self.dim)) + 1j * rng.standard_normal((n_probe, self.dim, self.dim))
        return float(np.max(np.abs(np.trace(self(m), axis1=-2, axis2=-1))))


def phi_map_mc(L: SuperOp, n_samples: int = 100_000, seed: int = 0) -> MCEstimate:
    """Haar average ``(1/2i) E_U[U^dag L(U) - L(U^dag) U]`` with per-entry standard errors."""

    def sample(n, rng):
        u = haar_unitaries(L.dim, n, rng)
        ud = dagger(u)
        return (ud @ L(u) - L(ud) @ u) / 2j

    return monte_carlo_mean(sample, n_samples, seed)


def phi_map_exact(L: SuperOp) -> np.ndarray:
    """Exact Haar average behind :func:`phi_map_mc`, from ``E[conj(U_ab) U_cd] = delta_ac delta_bd / d``."""
    d = L.dim
    L4 = L.matrix.reshape(d, d, d, d)
    t1 = np.einsum("ajai->ij", L4) / d
    t2 = np.einsum("iaja->ij", L4) / d
    return (t1 - t2) / 2j


def phi_map_hamiltonian(h) -> np.ndarray:
    """Closed form of the Haar map on ``X -> -i[H, X]``: the traceless part of ``H``."""
    return canonical_hamiltonian(h)


def avg_inner_product(M: SuperOp, N: SuperOp, n_samples: int = 100_000, seed: int = 0) -> MCEstimate:
    """Double Haar average ``Re <psi| M(P)^dag N(P) |psi>`` with ``P = |phi><phi|``.

    ``phi`` and ``psi`` are independent Haar states.  For hermiticity-preserving
    maps ``M(P)`` is hermitian and this is the symmetrized ``<psi|M(P) N(P)|psi>``;
    the adjoint keeps the induced norm positive for any map.
    """
    if M.dim != N.dim:
        raise PreconditionError(f"dimension mismatch {M.dim} vs {N.dim}")
    d = M.dim

    def sample(n, rng):
        phi = haar_states(d, n, rng)
        psi = haar_states(d, n, rng)
        p = phi[:, :, None] * phi[:, None, :].conj()
        a, b = M(p), N(p)
        return np.real(np.einsum("ni,nij,nj->n", psi.conj(), dagger(a) @ b, psi))

    return monte_carlo_mean(sample, n_samples, seed)


def avg_norm(M: SuperOp, n_samples: int = 100_000, seed: int = 0) -> MCEstimate:
    """``sqrt(<<M|M>>_avg)``; the standard error is propagated to first order."""
    sq = avg_inner_product(M, M, n_samples, seed)
    value = float(np.sqrt(max(float(sq.mean), 0.0)))
    err = float(sq.stderr) / (2 * value) if value > 0 else float(np.sqrt(sq.stderr))
    return MCEstimate(np.asarray(value), np.asarray(err), sq.n)


__all__ = [
    "LocalGenerator", "GaugeDiscontinuityError", "SuperOp", "local_unitaries", "local_generator",
    "effective_hamiltonian", "canonical_hamiltonian", "phi_map_mc", "phi_map_exact", "phi_map_hamiltonian",
    "avg_inner_product", "avg_norm", "hermiticity_error",
]
