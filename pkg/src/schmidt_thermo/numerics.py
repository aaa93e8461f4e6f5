"""Dense complex linear algebra and Haar random-matrix primitives.

Matrices are plain ``numpy`` complex arrays.  The helpers here validate
shapes and finiteness at the boundary and keep every tolerance in one
place (:data:`TOL`) so the CLI and the tests agree on them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class PreconditionError(ValueError):
    """An input violated the documented precondition of an operation."""


@dataclass(frozen=True)
class Tolerances:
    tol_herm: float = 1e-10
    tol_unitary: float = 1e-9
    tol_recon: float = 1e-10
    tol_norm: float = 1e-12
    eps_rank: float = 1e-12
    # singular values above this are tracked individually by the gauge fixing
    s_align: float = 1e-10
    # anti-hermitian residual of a finite-difference generator, in units of dt**2
    herm_coeff: float = 1e4


TOL = Tolerances()


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise PreconditionError(f"{name}: expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PreconditionError(f"{name}: non-finite entries")
    return m


def as_cvector(a, name: str = "vector") -> np.ndarray:
    v = np.asarray(a, dtype=complex)
    if v.ndim != 1:
        raise PreconditionError(f"{name}: expected a 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise PreconditionError(f"{name}: non-finite entries")
    return v


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def unitarity_error(u: np.ndarray) -> float:
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(dagger(u) @ u - eye)))


def is_hermitian(a: np.ndarray, tol: float = TOL.tol_herm) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1] and hermiticity_error(a) <= tol


def _require_hermitian(a, name: str, tol: float) -> np.ndarray:
    m = as_cmatrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise PreconditionError(f"{name}: not square, shape {m.shape}")
    err = hermiticity_error(m)
    if err > tol:
        raise PreconditionError(f"{name}: not hermitian (max |A - A^dag| = {err:.3g})")
    return m


def hermitian_eig(a, tol: float = TOL.tol_herm) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector columns of a hermitian matrix."""
    m = _require_hermitian(a, "hermitian_eig input", tol)
    # symmetrize so round-off anti-hermitian parts cannot leak into eigh
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return w, v


def svd(a, full_matrices: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``A = U @ diag(s) @ V^dag`` with ``s`` descending; returns ``(U, s, V)``."""
    m = as_cmatrix(a, "svd input")
    u, s, vh = np.linalg.svd(m, full_matrices=full_matrices)
    return u, s, dagger(vh)


def expm_hermitian_prop(h, t: float, tol: float = TOL.tol_herm) -> np.ndarray:
    """Propagator ``exp(-i H t)`` built from the spectral decomposition of ``H``."""
    w, v = hermitian_eig(h, tol)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitaries(d: int, n: int, seed=None) -> np.ndarray:
    """``n`` Haar-distributed ``d x d`` unitaries, shape ``(n, d, d)``.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into
    ``Q``; without that correction the QR output is not Haar distributed.
    """
    if d < 1:
        raise PreconditionError(f"dimension must be >= 1, got {d}")
    rng = _rng(seed)
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d: int, rng_seed=None) -> np.ndarray:
    return haar_unitaries(d, 1, rng_seed)[0]


def haar_states(d: int, n: int, seed=None) -> np.ndarray:
    """``n`` Haar-random unit vectors in ``C^d``, shape ``(n, d)``."""
    if d < 1:
        raise PreconditionError(f"dimension must be >= 1, got {d}")
    rng = _rng(seed)
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_state(d: int, rng_seed=None) -> np.ndarray:
    return haar_states(d, 1, rng_seed)[0]


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo mean with its entrywise standard error."""

    mean: np.ndarray
    stderr: np.ndarray
    n: int

    def within(self, value, n_sigma: float = 3.0, atol: float = 1e-12) -> bool:
        """Entrywise ``|mean - value| <= n_sigma * stderr + atol``.

        ``atol`` covers entries whose samples are all equal (zero stderr).
        """
        return bool(np.all(np.abs(self.mean - value) <= n_sigma * self.stderr + atol))

    def z_scores(self, value) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.mean - value) / self.stderr


@dataclass
class RunningMoments:
    """Streaming mean / variance; partial results merge with :meth:`merge`."""

    n: int = 0
    mean: np.ndarray | float = 0.0
    m2: np.ndarray | float = 0.0

    def add_batch(self, x: np.ndarray) -> None:
        nb = x.shape[0]
        mb = x.mean(axis=0)
        m2b = (np.abs(x - mb) ** 2).sum(axis=0)
        self.merge(RunningMoments(nb, mb, m2b))

    def merge(self, other: "RunningMoments") -> None:
        if other.n == 0:
            return
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.n / n)
        self.m2 = self.m2 + other.m2 + np.abs(delta) ** 2 * (self.n * other.n / n)
        self.n = n

    def estimate(self) -> MCEstimate:
        var = self.m2 / max(self.n - 1, 1)
        return MCEstimate(np.asarray(self.mean), np.sqrt(var / self.n), self.n)


def monte_carlo_mean(
    sample: Callable[[int, np.random.Generator], np.ndarray],
    n_samples: int,
    seed: int,
    chunk: int = 20000,
) -> MCEstimate:
    """Mean of ``sample(n, rng)`` over ``n_samples`` draws.

    Draws are split into chunks, each with its own child seed spawned from
    ``seed``; chunks are independent and could be evaluated by separate
    workers and merged in any order.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    n_chunks = -(-n_samples // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    acc = RunningMoments()
    remaining = n_samples
    for child in children:
        nb = min(chunk, remaining)
        acc.add_batch(sample(nb, np.random.default_rng(child)))
        remaining -= nb
    return acc.estimate()


def haar_conjugation_mc(m, n_samples: int = 100_000, seed: int = 0, adjoint_first: bool = True) -> MCEstimate:
    """Monte-Carlo estimate of ``E[U^dag M U]`` (or ``E[U M U^dag]``); both equal ``Tr(M)/d * 1``."""
    m = as_cmatrix(m, "M")
    d = m.shape[0]

    def sample(n, rng):
        u = haar_unitaries(d, n, rng)
        ud = dagger(u)
        return ud @ m @ u if adjoint_first else u @ m @ ud

    return monte_carlo_mean(sample, n_samples, seed)
