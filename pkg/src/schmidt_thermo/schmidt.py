"""Gauge-fixed, time-continuous Schmidt decomposition along a trajectory.

Per time slice the SVD of the ``N1 x N2`` reshaped state fixes the
Schmidt vectors only up to ordering and phases.  Time derivatives of the
bases need a continuous choice, so :func:`align_trajectory` locks it:

* column order follows the previous frame (greedy max ``|overlap|`` on
  subsystem 1, lowest previous index wins ties);
* the subsystem-1 phase makes consecutive overlaps real positive;
* the subsystem-2 phase compensates so every ``s_l`` stays real positive;
* numerically-null directions are rotated inside their subspace to the
  closest match of the previous frame (polar factor of the overlap).

Steps across which the convention cannot stay smooth are recorded as
breaks: rank changes, sign flips of a Schmidt pair where ``s_l`` touches
zero between grid points, and ambiguous (degenerate) assignments.
Finite-difference stencils that straddle a break are invalid.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .evolution import Trajectory
from .numerics import TOL, PreconditionError, dagger


class GaugeAlignmentError(RuntimeError):
    pass


class DegeneracyWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SchmidtFrame:
    t: float
    s: np.ndarray  # (min(N1, N2),)
    basis1: np.ndarray  # columns |phi_l^(1)>
    basis2: np.ndarray  # columns |phi_l^(2)>
    M: int
    flags: tuple[str, ...] = ()

    @property
    def dims(self) -> tuple[int, int]:
        return self.basis1.shape[0], self.basis2.shape[0]

    def state(self) -> np.ndarray:
        r = len(self.s)
        c = (self.basis1[:, :r] * self.s) @ self.basis2[:, :r].T
        return c.reshape(-1)

    def reduced_state(self, subsystem: int) -> np.ndarray:
        b = self.basis1 if subsystem == 1 else self.basis2
        r = len(self.s)
        return (b[:, :r] * self.s**2) @ dagger(b[:, :r])


def effective_rank(s, eps_rank: float = TOL.eps_rank) -> int:
    return int(np.count_nonzero(np.asarray(s, dtype=float) ** 2 > eps_rank))


def schmidt_decompose(psi, dims: tuple[int, int], t: float = 0.0,
                      eps_rank: float = TOL.eps_rank) -> SchmidtFrame:
    """Raw (unaligned) Schmidt decomposition: descending ``s``, SVD phases."""
    n1, n2 = dims
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (n1 * n2,):
        raise PreconditionError(f"state shape {psi.shape} does not match dims {dims}")
    u, s, vh = np.linalg.svd(psi.reshape(n1, n2))
    return SchmidtFrame(float(t), s, u, vh.T.copy(), effective_rank(s, eps_rank))


@dataclass(frozen=True)
class StepDiagnostics:
    min_overlap: float
    degenerate: bool = False
    rank_change: bool = False
    node: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class SchmidtTrajectory:
    frames: list[SchmidtFrame]
    steps: list[StepDiagnostics] = field(default_factory=list)
    eps_rank: float = TOL.eps_rank

    def __post_init__(self):
        object.__setattr__(self, "times", np.array([f.t for f in self.frames]))
        object.__setattr__(self, "s", np.array([f.s for f in self.frames]))
        object.__setattr__(self, "B1", np.array([f.basis1 for f in self.frames]))
        object.__setattr__(self, "B2", np.array([f.basis2 for f in self.frames]))
        object.__setattr__(self, "M", np.array([f.M for f in self.frames]))
        breaks = np.array([st.degenerate or st.rank_change or bool(st.node) for st in self.steps],
                          dtype=bool)
        object.__setattr__(self, "breaks", breaks)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def dims(self) -> tuple[int, int]:
        return self.frames[0].dims

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def basis(self, subsystem: int) -> np.ndarray:
        return self.B1 if subsystem == 1 else self.B2

    def rho(self, subsystem: int) -> np.ndarray:
        b = self.basis(subsystem)
        r = self.s.shape[1]
        return np.einsum("kil,kl,kjl->kij", b[:, :, :r], self.s**2, b[:, :, :r].conj())

    def valid(self, radius: int) -> np.ndarray:
        """Mask of centres whose ``[k - radius, k + radius]`` stencil is on the grid and break-free."""
        n = len(self.frames)
        ok = np.zeros(n, dtype=bool)
        if n <= 2 * radius:
            return ok
        bad = np.concatenate([[0], np.cumsum(self.breaks.astype(int))])
        k = np.arange(radius, n - radius)
        ok[k] = (bad[k + radius] - bad[k - radius]) == 0
        return ok

    def stencil_ok(self, k: int, radius: int) -> bool:
        return bool(self.valid(radius)[k]) if 0 <= k < len(self.frames) else False

    def diagnostics(self) -> dict:
        return {
            "n_frames": len(self.frames),
            "min_consecutive_overlap": float(min((st.min_overlap for st in self.steps), default=1.0)),
            "degeneracy_flags": int(sum(st.degenerate for st in self.steps)),
            "rank_transitions": [float(self.times[i + 1]) for i, st in enumerate(self.steps) if st.rank_change],
            "coefficient_nodes": [float(self.times[i + 1]) for i, st in enumerate(self.steps) if st.node],
            "rank_range": [int(self.M.min()), int(self.M.max())],
        }


def _polar(x: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(x)
    return u @ vh


def _order_first_frame(frame: SchmidtFrame, anchor) -> tuple[np.ndarray, np.ndarray]:
    b1, b2 = frame.basis1.astype(complex), frame.basis2.astype(complex)
    if anchor is not None:
        # pin the dominant pair to the given initial vectors so that U^(j)(0) = 1 holds literally
        phi1 = np.asarray(anchor[0], dtype=complex)
        ov = phi1.conj() @ b1[:, 0]
        if abs(ov) > 0.5:
            ph = ov / abs(ov)
            b1[:, 0] *= np.conj(ph)
            b2[:, 0] *= ph
    return b1, b2


def _kernel_fill(target: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(kernel) closest to the columns of ``target``."""
    if kernel.shape[1] == 0:
        return kernel
    return kernel @ _polar(dagger(kernel) @ target)


def _align_step(prev: SchmidtFrame, raw: SchmidtFrame, s_align: float, eps_rank: float,
                ambiguity: float = 1e-6, min_overlap: float = 0.5):
    n1, n2 = raw.dims
    r = len(raw.s)
    strong = [i for i in range(r) if raw.s[i] > s_align]
    o1 = dagger(prev.basis1) @ raw.basis1
    taken: dict[int, int] = {}
    degenerate = False
    worst = 1.0
    for i in strong:
        cand = [l for l in range(r) if l not in taken]
        mags = np.abs(o1[cand, i])
        order = np.argsort(-mags, kind="stable")
        best = cand[order[0]]
        if len(order) > 1 and mags[order[0]] - mags[order[1]] < ambiguity:
            degenerate = True
        if mags[order[0]] < min_overlap:
            raise GaugeAlignmentError(
                f"Schmidt alignment failed at t={raw.t:.6g}: best overlap {mags[order[0]]:.3f} < "
                f"{min_overlap}; reduce dt")
        worst = min(worst, float(mags[order[0]]))
        taken[best] = i

    b1 = np.empty_like(raw.basis1)
    b2 = np.empty_like(raw.basis2)
    s = np.zeros(r)
    nodes = []
    for l, i in taken.items():
        ov = o1[l, i]
        ph = ov / abs(ov)
        b1[:, l] = raw.basis1[:, i] * np.conj(ph)
        b2[:, l] = raw.basis2[:, i] * ph
        s[l] = raw.s[i]
        if prev.s[l] > s_align and np.real(np.vdot(prev.basis2[:, l], b2[:, l])) < 0:
            nodes.append(l)

    used = set(taken.values())
    for basis_new, basis_prev, raw_basis, n in ((b1, prev.basis1, raw.basis1, n1),
                                                 (b2, prev.basis2, raw.basis2, n2)):
        rest = [l for l in range(n) if l not in taken]
        free = [i for i in range(n) if i not in used]
        basis_new[:, rest] = _kernel_fill(basis_prev[:, rest], raw_basis[:, free])

    c = raw.state().reshape(n1, n2)
    for l in range(r):
        if l not in taken:
            s[l] = abs(b1[:, l].conj() @ c @ b2[:, l].conj())

    m = effective_rank(s, eps_rank)
    flags = ("degenerate",) if degenerate else ()
    frame = SchmidtFrame(raw.t, s, b1, b2, m, flags)
    diag = StepDiagnostics(worst, degenerate, m != prev.M, tuple(nodes))
    return frame, diag


def align_trajectory(raw_frames: list[SchmidtFrame], anchor=None,
                     eps_rank: float = TOL.eps_rank, s_align: float = TOL.s_align) -> SchmidtTrajectory:
    """Fix ordering and phases of consecutive raw frames (see module docstring).

    ``anchor`` optionally gives the initial local states ``(phi1_0, phi2_0)``;
    the dominant pair of the first frame is then phased to equal them.
    """
    if not raw_frames:
        raise PreconditionError("no frames to align")
    first = raw_frames[0]
    b1, b2 = _order_first_frame(first, anchor)
    if len(raw_frames) > 1:
        # seed the null directions of the first frame from the next one, where they are resolved
        nxt = raw_frames[1]
        r = len(first.s)
        for b, nb in ((b1, nxt.basis1), (b2, nxt.basis2)):
            null = [l for l in range(b.shape[1]) if l >= r or first.s[l] <= s_align]
            if null:
                b[:, null] = _kernel_fill(nb[:, null], b[:, null])
    s0 = first.s.copy()
    frames = [SchmidtFrame(first.t, s0, b1, b2, effective_rank(s0, eps_rank))]
    steps = []
    for raw in raw_frames[1:]:
        frame, diag = _align_step(frames[-1], raw, s_align, eps_rank)
        if diag.degenerate:
            warnings.warn(f"near-degenerate Schmidt assignment at t={raw.t:.6g}", DegeneracyWarning,
                          stacklevel=2)
        frames.append(frame)
        steps.append(diag)
    return SchmidtTrajectory(frames, steps, eps_rank)


def schmidt_trajectory(traj: Trajectory, eps_rank: float = TOL.eps_rank) -> SchmidtTrajectory:
    n1, n2 = traj.spec.dims
    u, s, vh = np.linalg.svd(np.asarray(traj.states, dtype=complex).reshape(-1, n1, n2))
    raw = [SchmidtFrame(float(t), s[k], u[k], vh[k].T.copy(), effective_rank(s[k], eps_rank))
           for k, t in enumerate(traj.times)]
    return align_trajectory(raw, anchor=(traj.spec.phi1_0, traj.spec.phi2_0), eps_rank=eps_rank)
